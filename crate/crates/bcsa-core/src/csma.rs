//! CSMA-CA baseline: a discrete-event simulation of carrier-sense multiple
//! access with collision avoidance on one shared broadcast channel.
//!
//! Every node offers one fresh packet per frame period at a random phase.
//! Transmission needs the channel idle for an arbitration gap (AIFS); if the
//! channel is busy at arrival, the node draws a backoff counter once,
//! counts it down in idle backoff slots (freezing whenever the channel goes
//! busy), and transmits when it hits zero. Nodes that start transmitting at
//! the same instant collide and all their packets are lost. A packet still
//! waiting when its node's next offer arrives is dropped and replaced.
//! Losses are counted over one frame-length window per run after a warm-up,
//! at a uniformly drawn receiver (its own packets excluded).
//!
//! All timing is integer nanoseconds; every run is driven by a
//! counter-derived RNG stream, so chunked execution is deterministic
//! regardless of thread scheduling, exactly as in [`crate::sim`].

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Reverse;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::math;
use crate::sim::{stage_chunk_targets, Budget, SimError};

/// Timing and population parameters of one CSMA-CA operating point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CsmaScenario {
    /// Number of nodes, receiver included.
    pub m: u32,
    /// Packet generation period per node (one offer each), ns.
    pub t_frame_ns: u64,
    /// Time one transmission occupies the channel, ns.
    pub t_pack_ns: u64,
    /// Idle time required before any transmission, ns.
    pub aifs_ns: u64,
    /// Backoff countdown quantum, ns.
    pub slot_ns: u64,
    /// Backoff counters are drawn uniformly from `0..=backoff_max`.
    pub backoff_max: u32,
}

/// The usual power-of-two contention window: `2^u - 1`.
pub fn contention_window(u: u32) -> u32 {
    (1u32 << u) - 1
}

impl CsmaScenario {
    /// Checks the scenario's parameters for consistency.
    pub fn validate(&self) -> Result<(), SimError> {
        if self.m < 1 {
            return Err(SimError::TooFewUsers);
        }
        if self.slot_ns == 0 || self.t_pack_ns == 0 || self.t_frame_ns <= self.t_pack_ns {
            return Err(SimError::BadBudget);
        }
        Ok(())
    }
}

/// Loss estimate for one CSMA-CA operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct CsmaEstimate {
    /// Fraction of observed packets lost (collided or dropped).
    pub plr: f64,
    /// Normal-approximation 95% interval on `plr` over runs.
    pub ci95: (f64, f64),
    /// Independent runs simulated.
    pub runs: u64,
    /// Lost packets in all measurement windows (the stopping-rule events).
    pub error_events: u64,
    /// ...of which were dropped while still queued.
    pub drops: u64,
    /// ...of which collided on air.
    pub collisions: u64,
}

/// Exact per-chunk tallies; merging commutes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct CsmaTally {
    /// Runs simulated.
    pub runs: u64,
    /// Sum over runs of lost packets in the window.
    pub lost: u64,
    /// Sum of squared per-run losses (for the variance estimate).
    pub lost_sq: u64,
    /// Queue-drop portion of `lost`.
    pub drops: u64,
    /// Collision portion of `lost`.
    pub collisions: u64,
}

impl CsmaTally {
    /// Folds another tally into this one.
    pub fn merge(&mut self, other: &CsmaTally) {
        self.runs += other.runs;
        self.lost += other.lost;
        self.lost_sq += other.lost_sq;
        self.drops += other.drops;
        self.collisions += other.collisions;
    }
}

// ---------------------------------------------------------------------------
// Single-run event machine
// ---------------------------------------------------------------------------

/// Event kinds, ordered so that at equal times the channel frees up first,
/// then packets are offered, then transmissions start, then packets whose
/// arrival was deferred by their own node's transmission begin their access
/// procedure against the settled channel state.
const KIND_TX_END: u8 = 0;
const KIND_OFFER: u8 = 1;
const KIND_ATTEMPT: u8 = 2;
const KIND_RETRY: u8 = 3;

#[derive(Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Event {
    time: u64,
    kind: u8,
    node: u32,
    generation: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum NodeState {
    /// No packet queued.
    Idle,
    /// Fresh packet, channel was idle: transmitting after AIFS unless the
    /// channel goes busy first.
    WaitAifs,
    /// Counting down `remaining` backoff slots since `anchor`.
    Counting { anchor: u64, remaining: u32 },
    /// Backoff suspended while the channel is busy.
    Frozen { remaining: u32 },
    /// On air.
    Tx,
}

/// What one run observed inside its measurement window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) struct RunOutcome {
    /// Per node: packets dropped at an offer instant inside the window.
    pub drops: Vec<u8>,
    /// Per node: transmissions started inside the window that collided.
    pub collisions: Vec<u8>,
    /// Per node: every transmission start time (whole run, for tests).
    pub tx_starts: Vec<Vec<u64>>,
}

/// Runs one full CSMA-CA realization with explicit per-node offer phases
/// and an injectable backoff source, measuring the window
/// `[2*t_frame, 3*t_frame)`. The public path feeds RNG draws in; tests feed
/// scripted values to pin down edge cases.
pub(crate) fn simulate_run(
    sc: &CsmaScenario,
    phases: &[u64],
    draw_backoff: &mut dyn FnMut(u32) -> u32,
) -> RunOutcome {
    let m = sc.m as usize;
    debug_assert_eq!(phases.len(), m);
    let window = 2 * sc.t_frame_ns..3 * sc.t_frame_ns;
    let horizon = 3 * sc.t_frame_ns;

    let mut state = alloc::vec![NodeState::Idle; m];
    let mut generation = alloc::vec![0u32; m];
    // Offer arrived while the node's own radio was busy; the new packet
    // starts its access procedure when that transmission ends.
    let mut deferred = alloc::vec![false; m];
    let mut out = RunOutcome {
        drops: alloc::vec![0; m],
        collisions: alloc::vec![0; m],
        tx_starts: alloc::vec![Vec::new(); m],
    };
    let mut active_tx: u32 = 0;
    let mut heap: BinaryHeap<Reverse<Event>> = BinaryHeap::new();
    for (i, &phase) in phases.iter().enumerate() {
        debug_assert!(phase < sc.t_frame_ns);
        heap.push(Reverse(Event { time: phase, kind: KIND_OFFER, node: i as u32, generation: 0 }));
    }

    // Starts the listen-before-talk procedure for a fresh packet at node `i`:
    // on an idle channel the node senses for AIFS and then transmits; on a
    // busy one it draws its backoff counter and waits frozen.
    fn begin_access(
        sc: &CsmaScenario,
        t: u64,
        i: usize,
        active_tx: u32,
        state: &mut [NodeState],
        generation: &[u32],
        heap: &mut BinaryHeap<Reverse<Event>>,
        draw_backoff: &mut dyn FnMut(u32) -> u32,
    ) {
        if active_tx == 0 {
            state[i] = NodeState::WaitAifs;
            heap.push(Reverse(Event {
                time: t + sc.aifs_ns,
                kind: KIND_ATTEMPT,
                node: i as u32,
                generation: generation[i],
            }));
        } else {
            let b = draw_backoff(i as u32);
            state[i] = NodeState::Frozen { remaining: b };
        }
    }

    // Freezes every node that was sensing or counting when a transmission
    // began at `now`. Counting nodes bank fully elapsed idle slots first.
    fn freeze_all(
        sc: &CsmaScenario,
        now: u64,
        state: &mut [NodeState],
        generation: &mut [u32],
        draw_backoff: &mut dyn FnMut(u32) -> u32,
    ) {
        for i in 0..state.len() {
            match state[i] {
                NodeState::WaitAifs => {
                    generation[i] += 1;
                    let b = draw_backoff(i as u32);
                    state[i] = NodeState::Frozen { remaining: b };
                }
                NodeState::Counting { anchor, remaining } => {
                    let elapsed = now - anchor;
                    let done =
                        if elapsed > sc.aifs_ns { (elapsed - sc.aifs_ns) / sc.slot_ns } else { 0 };
                    // A counter that reached zero by `now` would have fired
                    // at or before `now` and joined the transmit group.
                    assert!(
                        (done as u64) < remaining as u64
                            || (remaining == 0 && elapsed < sc.aifs_ns),
                        "a node at zero backoff must be in the transmit group"
                    );
                    generation[i] += 1;
                    state[i] = NodeState::Frozen { remaining: remaining - done as u32 };
                }
                _ => {}
            }
        }
    }

    while let Some(Reverse(ev)) = heap.pop() {
        if ev.time >= horizon {
            break;
        }
        let t = ev.time;
        let i = ev.node as usize;
        match ev.kind {
            KIND_TX_END => {
                debug_assert_eq!(state[i], NodeState::Tx);
                state[i] = NodeState::Idle;
                active_tx -= 1;
                if active_tx == 0 {
                    // Channel idle again: frozen nodes resume counting from
                    // here; nothing else may be mid-procedure.
                    for j in 0..m {
                        match state[j] {
                            NodeState::Frozen { remaining } => {
                                state[j] = NodeState::Counting { anchor: t, remaining };
                                heap.push(Reverse(Event {
                                    time: t + sc.aifs_ns + remaining as u64 * sc.slot_ns,
                                    kind: KIND_ATTEMPT,
                                    node: j as u32,
                                    generation: generation[j],
                                }));
                            }
                            NodeState::WaitAifs | NodeState::Counting { .. } => {
                                unreachable!("sensing states cannot survive a busy channel")
                            }
                            NodeState::Idle | NodeState::Tx => {}
                        }
                    }
                }
                if deferred[i] {
                    // The packet that arrived mid-transmission starts its
                    // procedure now; the retry sorts after every other
                    // transmission ending at this same instant.
                    deferred[i] = false;
                    heap.push(Reverse(Event {
                        time: t,
                        kind: KIND_RETRY,
                        node: ev.node,
                        generation: generation[i],
                    }));
                }
            }
            KIND_OFFER => {
                if t + sc.t_frame_ns < horizon {
                    heap.push(Reverse(Event {
                        time: t + sc.t_frame_ns,
                        kind: KIND_OFFER,
                        node: ev.node,
                        generation: 0,
                    }));
                }
                // A packet still queued (not on air) is dropped for the new
                // one, access state included. A packet currently on air is
                // not queued: the fresh one waits for the radio instead.
                match state[i] {
                    NodeState::WaitAifs
                    | NodeState::Counting { .. }
                    | NodeState::Frozen { .. } => {
                        if window.contains(&t) {
                            out.drops[i] += 1;
                        }
                        generation[i] += 1;
                        state[i] = NodeState::Idle;
                    }
                    NodeState::Tx => {
                        debug_assert!(!deferred[i], "at most one offer per transmission");
                        deferred[i] = true;
                        continue;
                    }
                    NodeState::Idle => {}
                }
                begin_access(sc, t, i, active_tx, &mut state, &generation, &mut heap, draw_backoff);
            }
            KIND_ATTEMPT => {
                if ev.generation != generation[i] {
                    continue; // cancelled
                }
                // Group every fresh attempt at this same instant: they all
                // start transmitting together.
                let mut group = alloc::vec![ev.node];
                while let Some(Reverse(peek)) = heap.peek() {
                    if peek.time != t || peek.kind != KIND_ATTEMPT {
                        break;
                    }
                    let Reverse(next) = heap.pop().unwrap();
                    if next.generation == generation[next.node as usize] {
                        group.push(next.node);
                    }
                }
                assert_eq!(active_tx, 0, "attempts only fire on an idle channel");
                let collided = group.len() >= 2;
                for &node in &group {
                    let j = node as usize;
                    generation[j] += 1;
                    state[j] = NodeState::Tx;
                    active_tx += 1;
                    out.tx_starts[j].push(t);
                    if collided && window.contains(&t) {
                        out.collisions[j] += 1;
                    }
                    heap.push(Reverse(Event {
                        time: t + sc.t_pack_ns,
                        kind: KIND_TX_END,
                        node,
                        generation: generation[j],
                    }));
                }
                // The channel just went busy: everyone else suspends.
                freeze_all(sc, t, &mut state, &mut generation, draw_backoff);
            }
            KIND_RETRY => {
                debug_assert_eq!(state[i], NodeState::Idle);
                begin_access(sc, t, i, active_tx, &mut state, &generation, &mut heap, draw_backoff);
            }
            _ => unreachable!(),
        }
    }

    // Structural invariants of the window accounting: one offer per node
    // per window, and at most two packets (one carried over, one fresh) can
    // meet their fate there.
    for j in 0..m {
        assert!(out.drops[j] <= 1, "more than one drop in a one-frame window");
        assert!(out.drops[j] + out.collisions[j] <= 2, "more than two losses per node");
    }
    out
}

/// Runs one chunk of independent runs on its own RNG stream; stream ids
/// pack `(point_index << 32) | chunk_index` as in [`crate::sim`].
pub fn run_csma_chunk(
    sc: &CsmaScenario,
    seed: u64,
    point_index: u32,
    chunk_index: u32,
    runs: u64,
) -> Result<CsmaTally, SimError> {
    sc.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((point_index as u64) << 32) | chunk_index as u64);
    let mut tally = CsmaTally::default();
    let mut phases = alloc::vec![0u64; sc.m as usize];
    for _ in 0..runs {
        for phase in phases.iter_mut() {
            *phase = rng.gen_range(0..sc.t_frame_ns);
        }
        let receiver = rng.gen_range(0..sc.m) as usize;
        let mut draw = |_node: u32| rng.gen_range(0..=sc.backoff_max);
        let outcome = simulate_run(sc, &phases, &mut draw);
        let mut lost: u64 = 0;
        let mut drops: u64 = 0;
        let mut collisions: u64 = 0;
        for j in 0..sc.m as usize {
            if j == receiver {
                continue;
            }
            drops += outcome.drops[j] as u64;
            collisions += outcome.collisions[j] as u64;
            lost += (outcome.drops[j] + outcome.collisions[j]) as u64;
        }
        tally.runs += 1;
        tally.lost += lost;
        tally.lost_sq += lost * lost;
        tally.drops += drops;
        tally.collisions += collisions;
    }
    Ok(tally)
}

/// Converts tallies into a [`CsmaEstimate`]; the interval is a normal
/// approximation over per-run loss counts.
pub fn estimate_from_tally(sc: &CsmaScenario, tally: &CsmaTally) -> CsmaEstimate {
    // A lone node has no neighbors to lose packets from: PLR is zero by
    // definition (nothing can collide and the channel is never busy).
    if sc.m == 1 {
        return CsmaEstimate {
            plr: 0.0,
            ci95: (0.0, 0.0),
            runs: tally.runs,
            error_events: 0,
            drops: 0,
            collisions: 0,
        };
    }
    let neighbors = (sc.m - 1) as f64;
    let offered = tally.runs as f64 * neighbors;
    let plr = if tally.runs == 0 { 0.0 } else { tally.lost as f64 / offered };
    let ci95 = if tally.runs < 2 {
        (0.0, 1.0)
    } else {
        let runs = tally.runs as f64;
        let mean = tally.lost as f64 / runs;
        let var = (tally.lost_sq as f64 - runs * mean * mean) / (runs - 1.0);
        let half = 1.959963984540054 * math::sqrt(var.max(0.0) / runs) / neighbors;
        ((plr - half).max(0.0), (plr + half).min(1.0))
    };
    CsmaEstimate {
        plr,
        ci95,
        runs: tally.runs,
        error_events: tally.lost,
        drops: tally.drops,
        collisions: tally.collisions,
    }
}

/// Estimates one CSMA-CA operating point under the shared doubling-budget
/// schedule (`Budget` trial counts are runs here).
pub fn run_csma(
    sc: &CsmaScenario,
    budget: &Budget,
    seed: u64,
    point_index: u32,
) -> Result<CsmaEstimate, SimError> {
    sc.validate()?;
    budget.validate()?;
    let mut tally = CsmaTally::default();
    let mut next_chunk: u32 = 0;
    for target in stage_chunk_targets(budget) {
        while next_chunk < target {
            let chunk = run_csma_chunk(sc, seed, point_index, next_chunk, budget.chunk_trials)?;
            tally.merge(&chunk);
            next_chunk += 1;
        }
        if tally.lost >= budget.min_error_events {
            break;
        }
    }
    Ok(estimate_from_tally(sc, &tally))
}
