//! Frame instances and decoding.
//!
//! A frame is a bipartite graph: `m` users each place `degree` replicas of
//! one packet into distinct slots out of `n`. A half-duplex receiver cannot
//! listen during its own transmission slots, so those slots are erased from
//! its view. Decoding peels: any slot containing exactly one remaining
//! replica reveals that user's packet, whose other replicas are then
//! subtracted, possibly exposing further singleton slots.

use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dist::DegreeDistribution;
use crate::pattern::{pattern_of_slots, PatternKey};

/// One user's transmission choice within a frame.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserTx {
    /// User id, unique within the frame.
    pub id: u32,
    /// Slots carrying this user's replicas; sorted, distinct, all `< n`.
    pub slots: Vec<u16>,
}

impl UserTx {
    /// Repetition degree (number of replicas).
    #[inline]
    pub fn degree(&self) -> u16 {
        self.slots.len() as u16
    }
}

/// A fully sampled frame: `m` users over `n` slots.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FrameInstance {
    /// Number of slots in the frame.
    pub n: u16,
    /// All users, indexed by id (`users[i].id == i`).
    pub users: Vec<UserTx>,
    /// Seed the frame was generated from (recorded for reproducibility).
    pub seed: u64,
}

/// What one receiver hears: every slot it did not itself transmit in.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReceiverView {
    /// Id of the receiving user.
    pub receiver: u32,
    /// Number of slots in the frame.
    pub n: u16,
    /// Slots erased by the receiver's own transmissions; sorted.
    pub receiver_slots: Vec<u16>,
    /// Every other user, with only the replicas the receiver can hear.
    pub neighbors: Vec<NeighborTx>,
}

/// A neighbor as perceived by the receiver.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborTx {
    /// The neighbor's user id.
    pub id: u32,
    /// The neighbor's replica slots that survive erasure; sorted. May be
    /// empty, in which case the neighbor is invisible and undecodable.
    pub residual_slots: Vec<u16>,
}

impl ReceiverView {
    /// Perceived degree of neighbor index `i`: replicas audible after
    /// erasure.
    #[inline]
    pub fn perceived_degree(&self, i: usize) -> u16 {
        self.neighbors[i].residual_slots.len() as u16
    }

    /// Per-slot lists of neighbor ids audible in each slot. Receiver slots
    /// come back empty.
    pub fn slot_occupancy(&self) -> Vec<Vec<u32>> {
        let mut slots = alloc::vec![Vec::new(); self.n as usize];
        for nb in &self.neighbors {
            for &s in &nb.residual_slots {
                slots[s as usize].push(nb.id);
            }
        }
        slots
    }
}

/// Outcome of peeling a receiver view.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodeResult {
    /// Ids of neighbors whose packets were recovered; sorted.
    pub resolved: Vec<u32>,
    /// Ids of neighbors left unrecovered; sorted. Includes neighbors whose
    /// replicas were all erased.
    pub unresolved: Vec<u32>,
    /// Canonical slot-overlap patterns of the surviving connected
    /// components (one entry per component, sorted). Neighbors with zero
    /// audible replicas are not part of any component.
    pub residual: Vec<PatternKey>,
}

/// Errors raised by frame construction and decoding.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GraphError {
    /// The distribution's maximum degree exceeds the slot count.
    DegreeExceedsSlots,
    /// `m` must be at least 1.
    NoUsers,
    /// The requested receiver id does not exist in the frame.
    UnknownReceiver,
    /// A user's slot list is out of range, unsorted, or has duplicates.
    InvalidSlots,
    /// The reference decoder only handles m <= 12 neighbors and n <= 20.
    OracleTooLarge,
}

impl fmt::Display for GraphError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphError::DegreeExceedsSlots => write!(f, "max degree exceeds slot count"),
            GraphError::NoUsers => write!(f, "frame needs at least one user"),
            GraphError::UnknownReceiver => write!(f, "receiver id not in frame"),
            GraphError::InvalidSlots => write!(f, "user slot list invalid"),
            GraphError::OracleTooLarge => {
                write!(f, "reference decoder limited to 12 neighbors and 20 slots")
            }
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for GraphError {}

/// Samples `count` distinct slots out of `0..n`, returned sorted.
/// Floyd's algorithm: uniform over subsets, O(count^2) membership scans
/// (degrees are tiny).
pub(crate) fn sample_distinct_slots<R: Rng + ?Sized>(
    rng: &mut R,
    count: u16,
    n: u16,
    out: &mut Vec<u16>,
) {
    out.clear();
    for j in n - count..n {
        let t = rng.gen_range(0..=j);
        if out.contains(&t) {
            out.push(j);
        } else {
            out.push(t);
        }
    }
    out.sort_unstable();
}

/// Samples a frame: each of `m` users draws a degree from `dist` and places
/// its replicas in distinct uniform slots. Deterministic in `seed`.
pub fn generate_frame(
    n: u16,
    m: u32,
    dist: &DegreeDistribution,
    seed: u64,
) -> Result<FrameInstance, GraphError> {
    if m == 0 {
        return Err(GraphError::NoUsers);
    }
    if dist.max_degree() > n {
        return Err(GraphError::DegreeExceedsSlots);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut users = Vec::with_capacity(m as usize);
    for id in 0..m {
        let degree = dist.sample(&mut rng);
        let mut slots = Vec::with_capacity(degree as usize);
        sample_distinct_slots(&mut rng, degree, n, &mut slots);
        users.push(UserTx { id, slots });
    }
    Ok(FrameInstance { n, users, seed })
}

/// Validates a hand-built frame (used by tests and the catalog builder).
pub fn validate_frame(frame: &FrameInstance) -> Result<(), GraphError> {
    for user in &frame.users {
        let s = &user.slots;
        if s.windows(2).any(|w| w[0] >= w[1]) || s.iter().any(|&x| x >= frame.n) {
            return Err(GraphError::InvalidSlots);
        }
    }
    Ok(())
}

/// Builds the half-duplex receiver's view: the receiver's own slots are
/// erased from every neighbor.
pub fn receiver_view(frame: &FrameInstance, receiver: u32) -> Result<ReceiverView, GraphError> {
    let rx = frame
        .users
        .iter()
        .find(|u| u.id == receiver)
        .ok_or(GraphError::UnknownReceiver)?;
    let receiver_slots = rx.slots.clone();
    let neighbors = frame
        .users
        .iter()
        .filter(|u| u.id != receiver)
        .map(|u| NeighborTx {
            id: u.id,
            residual_slots: u
                .slots
                .iter()
                .copied()
                .filter(|s| receiver_slots.binary_search(s).is_err())
                .collect(),
        })
        .collect();
    Ok(ReceiverView { receiver, n: frame.n, receiver_slots, neighbors })
}

/// Reusable peeling workspace; lets the Monte-Carlo hot loop avoid
/// reallocating per trial.
#[derive(Debug, Default)]
pub(crate) struct PeelScratch {
    /// Unresolved-replica count per slot.
    counts: Vec<u32>,
    /// Neighbor indices transmitting in each slot.
    slot_users: Vec<Vec<u32>>,
    /// Work stack of candidate singleton slots.
    stack: Vec<u16>,
    /// Per-neighbor resolved flags (output).
    pub resolved: Vec<bool>,
}

impl PeelScratch {
    fn reset(&mut self, n: usize, m: usize) {
        self.counts.clear();
        self.counts.resize(n, 0);
        if self.slot_users.len() < n {
            self.slot_users.resize(n, Vec::new());
        }
        for su in &mut self.slot_users[..n] {
            su.clear();
        }
        self.stack.clear();
        self.resolved.clear();
        self.resolved.resize(m, false);
    }
}

/// Core peeling routine over neighbor replica lists. On return,
/// `scratch.resolved[i]` says whether neighbor `i` was recovered, and
/// `scratch.counts`/`slot_users` describe the surviving residual graph
/// (resolved users' replicas removed from the counts).
pub(crate) fn peel(n: usize, neighbor_slots: &[&[u16]], scratch: &mut PeelScratch) {
    scratch.reset(n, neighbor_slots.len());
    for (i, slots) in neighbor_slots.iter().enumerate() {
        for &s in *slots {
            scratch.counts[s as usize] += 1;
            scratch.slot_users[s as usize].push(i as u32);
        }
    }
    for s in 0..n {
        if scratch.counts[s] == 1 {
            scratch.stack.push(s as u16);
        }
    }
    while let Some(s) = scratch.stack.pop() {
        // A queued slot may have been drained in the meantime; only slots
        // holding exactly one unresolved replica reveal a packet.
        if scratch.counts[s as usize] != 1 {
            continue;
        }
        let user = scratch.slot_users[s as usize]
            .iter()
            .copied()
            .find(|&u| !scratch.resolved[u as usize])
            .expect("singleton slot must hold an unresolved replica");
        debug_assert_eq!(
            scratch.slot_users[s as usize]
                .iter()
                .filter(|&&u| !scratch.resolved[u as usize])
                .count(),
            1,
            "decoder must only resolve from true singleton slots"
        );
        scratch.resolved[user as usize] = true;
        for &t in neighbor_slots[user as usize] {
            scratch.counts[t as usize] -= 1;
            if scratch.counts[t as usize] == 1 {
                scratch.stack.push(t);
            }
        }
    }
}

/// Extracts the canonical patterns of surviving components after [`peel`].
pub(crate) fn residual_patterns(
    neighbor_slots: &[&[u16]],
    resolved: &[bool],
) -> Vec<PatternKey> {
    let m = neighbor_slots.len();
    // Map slot -> the unresolved neighbors using it.
    let mut slot_map: alloc::collections::BTreeMap<u16, Vec<u32>> =
        alloc::collections::BTreeMap::new();
    for (i, slots) in neighbor_slots.iter().enumerate() {
        if resolved[i] || slots.is_empty() {
            continue;
        }
        for &s in *slots {
            slot_map.entry(s).or_default().push(i as u32);
        }
    }
    let mut component: Vec<i32> = alloc::vec![-1; m];
    let mut patterns: Vec<PatternKey> = Vec::new();
    let mut comp_id = 0;
    for start in 0..m {
        if resolved[start] || neighbor_slots[start].is_empty() || component[start] >= 0 {
            continue;
        }
        // BFS over shared slots.
        let mut members: Vec<u32> = alloc::vec![start as u32];
        component[start] = comp_id;
        let mut head = 0;
        while head < members.len() {
            let u = members[head] as usize;
            head += 1;
            for &s in neighbor_slots[u] {
                for &v in &slot_map[&s] {
                    if component[v as usize] < 0 {
                        component[v as usize] = comp_id;
                        members.push(v);
                    }
                }
            }
        }
        let slot_refs: Vec<&[u16]> =
            members.iter().map(|&u| neighbor_slots[u as usize]).collect();
        patterns.push(pattern_of_slots(&slot_refs));
        comp_id += 1;
    }
    patterns.sort();
    patterns
}

/// Peels a receiver view by successive interference cancellation and
/// reports resolved/unresolved neighbors plus the surviving collision
/// patterns.
pub fn sic_decode(view: &ReceiverView) -> DecodeResult {
    let slots: Vec<&[u16]> =
        view.neighbors.iter().map(|nb| nb.residual_slots.as_slice()).collect();
    let mut scratch = PeelScratch::default();
    peel(view.n as usize, &slots, &mut scratch);
    let mut resolved = Vec::new();
    let mut unresolved = Vec::new();
    for (i, nb) in view.neighbors.iter().enumerate() {
        if scratch.resolved[i] {
            resolved.push(nb.id);
        } else {
            unresolved.push(nb.id);
        }
    }
    resolved.sort_unstable();
    unresolved.sort_unstable();
    let residual = residual_patterns(&slots, &scratch.resolved);
    DecodeResult { resolved, unresolved, residual }
}

/// Brute-force reference decoder: explores *every* order of singleton
/// resolutions by depth-first search over resolved-sets and checks that all
/// orders reach the same fixed point (peeling is confluent). Returns the
/// sorted ids of the maximal resolvable set.
///
/// Limited to 12 neighbors and 20 slots; use [`sic_decode`] beyond that.
pub fn peel_oracle(view: &ReceiverView) -> Result<Vec<u32>, GraphError> {
    let m = view.neighbors.len();
    if m > 12 || view.n > 20 {
        return Err(GraphError::OracleTooLarge);
    }
    let slots: Vec<&[u16]> =
        view.neighbors.iter().map(|nb| nb.residual_slots.as_slice()).collect();

    fn resolvable_now(n: u16, slots: &[&[u16]], mask: u16) -> Vec<usize> {
        // A neighbor is resolvable if some slot holds it alone among
        // unresolved neighbors.
        let mut out = Vec::new();
        for (i, my_slots) in slots.iter().enumerate() {
            if mask & (1 << i) != 0 {
                continue;
            }
            let alone = my_slots.iter().any(|&s| {
                slots
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| mask & (1 << j) == 0 && *j != i)
                    .all(|(_, other)| !other.contains(&s))
            });
            let _ = n;
            if alone {
                out.push(i);
            }
        }
        out
    }

    let mut visited = alloc::collections::BTreeSet::new();
    let mut terminals = alloc::collections::BTreeSet::new();
    let mut stack = alloc::vec![0u16];
    while let Some(mask) = stack.pop() {
        if !visited.insert(mask) {
            continue;
        }
        let candidates = resolvable_now(view.n, &slots, mask);
        if candidates.is_empty() {
            terminals.insert(mask);
            continue;
        }
        for i in candidates {
            stack.push(mask | (1 << i));
        }
    }
    assert_eq!(terminals.len(), 1, "peeling reached different fixed points; not confluent");
    let terminal = terminals.into_iter().next().unwrap();
    let mut resolved: Vec<u32> = (0..m)
        .filter(|&i| terminal & (1 << i) != 0)
        .map(|i| view.neighbors[i].id)
        .collect();
    resolved.sort_unstable();
    Ok(resolved)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn x2() -> DegreeDistribution {
        DegreeDistribution::from_terms(&[(2, 1.0)]).unwrap()
    }

    fn view_from(n: u16, receiver_slots: Vec<u16>, neighbors: Vec<(u32, Vec<u16>)>) -> ReceiverView {
        ReceiverView {
            receiver: u32::MAX,
            n,
            receiver_slots,
            neighbors: neighbors
                .into_iter()
                .map(|(id, residual_slots)| NeighborTx { id, residual_slots })
                .collect(),
        }
    }

    #[test]
    fn single_user_frame_has_two_distinct_slots() {
        let frame = generate_frame(10, 1, &x2(), 5).unwrap();
        assert_eq!(frame.users.len(), 1);
        let slots = &frame.users[0].slots;
        assert_eq!(slots.len(), 2);
        assert!(slots[0] < slots[1]);
        assert!(slots[1] < 10);
        validate_frame(&frame).unwrap();
    }

    #[test]
    fn degree_above_slot_count_is_rejected() {
        let d = DegreeDistribution::from_terms(&[(8, 1.0)]).unwrap();
        assert_eq!(generate_frame(4, 3, &d, 0).unwrap_err(), GraphError::DegreeExceedsSlots);
        assert_eq!(generate_frame(8, 0, &d, 0).unwrap_err(), GraphError::NoUsers);
    }

    #[test]
    fn same_seed_reproduces_the_frame() {
        let d = DegreeDistribution::from_terms(&[(3, 0.86), (8, 0.14)]).unwrap();
        let a = generate_frame(172, 100, &d, 99).unwrap();
        let b = generate_frame(172, 100, &d, 99).unwrap();
        assert_eq!(a, b);
        let c = generate_frame(172, 100, &d, 100).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn replica_total_tracks_mean_degree() {
        let d = DegreeDistribution::from_terms(&[(3, 0.86), (8, 0.14)]).unwrap();
        let mut total = 0u64;
        const FRAMES: u64 = 10_000;
        const M: u32 = 100;
        for seed in 0..FRAMES {
            let frame = generate_frame(400, M, &d, seed).unwrap();
            total += frame.users.iter().map(|u| u.slots.len() as u64).sum::<u64>();
        }
        let mean = total as f64 / FRAMES as f64;
        let expected = 3.70 * M as f64;
        assert!((mean - expected).abs() / expected < 0.01, "mean = {mean}");
    }

    #[test]
    fn receiver_view_erases_own_slots() {
        let frame = FrameInstance {
            n: 4,
            users: vec![
                UserTx { id: 0, slots: vec![0] },
                UserTx { id: 1, slots: vec![0, 2] },
                UserTx { id: 2, slots: vec![0, 1] },
            ],
            seed: 0,
        };
        let view = receiver_view(&frame, 0).unwrap();
        assert_eq!(view.receiver_slots, vec![0]);
        assert_eq!(view.neighbors[0].residual_slots, vec![2]);
        assert_eq!(view.neighbors[1].residual_slots, vec![1]);
        assert_eq!(view.perceived_degree(0), 1);
        let occ = view.slot_occupancy();
        assert!(occ[0].is_empty());
        assert_eq!(occ[1], vec![2]);
        assert_eq!(receiver_view(&frame, 9).unwrap_err(), GraphError::UnknownReceiver);
    }

    #[test]
    fn neighbor_fully_inside_receiver_slots_is_invisible() {
        let frame = FrameInstance {
            n: 6,
            users: vec![
                UserTx { id: 0, slots: vec![1, 4] },
                UserTx { id: 1, slots: vec![1, 4] },
            ],
            seed: 0,
        };
        let view = receiver_view(&frame, 0).unwrap();
        assert_eq!(view.perceived_degree(0), 0);
        let result = sic_decode(&view);
        assert_eq!(result.resolved, Vec::<u32>::new());
        assert_eq!(result.unresolved, vec![1]);
        // No audible replicas: no residual component either.
        assert!(result.residual.is_empty());
    }

    #[test]
    fn chain_peels_completely() {
        // A{0,1}, B{1,2}, C{2,3}: slot 0 singles out A, then 1 -> B, 2 -> C.
        let view = view_from(
            4,
            vec![],
            vec![(10, vec![0, 1]), (11, vec![1, 2]), (12, vec![2, 3])],
        );
        let result = sic_decode(&view);
        assert_eq!(result.resolved, vec![10, 11, 12]);
        assert!(result.unresolved.is_empty());
        assert!(result.residual.is_empty());
        assert_eq!(peel_oracle(&view).unwrap(), vec![10, 11, 12]);
    }

    #[test]
    fn shared_pair_is_unresolvable() {
        let view = view_from(8, vec![], vec![(0, vec![3, 5]), (1, vec![3, 5])]);
        let result = sic_decode(&view);
        assert!(result.resolved.is_empty());
        assert_eq!(result.unresolved, vec![0, 1]);
        assert_eq!(result.residual.len(), 1);
        assert_eq!(
            result.residual[0],
            PatternKey::Exact { degrees: vec![2, 2], cells: vec![0b11, 0b11] }
        );
        assert_eq!(peel_oracle(&view).unwrap(), Vec::<u32>::new());
    }

    #[test]
    fn mixed_frame_splits_into_components() {
        // Same-pair {0,1} plus a resolvable chain {2,3} plus invisible 4.
        let view = view_from(
            10,
            vec![9],
            vec![
                (0, vec![0, 1]),
                (1, vec![0, 1]),
                (2, vec![2, 3]),
                (3, vec![3, 4]),
                (4, vec![]),
            ],
        );
        let result = sic_decode(&view);
        assert_eq!(result.resolved, vec![2, 3]);
        assert_eq!(result.unresolved, vec![0, 1, 4]);
        assert_eq!(result.residual.len(), 1);
        assert_eq!(result.resolved.len() + result.unresolved.len(), view.neighbors.len());
    }

    #[test]
    fn oracle_on_empty_view_and_size_limits() {
        let view = view_from(4, vec![], vec![]);
        assert_eq!(peel_oracle(&view).unwrap(), Vec::<u32>::new());
        let big = view_from(30, vec![], (0..13).map(|i| (i, vec![0, 1])).collect());
        assert_eq!(peel_oracle(&big).unwrap_err(), GraphError::OracleTooLarge);
    }

    #[test]
    fn decoder_matches_oracle_on_random_small_instances() {
        let d = DegreeDistribution::from_terms(&[(1, 0.2), (2, 0.5), (3, 0.3)]).unwrap();
        for seed in 0..1000u64 {
            let n = 4 + (seed % 17) as u16; // 4..20
            let m = 2 + (seed % 11) as u32; // 2..12, plus receiver below
            let frame = generate_frame(n, m.min(12), &d, seed).unwrap();
            let view = receiver_view(&frame, (seed % m.min(12) as u64) as u32).unwrap();
            let result = sic_decode(&view);
            let oracle = peel_oracle(&view).unwrap();
            assert_eq!(result.resolved, oracle, "seed {seed}");
        }
    }

    #[test]
    fn resolution_order_does_not_change_the_fixed_point() {
        // Re-run peeling with randomized stack pops and compare outcomes.
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        use rand_chacha::ChaCha8Rng;

        let d = DegreeDistribution::from_terms(&[(2, 0.6), (3, 0.4)]).unwrap();
        for seed in 0..1000u64 {
            let frame = generate_frame(12, 8, &d, seed).unwrap();
            let view = receiver_view(&frame, 0).unwrap();
            let baseline = sic_decode(&view).resolved;

            let slots: Vec<&[u16]> =
                view.neighbors.iter().map(|nb| nb.residual_slots.as_slice()).collect();
            let mut scratch = PeelScratch::default();
            peel(view.n as usize, &slots, &mut scratch);
            // Randomized variant: shuffle the candidate stack every step.
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xdead_beef);
            let mut counts = alloc::vec![0u32; view.n as usize];
            for s in slots.iter().flat_map(|s| s.iter()) {
                counts[*s as usize] += 1;
            }
            let mut resolved = alloc::vec![false; slots.len()];
            loop {
                let mut singles: Vec<usize> =
                    (0..view.n as usize).filter(|&s| counts[s] == 1).collect();
                if singles.is_empty() {
                    break;
                }
                singles.shuffle(&mut rng);
                let s = singles[0];
                let user = (0..slots.len())
                    .find(|&u| !resolved[u] && slots[u].contains(&(s as u16)))
                    .unwrap();
                resolved[user] = true;
                for &t in slots[user] {
                    counts[t as usize] -= 1;
                }
            }
            let shuffled: Vec<u32> = view
                .neighbors
                .iter()
                .enumerate()
                .filter(|(i, _)| resolved[*i])
                .map(|(_, nb)| nb.id)
                .collect();
            assert_eq!(baseline, shuffled, "seed {seed}");
        }
    }

    #[test]
    fn erasing_more_slots_never_helps() {
        // Compare a view against the same view with extra erasures.
        let d = DegreeDistribution::from_terms(&[(2, 0.5), (3, 0.5)]).unwrap();
        for seed in 0..500u64 {
            let frame = generate_frame(16, 9, &d, seed).unwrap();
            let full = receiver_view(&frame, 0).unwrap();
            // Erase one extra slot beyond the receiver's own.
            let extra = (seed % 16) as u16;
            let reduced = ReceiverView {
                receiver: full.receiver,
                n: full.n,
                receiver_slots: full.receiver_slots.clone(),
                neighbors: full
                    .neighbors
                    .iter()
                    .map(|nb| NeighborTx {
                        id: nb.id,
                        residual_slots: nb
                            .residual_slots
                            .iter()
                            .copied()
                            .filter(|&s| s != extra)
                            .collect(),
                    })
                    .collect(),
            };
            let more = sic_decode(&full).resolved;
            let fewer = sic_decode(&reduced).resolved;
            for id in &fewer {
                assert!(more.contains(id), "seed {seed}: erasure created a resolution");
            }
        }
    }

    #[test]
    fn resolved_plus_unresolved_is_conserved() {
        let d = DegreeDistribution::from_terms(&[(2, 0.3), (3, 0.7)]).unwrap();
        for seed in 0..200u64 {
            let m = 3 + (seed % 40) as u32;
            let frame = generate_frame(24, m, &d, seed).unwrap();
            let view = receiver_view(&frame, 1.min(m - 1)).unwrap();
            let result = sic_decode(&view);
            assert_eq!(result.resolved.len() + result.unresolved.len(), m as usize - 1);
            // Perceived degree 0 forces unresolved.
            for (i, nb) in view.neighbors.iter().enumerate() {
                if view.perceived_degree(i) == 0 {
                    assert!(result.unresolved.contains(&nb.id));
                }
            }
        }
    }
}
