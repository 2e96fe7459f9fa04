//! Monte-Carlo packet-loss estimation.
//!
//! Trials are grouped into fixed-size chunks, each driven by its own
//! counter-derived RNG stream, so results are bit-identical regardless of
//! how chunks are scheduled across threads: tallies are exact integer sums.
//! A doubling schedule keeps running until enough loss events accumulate or
//! the trial cap is reached, with stop decisions evaluated only at stage
//! boundaries (again for scheduling independence).

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::dist::DegreeDistribution;
use crate::graph::{peel, residual_patterns, sample_distinct_slots, PeelScratch};
use crate::math;
use crate::pattern::PatternKey;

/// How the receiving user's own transmission degree is chosen per trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReceiverDegree {
    /// Drawn from the same degree distribution as everyone else.
    Sampled,
    /// Pinned to a fixed degree (used to condition on one erasure depth).
    Forced(u16),
}

/// One simulated operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct BcsaScenario {
    /// Slots per frame.
    pub n: u16,
    /// Users per frame, including the receiver. PLR is per neighbor, so at
    /// least 2.
    pub m: u32,
    /// Degree distribution all users draw from.
    pub dist: DegreeDistribution,
    /// Receiver-degree mode.
    pub receiver: ReceiverDegree,
}

impl BcsaScenario {
    /// Checks the scenario's parameters for consistency.
    pub fn validate(&self) -> Result<(), SimError> {
        if self.m < 2 {
            return Err(SimError::TooFewUsers);
        }
        let forced = match self.receiver {
            ReceiverDegree::Forced(k) => k,
            ReceiverDegree::Sampled => 0,
        };
        if self.dist.max_degree() > self.n || forced > self.n {
            return Err(SimError::DegreeExceedsSlots);
        }
        Ok(())
    }

    /// Highest receiver degree this scenario can produce.
    fn max_receiver_degree(&self) -> u16 {
        match self.receiver {
            ReceiverDegree::Sampled => self.dist.max_degree(),
            ReceiverDegree::Forced(k) => k,
        }
    }
}

/// Simulation stopping rules.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    /// Keep doubling until at least this many lost packets are observed...
    pub min_error_events: u64,
    /// ...or this many trials have run (rounded down to whole chunks).
    pub max_trials: u64,
    /// Trials per RNG chunk. Fixed across thread counts.
    pub chunk_trials: u64,
    /// Trials in the first stage; each stage doubles the total.
    pub initial_trials: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            min_error_events: 50,
            max_trials: 10_000_000,
            chunk_trials: 4096,
            initial_trials: 8192,
        }
    }
}

impl Budget {
    /// Checks the budget's fields for consistency.
    pub fn validate(&self) -> Result<(), SimError> {
        if self.chunk_trials == 0
            || self.initial_trials < self.chunk_trials
            || self.max_trials < self.initial_trials
        {
            return Err(SimError::BadBudget);
        }
        Ok(())
    }

    /// Total chunks the budget allows.
    pub fn max_chunks(&self) -> u32 {
        (self.max_trials / self.chunk_trials) as u32
    }
}

/// Errors from scenario or budget validation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SimError {
    /// Loss is measured per neighbor; need m >= 2.
    TooFewUsers,
    /// A degree (user or forced receiver) exceeds the slot count.
    DegreeExceedsSlots,
    /// Budget fields are inconsistent (zero chunk, cap below first stage).
    BadBudget,
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::TooFewUsers => write!(f, "need at least 2 users"),
            SimError::DegreeExceedsSlots => write!(f, "degree exceeds slot count"),
            SimError::BadBudget => write!(f, "inconsistent budget"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for SimError {}

/// Exact integer tallies from one or more chunks. Merging is commutative
/// and associative, so any chunk-to-thread assignment yields identical
/// totals.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ChunkTally {
    /// Trials run.
    pub trials: u64,
    /// Neighbors left unresolved, summed over trials.
    pub unresolved: u64,
    /// Per receiver degree `k`: (trials with that degree, unresolved there).
    pub per_k: Vec<(u64, u64)>,
}

impl ChunkTally {
    /// Folds another tally into this one.
    pub fn merge(&mut self, other: &ChunkTally) {
        self.trials += other.trials;
        self.unresolved += other.unresolved;
        if self.per_k.len() < other.per_k.len() {
            self.per_k.resize(other.per_k.len(), (0, 0));
        }
        for (mine, theirs) in self.per_k.iter_mut().zip(&other.per_k) {
            mine.0 += theirs.0;
            mine.1 += theirs.1;
        }
    }
}

/// Loss estimate for one operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct PlrEstimate {
    /// Fraction of neighbor packets lost.
    pub plr: f64,
    /// Wilson 95% interval on `plr`.
    pub ci95: (f64, f64),
    /// Trials run.
    pub trials: u64,
    /// Total lost packets observed (the stopping-rule events).
    pub error_events: u64,
    /// Mean unresolved neighbors per trial.
    pub unresolved_mean: f64,
    /// Breakdown by realized receiver degree.
    pub per_receiver_degree: Vec<DegreeBreakdown>,
}

/// Loss figures conditioned on one receiver degree.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeBreakdown {
    /// Receiver degree.
    pub k: u16,
    /// Trials where the receiver had this degree.
    pub trials: u64,
    /// Lost packets in those trials.
    pub unresolved: u64,
    /// Conditional loss rate.
    pub plr: f64,
    /// Wilson 95% interval on the conditional rate.
    pub ci95: (f64, f64),
}

/// Reusable per-trial buffers.
#[derive(Default)]
struct TrialBuffers {
    receiver_slots: Vec<u16>,
    neighbor_slots: Vec<Vec<u16>>,
    scratch: PeelScratch,
}

/// Runs one trial; returns (receiver degree, unresolved count). When
/// `harvest` is set and something is unresolved, the surviving component
/// patterns are tallied into it.
fn run_trial(
    scenario: &BcsaScenario,
    rng: &mut ChaCha8Rng,
    buf: &mut TrialBuffers,
    harvest: Option<&mut BTreeMap<PatternKey, u64>>,
) -> (u16, u32) {
    let n = scenario.n;
    let k = match scenario.receiver {
        ReceiverDegree::Sampled => scenario.dist.sample(rng),
        ReceiverDegree::Forced(k) => k,
    };
    sample_distinct_slots(rng, k, n, &mut buf.receiver_slots);

    let neighbors = (scenario.m - 1) as usize;
    if buf.neighbor_slots.len() < neighbors {
        buf.neighbor_slots.resize(neighbors, Vec::new());
    }
    for slots in &mut buf.neighbor_slots[..neighbors] {
        let degree = scenario.dist.sample(rng);
        sample_distinct_slots(rng, degree, n, slots);
        slots.retain(|s| buf.receiver_slots.binary_search(s).is_err());
    }
    let refs: Vec<&[u16]> =
        buf.neighbor_slots[..neighbors].iter().map(|v| v.as_slice()).collect();
    peel(n as usize, &refs, &mut buf.scratch);
    let resolved = buf.scratch.resolved.iter().filter(|&&r| r).count();
    let unresolved = (neighbors - resolved) as u32;
    if unresolved > 0 {
        if let Some(counts) = harvest {
            for pattern in residual_patterns(&refs, &buf.scratch.resolved) {
                *counts.entry(pattern).or_insert(0) += 1;
            }
        }
    }
    (k, unresolved)
}

/// Runs one chunk of trials on its own RNG stream and returns its tallies.
///
/// The stream id packs `(point_index << 32) | chunk_index`, so every
/// (point, chunk) pair is an independent, reproducible stream of the master
/// seed.
pub fn run_chunk(
    scenario: &BcsaScenario,
    seed: u64,
    point_index: u32,
    chunk_index: u32,
    trials: u64,
) -> Result<ChunkTally, SimError> {
    scenario.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((point_index as u64) << 32) | chunk_index as u64);
    let mut buf = TrialBuffers::default();
    let mut tally = ChunkTally {
        trials: 0,
        unresolved: 0,
        per_k: alloc::vec![(0, 0); scenario.max_receiver_degree() as usize + 1],
    };
    for _ in 0..trials {
        let (k, unresolved) = run_trial(scenario, &mut rng, &mut buf, None);
        tally.trials += 1;
        tally.unresolved += unresolved as u64;
        tally.per_k[k as usize].0 += 1;
        tally.per_k[k as usize].1 += unresolved as u64;
    }
    Ok(tally)
}

/// Stage boundaries of the doubling schedule, expressed in chunks. Stage
/// `s` ends after `min(initial * 2^s, max) / chunk` whole chunks.
pub fn stage_chunk_targets(budget: &Budget) -> Vec<u32> {
    let mut targets = Vec::new();
    let mut total = budget.initial_trials;
    loop {
        let capped = total.min(budget.max_trials);
        let chunks = ((capped / budget.chunk_trials) as u32).max(1);
        if targets.last() != Some(&chunks) {
            targets.push(chunks);
        }
        if capped == budget.max_trials {
            return targets;
        }
        total *= 2;
    }
}

/// Converts accumulated tallies into a [`PlrEstimate`].
pub fn estimate_from_tally(scenario: &BcsaScenario, tally: &ChunkTally) -> PlrEstimate {
    let neighbors = (scenario.m - 1) as u64;
    let packets = tally.trials * neighbors;
    let plr = if packets == 0 { 0.0 } else { tally.unresolved as f64 / packets as f64 };
    let per_receiver_degree = tally
        .per_k
        .iter()
        .enumerate()
        .filter(|(_, &(t, _))| t > 0)
        .map(|(k, &(trials, unresolved))| {
            let pk = unresolved as f64 / (trials * neighbors) as f64;
            DegreeBreakdown {
                k: k as u16,
                trials,
                unresolved,
                plr: pk,
                ci95: math::wilson_ci95(unresolved, trials * neighbors),
            }
        })
        .collect();
    PlrEstimate {
        plr,
        ci95: math::wilson_ci95(tally.unresolved, packets),
        trials: tally.trials,
        error_events: tally.unresolved,
        unresolved_mean: if tally.trials == 0 {
            0.0
        } else {
            tally.unresolved as f64 / tally.trials as f64
        },
        per_receiver_degree,
    }
}

/// Estimates the loss rate of one scenario under the budget's doubling
/// schedule (sequential reference implementation; parallel drivers get the
/// same numbers by running the same chunks and merging).
pub fn run_bcsa(
    scenario: &BcsaScenario,
    budget: &Budget,
    seed: u64,
    point_index: u32,
) -> Result<PlrEstimate, SimError> {
    scenario.validate()?;
    budget.validate()?;
    let mut tally = ChunkTally::default();
    let mut next_chunk: u32 = 0;
    for target in stage_chunk_targets(budget) {
        while next_chunk < target {
            let chunk =
                run_chunk(scenario, seed, point_index, next_chunk, budget.chunk_trials)?;
            tally.merge(&chunk);
            next_chunk += 1;
        }
        if tally.unresolved >= budget.min_error_events {
            break;
        }
    }
    Ok(estimate_from_tally(scenario, &tally))
}

/// Runs a load sweep: one point per entry of `user_counts`, each with its
/// own stream range (`point_index` = position), so single points can be
/// reproduced in isolation.
pub fn run_bcsa_sweep(
    n: u16,
    dist: &DegreeDistribution,
    receiver: ReceiverDegree,
    user_counts: &[u32],
    budget: &Budget,
    seed: u64,
) -> Result<Vec<PlrEstimate>, SimError> {
    user_counts
        .iter()
        .enumerate()
        .map(|(point, &m)| {
            let scenario = BcsaScenario { n, m, dist: dist.clone(), receiver };
            run_bcsa(&scenario, budget, seed, point as u32)
        })
        .collect()
}

/// Pattern census of decoding failures.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HarvestReport {
    /// Trials run.
    pub trials: u64,
    /// How often each canonical residual-component pattern survived.
    pub counts: BTreeMap<PatternKey, u64>,
}

/// Runs `trials` trials and tallies the canonical patterns of every
/// surviving collision component — the empirical counterpart of the
/// analytic per-class occurrence counts.
pub fn harvest_stopping_sets(
    scenario: &BcsaScenario,
    trials: u64,
    seed: u64,
) -> Result<HarvestReport, SimError> {
    scenario.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut buf = TrialBuffers::default();
    let mut counts = BTreeMap::new();
    for _ in 0..trials {
        run_trial(scenario, &mut rng, &mut buf, Some(&mut counts));
    }
    Ok(HarvestReport { trials, counts })
}
