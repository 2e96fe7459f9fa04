//! Pipeline execution: turns a parsed config into result rows and a text
//! summary, running Monte-Carlo chunks in parallel.
//!
//! Parallelism never changes results: every point's chunk schedule is fixed
//! by its budget, each chunk is an independent RNG stream, and chunk tallies
//! are exact integers merged commutatively — so any worker count produces
//! the same estimates, and therefore the same bytes.

use anyhow::{bail, ensure, Context, Result};
use bcsa_core::csma::{self, contention_window, CsmaEstimate, CsmaScenario, CsmaTally};
use bcsa_core::floor::{
    build_catalog, de_threshold, floor_prediction, optimize_distribution, StoppingSetClass,
};
use bcsa_core::sim::{
    self, BcsaScenario, Budget, ChunkTally, PlrEstimate, ReceiverDegree, SimError,
};
use rayon::prelude::*;

use crate::config::{ExperimentConfig, Protocol};
use crate::csvout::CsvRow;

/// Stream-id bases keeping every pipeline's points on disjoint RNG streams
/// of the shared master seed.
const CSMA_POINT_BASE: u32 = 1 << 16;

/// Everything `run` produces besides the exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    /// Result rows (empty for summary-only pipelines).
    pub rows: Vec<CsvRow>,
    /// Human-readable account of what ran, one line per item.
    pub summary: String,
}

/// Whether a finished point satisfied its budget's stopping rule. A budget
/// with `min_error_events` of 0 or `u64::MAX` asks for a fixed trial count,
/// so exhausting it is the intended outcome rather than an error.
fn check_budget(events: u64, budget: &Budget, what: &str) -> Result<()> {
    if budget.min_error_events > 0
        && budget.min_error_events != u64::MAX
        && events < budget.min_error_events
    {
        bail!(
            "budget exhausted at {what}: {events} loss events observed, \
             {} required; raise max_trials or relax min_error_events",
            budget.min_error_events
        );
    }
    Ok(())
}

/// Estimates one coded-access point, running the budget's chunk schedule in
/// parallel stages. Numerically identical to [`sim::run_bcsa`].
pub fn parallel_bcsa_point(
    scenario: &BcsaScenario,
    budget: &Budget,
    seed: u64,
    point_index: u32,
) -> Result<PlrEstimate, SimError> {
    scenario.validate()?;
    budget.validate()?;
    let mut tally = ChunkTally::default();
    let mut next_chunk: u32 = 0;
    for target in sim::stage_chunk_targets(budget) {
        let stage: Vec<ChunkTally> = (next_chunk..target)
            .into_par_iter()
            .map(|chunk| sim::run_chunk(scenario, seed, point_index, chunk, budget.chunk_trials))
            .collect::<Result<_, _>>()?;
        for chunk in &stage {
            tally.merge(chunk);
        }
        next_chunk = target;
        if tally.unresolved >= budget.min_error_events {
            break;
        }
    }
    Ok(sim::estimate_from_tally(scenario, &tally))
}

/// Estimates one carrier-sense point in parallel stages; numerically
/// identical to [`csma::run_csma`].
pub fn parallel_csma_point(
    sc: &CsmaScenario,
    budget: &Budget,
    seed: u64,
    point_index: u32,
) -> Result<CsmaEstimate, SimError> {
    sc.validate()?;
    budget.validate()?;
    let mut tally = CsmaTally::default();
    let mut next_chunk: u32 = 0;
    for target in sim::stage_chunk_targets(budget) {
        let stage: Vec<CsmaTally> = (next_chunk..target)
            .into_par_iter()
            .map(|chunk| {
                csma::run_csma_chunk(sc, seed, point_index, chunk, budget.chunk_trials)
            })
            .collect::<Result<_, _>>()?;
        for chunk in &stage {
            tally.merge(chunk);
        }
        next_chunk = target;
        if tally.lost >= budget.min_error_events {
            break;
        }
    }
    Ok(csma::estimate_from_tally(sc, &tally))
}

fn bcsa_receiver(cfg: &ExperimentConfig) -> Result<ReceiverDegree> {
    match cfg.bcsa.receiver_k {
        -1 => Ok(ReceiverDegree::Sampled),
        k if k >= 0 && k <= u16::MAX as i32 => Ok(ReceiverDegree::Forced(k as u16)),
        k => bail!("receiver_k = {k} is neither -1 (sampled) nor a degree"),
    }
}

fn bcsa_rows(cfg: &ExperimentConfig, seed: u64) -> Result<Vec<CsvRow>> {
    let n = cfg.effective_n()?;
    let dist = cfg.parsed_dist()?;
    let receiver = bcsa_receiver(cfg)?;
    let budget = cfg.budget.budget();
    let grid = cfg.g_grid()?;
    let user_counts = cfg.user_counts(n)?;

    let mut rows = Vec::new();
    for (point, (&g, &m)) in grid.iter().zip(&user_counts).enumerate() {
        let scenario = BcsaScenario { n, m, dist: dist.clone(), receiver };
        let est = parallel_bcsa_point(&scenario, &budget, seed, point as u32)
            .map_err(|e| anyhow::anyhow!("bcsa point g = {g}: {e}"))?;
        check_budget(est.error_events, &budget, &format!("bcsa g = {g}"))?;
        let base = CsvRow {
            protocol: "bcsa",
            n: n.into(),
            m,
            g,
            dist: dist.to_string(),
            receiver_k: cfg.bcsa.receiver_k,
            trials: est.trials,
            unresolved_mean: est.unresolved_mean,
            plr: est.plr,
            ci95: est.ci95,
            seed,
        };
        if matches!(receiver, ReceiverDegree::Sampled) {
            // One unconditioned row plus a row per realized receiver degree.
            for bd in &est.per_receiver_degree {
                rows.push(CsvRow {
                    receiver_k: bd.k.into(),
                    trials: bd.trials,
                    unresolved_mean: bd.unresolved as f64 / bd.trials as f64,
                    plr: bd.plr,
                    ci95: bd.ci95,
                    ..base.clone()
                });
            }
        }
        rows.push(base);
    }
    Ok(rows)
}

fn csma_scenario(cfg: &ExperimentConfig, m: u32) -> Result<CsmaScenario> {
    let payload = cfg
        .phy
        .payload_bytes
        .context("the csma pipeline needs [phy] payload_bytes to size packets")?;
    let phy = cfg.phy.params();
    let t_pack = phy
        .packet_duration_ns(payload)
        .map_err(|e| anyhow::anyhow!("phy timing: {e}"))?;
    ensure!(cfg.csma.u >= 1 && cfg.csma.u <= 31, "backoff exponent u must be in 1..=31");
    Ok(CsmaScenario {
        m,
        t_frame_ns: phy.frame_ns,
        t_pack_ns: t_pack,
        aifs_ns: phy.aifs_ns,
        slot_ns: phy.csma_slot_ns,
        backoff_max: contention_window(cfg.csma.u),
    })
}

fn csma_rows(cfg: &ExperimentConfig, seed: u64) -> Result<Vec<CsvRow>> {
    let n = cfg.effective_n()?;
    let budget = cfg.budget.budget();
    let grid = cfg.g_grid()?;
    let user_counts = cfg.user_counts(n)?;

    let mut rows = Vec::new();
    for (point, (&g, &m)) in grid.iter().zip(&user_counts).enumerate() {
        let sc = csma_scenario(cfg, m)?;
        let est = parallel_csma_point(&sc, &budget, seed, CSMA_POINT_BASE + point as u32)
            .map_err(|e| anyhow::anyhow!("csma point g = {g}: {e}"))?;
        check_budget(est.error_events, &budget, &format!("csma g = {g}"))?;
        rows.push(CsvRow {
            protocol: "csma",
            n: n.into(),
            m,
            g,
            dist: "-".into(),
            receiver_k: -1,
            trials: est.runs,
            unresolved_mean: if est.runs == 0 {
                0.0
            } else {
                est.error_events as f64 / est.runs as f64
            },
            plr: est.plr,
            ci95: est.ci95,
            seed,
        });
    }
    Ok(rows)
}

/// Builds the unresolvable-pattern catalog a config asks for.
pub fn catalog_for(cfg: &ExperimentConfig) -> Vec<StoppingSetClass> {
    build_catalog(cfg.floor.max_users, &cfg.floor.degrees())
}

fn floor_rows(cfg: &ExperimentConfig, seed: u64) -> Result<Vec<CsvRow>> {
    let n = cfg.effective_n()?;
    let dist = cfg.parsed_dist()?;
    let grid = cfg.g_grid()?;
    let user_counts = cfg.user_counts(n)?;
    let catalog = catalog_for(cfg);

    let mut rows = Vec::new();
    for (&g, &m) in grid.iter().zip(&user_counts) {
        let prediction = floor_prediction(&dist, n, m, &catalog)
            .map_err(|e| anyhow::anyhow!("floor point g = {g}: {e}"))?;
        let base = CsvRow {
            protocol: "floor",
            n: n.into(),
            m,
            g,
            dist: dist.to_string(),
            receiver_k: -1,
            trials: 0,
            unresolved_mean: prediction.averaged * (m - 1) as f64,
            plr: prediction.averaged,
            ci95: (prediction.averaged, prediction.averaged),
            seed,
        };
        for term in &prediction.per_k {
            if term.weight == 0.0 {
                continue;
            }
            rows.push(CsvRow {
                receiver_k: term.k.into(),
                unresolved_mean: term.invisible_mean + term.pattern_mean,
                plr: term.plr,
                ci95: (term.plr, term.plr),
                ..base.clone()
            });
        }
        rows.push(base);
    }
    Ok(rows)
}

fn threshold_summary(cfg: &ExperimentConfig) -> Result<String> {
    let dist = cfg.parsed_dist()?;
    let threshold = de_threshold(&dist, cfg.threshold.tol)
        .map_err(|e| anyhow::anyhow!("threshold: {e}"))?;
    Ok(format!(
        "threshold: dist {dist} decodes asymptotically up to g = {threshold:.4} \
         (+-{:.1e})",
        cfg.threshold.tol
    ))
}

fn optimize_summary(cfg: &ExperimentConfig) -> Result<String> {
    let section = cfg
        .optimize
        .as_ref()
        .context("the optimize pipeline needs an [optimize] section")?;
    ensure!(section.g > 0.0, "optimize load must be positive");
    let n = cfg.effective_n()?;
    let catalog = catalog_for(cfg);
    let best = optimize_distribution(n, section.g, &section.degrees, section.resolution, &catalog)
        .map_err(|e| anyhow::anyhow!("optimize: {e}"))?;
    Ok(format!(
        "optimize: n = {n}, g = {}: best dist {} with threshold {:.4} and predicted floor {:.5e}",
        section.g, best.dist, best.threshold, best.predicted_plr
    ))
}

fn timing_summary(cfg: &ExperimentConfig) -> Result<String> {
    let section = cfg
        .timing
        .as_ref()
        .context("the timing pipeline needs a [timing] section")?;
    ensure!(!section.payload_bytes.is_empty(), "timing payload list is empty");
    let phy = cfg.phy.params();
    let mut lines = vec!["timing: payload_bytes t_pack_us t_slot_us slots_per_frame".into()];
    for &bytes in &section.payload_bytes {
        let pack = phy.packet_duration_ns(bytes).map_err(|e| anyhow::anyhow!("timing: {e}"))?;
        let slot = phy.slot_duration_ns(bytes).map_err(|e| anyhow::anyhow!("timing: {e}"))?;
        let n = phy.slot_count(bytes).map_err(|e| anyhow::anyhow!("timing: {e}"))?;
        lines.push(format!(
            "timing: {bytes} {} {} {n}",
            pack as f64 / 1000.0,
            slot as f64 / 1000.0
        ));
    }
    Ok(lines.join("\n"))
}

/// Executes every pipeline the config requests and collects rows and
/// summary lines. `seed_override` substitutes the master seed.
pub fn execute(cfg: &ExperimentConfig, seed_override: Option<u64>) -> Result<RunOutput> {
    let seed = seed_override.unwrap_or(cfg.experiment.seed);
    let mut rows = Vec::new();
    let mut summary = Vec::new();
    for protocol in cfg.experiment.protocol.list() {
        match protocol {
            Protocol::Bcsa => {
                let r = bcsa_rows(cfg, seed)?;
                summary.push(format!("bcsa: {} rows over {} loads", r.len(), cfg.g_grid()?.len()));
                rows.extend(r);
            }
            Protocol::Csma => {
                let r = csma_rows(cfg, seed)?;
                summary.push(format!("csma: {} rows over {} loads", r.len(), cfg.g_grid()?.len()));
                rows.extend(r);
            }
            Protocol::Floor => {
                let r = floor_rows(cfg, seed)?;
                summary
                    .push(format!("floor: {} rows over {} loads", r.len(), cfg.g_grid()?.len()));
                rows.extend(r);
            }
            Protocol::Threshold => summary.push(threshold_summary(cfg)?),
            Protocol::Optimize => summary.push(optimize_summary(cfg)?),
            Protocol::Timing => summary.push(timing_summary(cfg)?),
        }
    }
    Ok(RunOutput { rows, summary: summary.join("\n") })
}

/// Builds a rayon pool with the requested thread count (or rayon's default)
/// and runs `f` inside it.
pub fn with_thread_pool<T>(threads: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T>
where
    T: Send,
{
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = threads {
        ensure!(t >= 1, "thread count must be at least 1");
        builder = builder.num_threads(t);
    }
    let pool = builder.build().context("building thread pool")?;
    Ok(pool.install(f))
}
