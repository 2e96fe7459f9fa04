//! Reference regression suite behind the `verify` subcommand.
//!
//! Each criterion measures one observable of the toolkit — derived slot
//! timing, asymptotic decoding thresholds, waterline crossings of the two
//! protocols, loss-floor agreement, oracle equivalences, and the
//! distribution optimizer — and compares it against a frozen expectation
//! window. Every seed is fixed, so a report reruns byte-identically; the
//! only knob is a global tolerance scale, whose zero setting shrinks every
//! window to a point and forces deterministic failures.

use anyhow::{bail, Result};
use bcsa_core::csma::{contention_window, CsmaEstimate, CsmaScenario};
use bcsa_core::floor::{
    beta_exact, build_catalog, de_threshold, floor_prediction, induced_distribution,
    optimize_distribution, StoppingSetClass,
};
use bcsa_core::graph::{
    generate_frame, peel_oracle, receiver_view, sic_decode, NeighborTx, ReceiverView,
};
use bcsa_core::pattern::pattern_of_slots;
use bcsa_core::sim::{BcsaScenario, Budget, PlrEstimate, ReceiverDegree};
use bcsa_core::{DegreeDistribution, PhyParams};
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use crate::runner::{parallel_bcsa_point, parallel_csma_point};

/// Ids of all criteria, in report order.
pub const ALL_CRITERIA: [u8; 9] = [1, 2, 3, 4, 5, 6, 7, 8, 9];

/// Global tolerance scale. 1.0 is the reference suite; 0.0 collapses every
/// window to a point (the deterministic forced-failure path); other values
/// widen or tighten proportionally.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Multiplier on every window half-width.
    pub scale: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { scale: 1.0 }
    }
}

impl Tolerances {
    fn window(&self, center: f64, half: f64) -> (f64, f64) {
        (center - half * self.scale, center + half * self.scale)
    }

    /// Multiplicative agreement factor: `base` at scale 1, 1.0 at scale 0.
    fn factor(&self, base: f64) -> f64 {
        base.powf(self.scale)
    }

    fn sigma_mult(&self) -> f64 {
        3.0 * self.scale
    }

    fn rel(&self, base: f64) -> f64 {
        base * self.scale
    }
}

fn in_window(x: f64, w: (f64, f64)) -> bool {
    w.0 <= x && x <= w.1
}

/// Outcome of one criterion.
#[derive(Debug, Clone, PartialEq)]
pub struct CriterionResult {
    /// Criterion id, 1-based.
    pub id: u8,
    /// Short name for humans.
    pub name: &'static str,
    /// Whether the measurement landed inside the tolerance.
    pub pass: bool,
    /// What was measured, formatted.
    pub measured: String,
    /// The tolerance it was compared against, formatted.
    pub tolerance: String,
}

impl CriterionResult {
    /// The canonical single-line form.
    pub fn line(&self) -> String {
        format!(
            "criterion {}: {} (measured {}, tolerance {})",
            self.id,
            if self.pass { "PASS" } else { "FAIL" },
            self.measured,
            self.tolerance
        )
    }
}

/// Runs one criterion by id.
pub fn run_criterion(id: u8, tol: &Tolerances) -> Result<CriterionResult> {
    match id {
        1 => criterion_1(tol),
        2 => criterion_2(tol),
        3 => criterion_3(tol),
        4 => criterion_4(tol),
        5 => criterion_5(tol),
        6 => criterion_6(tol),
        7 => criterion_7(tol),
        8 => criterion_8(tol),
        9 => criterion_9(tol),
        other => bail!("unknown criterion {other} (valid ids: 1-9)"),
    }
}

/// Runs the given criteria in order.
pub fn run_all(tol: &Tolerances, ids: &[u8]) -> Result<Vec<CriterionResult>> {
    ids.iter().map(|&id| run_criterion(id, tol)).collect()
}

/// One line per criterion plus a summary line.
pub fn render_report(results: &[CriterionResult]) -> String {
    let mut out = String::new();
    for r in results {
        out.push_str(&r.line());
        out.push('\n');
    }
    let passed = results.iter().filter(|r| r.pass).count();
    out.push_str(&format!("verify: {passed}/{} criteria passed\n", results.len()));
    out
}

// ---------------------------------------------------------------------------
// Shared fixtures
// ---------------------------------------------------------------------------

fn dist_a() -> DegreeDistribution {
    "0.86x3+0.14x8".parse().expect("fixture distribution")
}

fn dist_b() -> DegreeDistribution {
    "0.87x3+0.13x8".parse().expect("fixture distribution")
}

fn users_at(g: f64, n: u16) -> u32 {
    (g * n as f64).round() as u32
}

fn reference_catalog() -> Vec<StoppingSetClass> {
    build_catalog(3, &[1, 2, 3, 4])
}

/// Carrier-sense scenario at the reference channel timing.
fn csma_scenario(payload_bytes: u32, u: u32, m: u32) -> Result<CsmaScenario> {
    let phy = PhyParams::default();
    let t_pack = phy
        .packet_duration_ns(payload_bytes)
        .map_err(|e| anyhow::anyhow!("packet timing: {e}"))?;
    Ok(CsmaScenario {
        m,
        t_frame_ns: phy.frame_ns,
        t_pack_ns: t_pack,
        aifs_ns: phy.aifs_ns,
        slot_ns: phy.csma_slot_ns,
        backoff_max: contention_window(u),
    })
}

fn bcsa_point(
    n: u16,
    dist: &DegreeDistribution,
    g: f64,
    budget: &Budget,
    seed: u64,
    point: u32,
) -> Result<PlrEstimate> {
    let scenario = BcsaScenario {
        n,
        m: users_at(g, n),
        dist: dist.clone(),
        receiver: ReceiverDegree::Sampled,
    };
    parallel_bcsa_point(&scenario, budget, seed, point)
        .map_err(|e| anyhow::anyhow!("coded-access point g = {g}: {e}"))
}

fn csma_point(
    payload_bytes: u32,
    u: u32,
    g: f64,
    n_equiv: u16,
    budget: &Budget,
    seed: u64,
    point: u32,
) -> Result<CsmaEstimate> {
    let sc = csma_scenario(payload_bytes, u, users_at(g, n_equiv))?;
    parallel_csma_point(&sc, budget, seed, point)
        .map_err(|e| anyhow::anyhow!("carrier-sense point g = {g}: {e}"))
}

/// Load at which a rising loss curve crosses `target`, log-linearly
/// interpolated between the first adjacent grid pair straddling it.
fn crossing_load(curve: &[(f64, f64)], target: f64) -> Option<f64> {
    for w in curve.windows(2) {
        let (g0, p0) = w[0];
        let (g1, p1) = w[1];
        if p0 > 0.0 && p0 < target && target <= p1 {
            let t = (target.ln() - p0.ln()) / (p1.ln() - p0.ln());
            return Some(g0 + t.clamp(0.0, 1.0) * (g1 - g0));
        }
    }
    None
}

// ---------------------------------------------------------------------------
// Criteria
// ---------------------------------------------------------------------------

/// Derived packet/slot/frame geometry at the reference channel timing.
fn criterion_1(_tol: &Tolerances) -> Result<CriterionResult> {
    let phy = PhyParams::default();
    let mut measured = Vec::new();
    let mut pass = true;
    for (bytes, want_pack, want_slot, want_n) in
        [(200u32, 312_000u64, 317_000u64, 315u32), (400, 576_000, 581_000, 172)]
    {
        let pack = phy.packet_duration_ns(bytes).map_err(|e| anyhow::anyhow!("{e}"))?;
        let slot = phy.slot_duration_ns(bytes).map_err(|e| anyhow::anyhow!("{e}"))?;
        let n = phy.slot_count(bytes).map_err(|e| anyhow::anyhow!("{e}"))?;
        pass &= pack == want_pack && slot == want_slot && n == want_n;
        measured.push(format!("{bytes}B -> {}us/{}us/n={n}", pack / 1000, slot / 1000));
    }
    Ok(CriterionResult {
        id: 1,
        name: "slot timing derivation",
        pass,
        measured: measured.join(", "),
        tolerance: "312/317/315 and 576/581/172, exact".into(),
    })
}

/// Asymptotic decoding thresholds of both reference distributions.
fn criterion_2(tol: &Tolerances) -> Result<CriterionResult> {
    let w = tol.window(0.87, 0.01);
    let ta = de_threshold(&dist_a(), 1e-4).map_err(|e| anyhow::anyhow!("{e}"))?;
    let tb = de_threshold(&dist_b(), 1e-4).map_err(|e| anyhow::anyhow!("{e}"))?;
    Ok(CriterionResult {
        id: 2,
        name: "decoding threshold",
        pass: in_window(ta, w) && in_window(tb, w),
        measured: format!("g* = {ta:.4} and {tb:.4}"),
        tolerance: format!("each in [{:.4}, {:.4}]", w.0, w.1),
    })
}

/// Coded-access loss reaches 1e-3 at the expected loads.
fn criterion_3(tol: &Tolerances) -> Result<CriterionResult> {
    let budget =
        Budget { min_error_events: 200, max_trials: 1 << 19, chunk_trials: 4096, initial_trials: 8192 };
    let cases: [(u16, DegreeDistribution, &[f64], f64, u64); 2] = [
        (172, dist_a(), &[0.60, 0.62, 0.64, 0.66, 0.68, 0.70, 0.72, 0.74], 0.68, 7_031),
        (315, dist_b(), &[0.65, 0.67, 0.69, 0.71, 0.73, 0.75, 0.77, 0.79], 0.73, 7_032),
    ];
    let mut measured = Vec::new();
    let mut windows = Vec::new();
    let mut pass = true;
    for (n, dist, grid, center, seed) in cases {
        let mut curve = Vec::new();
        let mut min_events = u64::MAX;
        for (point, &g) in grid.iter().enumerate() {
            let est = bcsa_point(n, &dist, g, &budget, seed, point as u32)?;
            min_events = min_events.min(est.error_events);
            curve.push((g, est.plr));
        }
        let w = tol.window(center, 0.03);
        let cross = crossing_load(&curve, 1e-3);
        pass &= min_events >= 50 && cross.is_some_and(|c| in_window(c, w));
        measured.push(match cross {
            Some(c) => format!("n={n}: crossing g = {c:.4} (min {min_events} events/point)"),
            None => format!("n={n}: no 1e-3 crossing on grid (min {min_events} events/point)"),
        });
        windows.push(format!("[{:.2}, {:.2}]", w.0, w.1));
    }
    Ok(CriterionResult {
        id: 3,
        name: "coded-access waterline",
        pass,
        measured: measured.join("; "),
        tolerance: format!("{} and {}, >=50 events/point", windows[0], windows[1]),
    })
}

/// Carrier-sense loss reaches 1e-3 at the expected loads.
fn criterion_4(tol: &Tolerances) -> Result<CriterionResult> {
    let budget =
        Budget { min_error_events: 300, max_trials: 1 << 18, chunk_trials: 4096, initial_trials: 8192 };
    let cases: [(u32, u16, &[f64], f64, u64); 2] = [
        (
            400,
            172,
            &[0.25, 0.275, 0.30, 0.325, 0.35, 0.375, 0.40, 0.425, 0.45, 0.475, 0.50],
            0.40,
            7_041,
        ),
        (
            200,
            315,
            &[0.20, 0.225, 0.25, 0.275, 0.30, 0.325, 0.35, 0.375, 0.40, 0.425, 0.45],
            0.35,
            7_042,
        ),
    ];
    let mut measured = Vec::new();
    let mut windows = Vec::new();
    let mut pass = true;
    for (payload, n_equiv, grid, center, seed) in cases {
        let mut curve = Vec::new();
        for (point, &g) in grid.iter().enumerate() {
            let est = csma_point(payload, 11, g, n_equiv, &budget, seed, point as u32)?;
            curve.push((g, est.plr));
        }
        let w = tol.window(center, 0.05);
        let cross = crossing_load(&curve, 1e-3);
        pass &= cross.is_some_and(|c| in_window(c, w));
        measured.push(match cross {
            Some(c) => format!("{n_equiv}-slot equivalent: crossing g = {c:.4}"),
            None => format!("{n_equiv}-slot equivalent: no 1e-3 crossing on grid"),
        });
        windows.push(format!("[{:.2}, {:.2}]", w.0, w.1));
    }
    Ok(CriterionResult {
        id: 4,
        name: "carrier-sense waterline",
        pass,
        measured: measured.join("; "),
        tolerance: format!("{} and {}, window 2047", windows[0], windows[1]),
    })
}

/// The 2047-slot contention window is the sweet spot: no larger loss than
/// its neighbors, no queue drops up to it, drops dominant one step further.
fn criterion_5(_tol: &Tolerances) -> Result<CriterionResult> {
    let budget = Budget {
        min_error_events: 0,
        max_trials: 16_384,
        chunk_trials: 4_096,
        initial_trials: 16_384,
    };
    // Loads sit below the 2047-slot window's queue-drop onset (g ~ 0.65,
    // where countdown stalls can outlast a frame) so the zero-drop claim is
    // structural rather than a sampling accident.
    let loads = [0.55, 0.60];
    let exponents = [10u32, 11, 12, 13];
    let mut pass = true;
    let mut measured = Vec::new();
    let mut point = 0u32;
    for &g in &loads {
        let mut by_u = Vec::new();
        for &u in &exponents {
            let est = csma_point(400, u, g, 172, &budget, 7_050, point)?;
            point += 1;
            by_u.push((u, est));
        }
        let plr = |u: u32| by_u.iter().find(|(x, _)| *x == u).expect("ran above").1.plr;
        let est13 = &by_u.iter().find(|(x, _)| *x == 13).expect("ran above").1;
        let small_drops: u64 =
            by_u.iter().filter(|(u, _)| *u <= 11).map(|(_, e)| e.drops).sum();
        pass &= plr(11) <= plr(10)
            && plr(11) <= plr(12)
            && small_drops == 0
            && est13.drops > est13.collisions;
        measured.push(format!(
            "g={g}: plr(10..13) = [{:.2e}, {:.2e}, {:.2e}, {:.2e}], drops(u<=11) = {small_drops}, u=13 drops/collisions = {}/{}",
            plr(10), plr(11), plr(12), plr(13), est13.drops, est13.collisions
        ));
    }
    Ok(CriterionResult {
        id: 5,
        name: "backoff-window ordering",
        pass,
        measured: measured.join("; "),
        tolerance: "plr(u=11) <= plr(u=10), plr(u=12); zero drops for u<=11; drops > collisions at u=13"
            .into(),
    })
}

/// Analytic loss floor agrees with simulation at low load and improves with
/// frame size; conditional losses order by receiver degree.
fn criterion_6(tol: &Tolerances) -> Result<CriterionResult> {
    let budget = Budget {
        min_error_events: 2_000,
        max_trials: 1 << 23,
        chunk_trials: 4_096,
        initial_trials: 65_536,
    };
    let catalog = reference_catalog();
    let factor = tol.factor(2.0);

    // (n, dist, g, seed) -> prediction/simulation ratio.
    let ratio = |n: u16, dist: &DegreeDistribution, g: f64, seed: u64| -> Result<(f64, PlrEstimate)> {
        let pred = floor_prediction(dist, n, users_at(g, n), &catalog)
            .map_err(|e| anyhow::anyhow!("floor prediction: {e}"))?
            .averaged;
        let est = bcsa_point(n, dist, g, &budget, seed, 0)?;
        Ok((pred / est.plr, est))
    };

    let (r_04, _) = ratio(172, &dist_a(), 0.4, 7_061)?;
    let (r_05, est_05) = ratio(172, &dist_a(), 0.5, 7_062)?;
    let (r_315, _) = ratio(315, &dist_b(), 0.5, 7_063)?;

    let k3 = est_05.per_receiver_degree.iter().find(|b| b.k == 3);
    let k8 = est_05.per_receiver_degree.iter().find(|b| b.k == 8);
    let (k3_hi, k8_lo, ordered) = match (k3, k8) {
        (Some(a), Some(b)) => (a.ci95.1, b.ci95.0, a.ci95.1 < b.ci95.0),
        _ => (f64::NAN, f64::NAN, false),
    };

    let within = |r: f64| r >= 1.0 / factor && r <= factor;
    let improves = r_315.ln().abs() < r_05.ln().abs();
    let pass = within(r_04) && within(r_05) && ordered && improves;
    Ok(CriterionResult {
        id: 6,
        name: "loss-floor agreement",
        pass,
        measured: format!(
            "prediction/simulation = {r_04:.3} (n=172, g=0.4), {r_05:.3} (n=172, g=0.5), {r_315:.3} (n=315, g=0.5); degree-3 ci hi {k3_hi:.3e} vs degree-8 ci lo {k8_lo:.3e}"
        ),
        tolerance: format!(
            "ratios in [{:.3}, {:.3}]; n=315 ratio closer to 1; degree-3 < degree-8 with separated intervals",
            1.0 / factor,
            factor
        ),
    })
}

/// Exhaustive loss of an all-pairs population, via the production decoder.
/// The receiver stays silent, so nothing is erased.
fn exhaustive_pair_plr(m: u32, n: u16) -> f64 {
    let pairs: Vec<[u16; 2]> = (0..n)
        .flat_map(|a| ((a + 1)..n).map(move |b| [a, b]))
        .collect();
    let neighbors = (m - 1) as usize;
    let mut choice = vec![0usize; neighbors];
    let mut total_unresolved = 0u64;
    let mut configs = 0u64;
    loop {
        let view = ReceiverView {
            receiver: u32::MAX,
            n,
            receiver_slots: Vec::new(),
            neighbors: choice
                .iter()
                .enumerate()
                .map(|(j, &c)| NeighborTx { id: j as u32, residual_slots: pairs[c].to_vec() })
                .collect(),
        };
        total_unresolved += sic_decode(&view).unresolved.len() as u64;
        configs += 1;
        // Odometer over all pair choices.
        let mut pos = 0;
        loop {
            if pos == neighbors {
                let denom = (configs * neighbors as u64) as f64;
                return total_unresolved as f64 / denom;
            }
            choice[pos] += 1;
            if choice[pos] < pairs.len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

/// Internal oracle cross-checks: decoder vs brute force, analytic placement
/// probabilities vs Monte Carlo, floor prediction vs exhaustive enumeration,
/// induced-distribution identities.
fn criterion_7(tol: &Tolerances) -> Result<CriterionResult> {
    // (a) Production decoder matches the exhaustive-order reference decoder.
    let families: Vec<DegreeDistribution> = ["x2", "x3", "0.5x2+0.5x3", "0.25x1+0.75x3", "0.1+0.9x3", "0.86x3+0.14x8"]
        .iter()
        .map(|s| s.parse().expect("fixture distribution"))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(7_071);
    let mut mismatches = 0u32;
    for _ in 0..10_000 {
        let dist = &families[rng.gen_range(0..families.len())];
        let n_lo = dist.max_degree().max(4);
        let n = rng.gen_range(n_lo..=20);
        let m = rng.gen_range(2..=12u32);
        let frame = generate_frame(n, m, dist, rng.gen()).map_err(|e| anyhow::anyhow!("{e:?}"))?;
        let view =
            receiver_view(&frame, rng.gen_range(0..m)).map_err(|e| anyhow::anyhow!("{e:?}"))?;
        if sic_decode(&view).resolved != peel_oracle(&view).map_err(|e| anyhow::anyhow!("{e:?}"))? {
            mismatches += 1;
        }
    }

    // (b) Closed-form placement probability of every catalog class vs Monte
    // Carlo at several slot counts.
    let catalog = reference_catalog();
    let trials = 200_000u32;
    let mut rng = ChaCha8Rng::seed_from_u64(7_072);
    let mut worst_sigma = 0.0f64;
    for class in &catalog {
        for n_eff in [8u16, 12, 20] {
            let beta = beta_exact(class, n_eff);
            let mut hits = 0u32;
            let mut slots: Vec<Vec<u16>> = vec![Vec::new(); class.degrees.len()];
            for _ in 0..trials {
                for (u, &d) in class.degrees.iter().enumerate() {
                    slots[u] = rand::seq::index::sample(&mut rng, n_eff as usize, d as usize)
                        .iter()
                        .map(|i| i as u16)
                        .collect();
                }
                let refs: Vec<&[u16]> = slots.iter().map(|s| s.as_slice()).collect();
                if pattern_of_slots(&refs) == class.pattern {
                    hits += 1;
                }
            }
            let p = hits as f64 / trials as f64;
            let sigma = (beta * (1.0 - beta) / trials as f64).sqrt();
            let deviation = if sigma > 0.0 {
                (p - beta).abs() / sigma
            } else if p == beta {
                0.0
            } else {
                f64::INFINITY
            };
            worst_sigma = worst_sigma.max(deviation);
        }
    }

    // (c) Floor prediction vs exhaustive exact loss for tiny all-pairs
    // populations with a silent receiver.
    let x2: DegreeDistribution = "x2".parse().expect("fixture distribution");
    let mut worst_rel = 0.0f64;
    for (m, n) in [(3u32, 4u16), (4, 4), (3, 6), (4, 6), (3, 8), (4, 8)] {
        let exact = exhaustive_pair_plr(m, n);
        let pred = floor_prediction(&x2, n, m, &catalog)
            .map_err(|e| anyhow::anyhow!("floor prediction: {e}"))?
            .term(0)
            .plr;
        worst_rel = worst_rel.max((pred - exact).abs() / exact);
    }

    // (d) Induced-distribution normalization and mean identity across the
    // full slot/erasure range.
    let mut worst_defect = 0.0f64;
    for dist in [dist_a(), dist_b()] {
        let full_mean = dist.mean();
        for n in dist.max_degree()..=500 {
            for k in 0..=n {
                let induced =
                    induced_distribution(&dist, n, k).map_err(|e| anyhow::anyhow!("{e}"))?;
                let sum: f64 = induced.lambda.iter().sum();
                let mean = induced.mean();
                let expected_mean = full_mean * (n - k) as f64 / n as f64;
                worst_defect = worst_defect
                    .max((sum - 1.0).abs())
                    .max((mean - expected_mean).abs());
            }
        }
    }

    let pass = mismatches == 0
        && worst_sigma <= tol.sigma_mult()
        && worst_rel <= tol.rel(0.2)
        && worst_defect <= tol.rel(1e-12);
    Ok(CriterionResult {
        id: 7,
        name: "analytic oracles",
        pass,
        measured: format!(
            "decoder mismatches {mismatches}/10000; placement deviation {worst_sigma:.2} sigma; exhaustive deviation {:.1}%; identity defect {worst_defect:.1e}",
            worst_rel * 100.0
        ),
        tolerance: format!(
            "0 mismatches; <= {:.1} sigma; <= {:.0}%; <= {:.1e}",
            tol.sigma_mult(),
            tol.rel(0.2) * 100.0,
            tol.rel(1e-12)
        ),
    })
}

/// The grid-searched distribution puts the expected weight on degree 3 and
/// none on degree 2, at both frame sizes.
fn criterion_8(tol: &Tolerances) -> Result<CriterionResult> {
    let catalog = reference_catalog();
    let w = tol.window(0.865, 0.015);
    let mut measured = Vec::new();
    let mut pass = true;
    for n in [172u16, 315] {
        let best = optimize_distribution(n, 0.5, &[2, 3, 8], 100, &catalog)
            .map_err(|e| anyhow::anyhow!("optimizer: {e}"))?;
        let l2 = best.dist.lambda(2);
        let l3 = best.dist.lambda(3);
        pass &= in_window(l3, w) && l2 == 0.0;
        measured.push(format!(
            "n={n}: weights {} (threshold {:.4}, floor {:.3e})",
            best.dist, best.threshold, best.predicted_plr
        ));
    }
    Ok(CriterionResult {
        id: 8,
        name: "distribution optimizer",
        pass,
        measured: measured.join("; "),
        tolerance: format!("degree-3 weight in [{:.3}, {:.3}], degree-2 weight 0", w.0, w.1),
    })
}

/// Above the waterline the coded scheme loses to carrier sensing.
fn criterion_9(_tol: &Tolerances) -> Result<CriterionResult> {
    let budget =
        Budget { min_error_events: 200, max_trials: 1 << 17, chunk_trials: 4096, initial_trials: 8192 };
    let grid = [0.72, 0.76, 0.80];
    let dist = dist_a();
    let mut lines = Vec::new();
    let mut pass = false;
    for (i, &g) in grid.iter().enumerate() {
        let coded = bcsa_point(172, &dist, g, &budget, 7_091, i as u32)?;
        let sensed = csma_point(400, 11, g, 172, &budget, 7_092, i as u32)?;
        if coded.plr > sensed.plr {
            pass = true;
        }
        lines.push(format!("g={g}: {:.2e} vs {:.2e}", coded.plr, sensed.plr));
    }
    Ok(CriterionResult {
        id: 9,
        name: "high-load crossover",
        pass,
        measured: lines.join("; "),
        tolerance: "coded loss exceeds carrier-sense loss at some g in [0.70, 0.80]".into(),
    })
}
