//! Experiment configuration: one TOML file describes everything a run needs,
//! so a results file can always be traced back to an exact, hashable setup.
//!
//! The file is organized in sections: `[experiment]` names the run and picks
//! the protocols; `[phy]` overrides channel timing; the remaining sections
//! parameterize individual pipelines and may be omitted when unused.

use std::fmt;
use std::str::FromStr;

use anyhow::{bail, ensure, Context, Result};
use bcsa_core::sim::Budget;
use bcsa_core::{DegreeDistribution, PhyParams};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Pipelines the runner knows how to execute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Protocol {
    /// Monte-Carlo loss sweep of the coded random-access scheme.
    Bcsa,
    /// Monte-Carlo loss sweep of the carrier-sense baseline.
    Csma,
    /// Analytic low-load loss floor over the same grid.
    Floor,
    /// Asymptotic decoding threshold of the degree distribution.
    Threshold,
    /// Grid search for the floor-minimizing degree distribution.
    Optimize,
    /// Derived packet/slot/frame geometry for a list of payload sizes.
    Timing,
}

impl fmt::Display for Protocol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Protocol::Bcsa => "bcsa",
            Protocol::Csma => "csma",
            Protocol::Floor => "floor",
            Protocol::Threshold => "threshold",
            Protocol::Optimize => "optimize",
            Protocol::Timing => "timing",
        };
        f.write_str(s)
    }
}

/// One protocol or several; a single name reads as a bare string.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProtocolSpec {
    /// A single pipeline.
    One(Protocol),
    /// Several pipelines sharing one grid and seed.
    Many(Vec<Protocol>),
}

impl ProtocolSpec {
    /// The requested pipelines in declaration order, de-duplicated.
    pub fn list(&self) -> Vec<Protocol> {
        let raw: Vec<Protocol> = match self {
            ProtocolSpec::One(p) => vec![*p],
            ProtocolSpec::Many(ps) => ps.clone(),
        };
        let mut seen = Vec::new();
        for p in raw {
            if !seen.contains(&p) {
                seen.push(p);
            }
        }
        seen
    }
}

/// `[experiment]`: identity, pipelines, seed, and default output path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    /// Free-form run name (recorded nowhere else; for humans).
    pub name: String,
    /// Which pipelines to execute.
    pub protocol: ProtocolSpec,
    /// Master seed; every stream in the run derives from it.
    pub seed: u64,
    /// Default CSV output path; `--out` overrides.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<String>,
}

/// `[phy]`: channel timing; defaults model the 6 Mbps broadcast channel.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhySection {
    /// Payload data rate, bits per second.
    pub data_rate_bps: u64,
    /// Preamble before each packet, ns.
    pub preamble_ns: u64,
    /// Guard interval after each slot, ns.
    pub guard_ns: u64,
    /// Frame duration, ns.
    pub frame_ns: u64,
    /// Carrier-sense backoff slot, ns.
    pub csma_slot_ns: u64,
    /// Arbitration gap sensed before transmitting, ns.
    pub aifs_ns: u64,
    /// OFDM symbol duration, ns.
    pub ofdm_symbol_ns: u64,
    /// Payload size in bytes; needed by pipelines that derive timing
    /// (csma, timing) and as a cross-check against `[bcsa] n`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub payload_bytes: Option<u32>,
}

impl Default for PhySection {
    fn default() -> Self {
        let p = PhyParams::default();
        PhySection {
            data_rate_bps: p.data_rate_bps,
            preamble_ns: p.preamble_ns,
            guard_ns: p.guard_ns,
            frame_ns: p.frame_ns,
            csma_slot_ns: p.csma_slot_ns,
            aifs_ns: p.aifs_ns,
            ofdm_symbol_ns: p.ofdm_symbol_ns,
            payload_bytes: None,
        }
    }
}

impl PhySection {
    /// The core timing parameter set (payload size travels separately).
    pub fn params(&self) -> PhyParams {
        PhyParams {
            data_rate_bps: self.data_rate_bps,
            preamble_ns: self.preamble_ns,
            guard_ns: self.guard_ns,
            frame_ns: self.frame_ns,
            csma_slot_ns: self.csma_slot_ns,
            aifs_ns: self.aifs_ns,
            ofdm_symbol_ns: self.ofdm_symbol_ns,
        }
    }
}

/// `[dist]`: the degree distribution, in polynomial text form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistSection {
    /// E.g. `"0.86x3+0.14x8"`.
    pub spec: String,
}

/// `[load]`: the channel-load grid, users per slot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadSection {
    /// Strictly increasing positive loads.
    pub g: Vec<f64>,
}

/// `[budget]`: trial budget shared by the Monte-Carlo pipelines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BudgetSection {
    /// Stop a point once this many loss events are in (0 or u64::MAX mean
    /// "run the whole budget").
    pub min_error_events: u64,
    /// Hard trial cap per point.
    pub max_trials: u64,
    /// Trials per deterministic chunk.
    pub chunk_trials: u64,
    /// First-stage trial count; stages double from here.
    pub initial_trials: u64,
}

impl Default for BudgetSection {
    fn default() -> Self {
        let b = Budget::default();
        BudgetSection {
            min_error_events: b.min_error_events,
            max_trials: b.max_trials,
            chunk_trials: b.chunk_trials,
            initial_trials: b.initial_trials,
        }
    }
}

impl BudgetSection {
    /// The core budget value.
    pub fn budget(&self) -> Budget {
        Budget {
            min_error_events: self.min_error_events,
            max_trials: self.max_trials,
            chunk_trials: self.chunk_trials,
            initial_trials: self.initial_trials,
        }
    }
}

fn default_receiver_k() -> i32 {
    -1
}

/// `[bcsa]`: slotted-frame geometry and receiver conditioning.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BcsaSection {
    /// Slots per frame; defaults to the payload-derived count when omitted.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<u16>,
    /// Receiver degree: -1 samples it from the distribution, k >= 0 forces it.
    #[serde(default = "default_receiver_k")]
    pub receiver_k: i32,
}

impl Default for BcsaSection {
    fn default() -> Self {
        BcsaSection { n: None, receiver_k: -1 }
    }
}

fn default_backoff_exponent() -> u32 {
    11
}

/// `[csma]`: contention window selection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsmaSection {
    /// Backoff counters are drawn from {0 .. 2^u - 1}.
    #[serde(default = "default_backoff_exponent")]
    pub u: u32,
}

impl Default for CsmaSection {
    fn default() -> Self {
        CsmaSection { u: default_backoff_exponent() }
    }
}

fn default_floor_max_users() -> u8 {
    3
}

fn default_floor_max_degree() -> u8 {
    4
}

/// `[floor]`: analytic catalog bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FloorSection {
    /// Largest unresolvable-set size enumerated.
    pub max_users: u8,
    /// Largest perceived degree enumerated.
    pub max_degree: u8,
}

impl Default for FloorSection {
    fn default() -> Self {
        FloorSection {
            max_users: default_floor_max_users(),
            max_degree: default_floor_max_degree(),
        }
    }
}

impl FloorSection {
    /// Degrees the catalog enumerates.
    pub fn degrees(&self) -> Vec<u8> {
        (1..=self.max_degree).collect()
    }
}

fn default_threshold_tol() -> f64 {
    1e-3
}

/// `[threshold]`: bisection accuracy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ThresholdSection {
    /// Absolute load tolerance of the reported threshold.
    pub tol: f64,
}

impl Default for ThresholdSection {
    fn default() -> Self {
        ThresholdSection { tol: default_threshold_tol() }
    }
}

fn default_optimize_resolution() -> u32 {
    100
}

/// `[optimize]`: floor-minimizing grid search.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptimizeSection {
    /// Load the floor is minimized at.
    pub g: f64,
    /// Candidate degrees, ascending.
    pub degrees: Vec<u16>,
    /// Weights are multiples of 1/resolution.
    #[serde(default = "default_optimize_resolution")]
    pub resolution: u32,
}

/// `[timing]`: payload sizes for the geometry table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimingSection {
    /// Payload sizes, bytes.
    pub payload_bytes: Vec<u32>,
}

/// A full experiment description; see the module docs for the file layout.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Run identity and pipeline selection.
    pub experiment: ExperimentSection,
    /// Channel timing (defaults apply field-wise).
    #[serde(default)]
    pub phy: PhySection,
    /// Degree distribution, where a pipeline needs one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dist: Option<DistSection>,
    /// Channel-load grid, where a pipeline sweeps one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub load: Option<LoadSection>,
    /// Monte-Carlo budget.
    #[serde(default)]
    pub budget: BudgetSection,
    /// Slotted-frame settings.
    #[serde(default)]
    pub bcsa: BcsaSection,
    /// Carrier-sense settings.
    #[serde(default)]
    pub csma: CsmaSection,
    /// Analytic floor settings.
    #[serde(default)]
    pub floor: FloorSection,
    /// Threshold settings.
    #[serde(default)]
    pub threshold: ThresholdSection,
    /// Optimizer settings, when the optimize pipeline runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimize: Option<OptimizeSection>,
    /// Timing-table settings, when the timing pipeline runs.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub timing: Option<TimingSection>,
}

impl ExperimentConfig {
    /// Parses a TOML document.
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).context("malformed config")?;
        Ok(cfg)
    }

    /// Serializes back to TOML. Parsing the output yields an equal value.
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string_pretty(self).context("config not serializable")
    }

    /// The parsed degree distribution; errors if `[dist]` is missing or bad.
    pub fn parsed_dist(&self) -> Result<DegreeDistribution> {
        let section = self.dist.as_ref().context("config needs a [dist] section")?;
        DegreeDistribution::from_str(&section.spec)
            .map_err(|e| anyhow::anyhow!("bad dist spec {:?}: {e}", section.spec))
    }

    /// The channel-load grid; errors if missing, empty, or not increasing.
    pub fn g_grid(&self) -> Result<&[f64]> {
        let section = self.load.as_ref().context("config needs a [load] section")?;
        ensure!(!section.g.is_empty(), "load grid is empty");
        ensure!(
            section.g.iter().all(|&g| g.is_finite() && g > 0.0),
            "loads must be positive"
        );
        ensure!(
            section.g.windows(2).all(|w| w[0] < w[1]),
            "load grid must be strictly increasing"
        );
        Ok(&section.g)
    }

    /// Slots per frame: `[bcsa] n` when given, else derived from the payload
    /// size. When both are present they must agree, keeping the load axes of
    /// all pipelines comparable.
    pub fn effective_n(&self) -> Result<u16> {
        let derived = match self.phy.payload_bytes {
            Some(bytes) => Some(
                self.phy
                    .params()
                    .slot_count(bytes)
                    .map_err(|e| anyhow::anyhow!("phy timing: {e}"))?,
            ),
            None => None,
        };
        match (self.bcsa.n, derived) {
            (Some(n), Some(d)) => {
                ensure!(
                    u32::from(n) == d,
                    "bcsa.n = {n} disagrees with the payload-derived slot count {d}"
                );
                Ok(n)
            }
            (Some(n), None) => Ok(n),
            (None, Some(d)) => {
                ensure!(d <= u16::MAX as u32, "derived slot count {d} too large");
                Ok(d as u16)
            }
            (None, None) => bail!("need [bcsa] n or [phy] payload_bytes to fix the slot count"),
        }
    }

    /// Users at each grid load: `m = round(g * n)`, at least 2.
    pub fn user_counts(&self, n: u16) -> Result<Vec<u32>> {
        self.g_grid()?
            .iter()
            .map(|&g| {
                let m = (g * n as f64).round() as u32;
                ensure!(m >= 2, "load g = {g} yields m = {m} < 2 users");
                Ok(m)
            })
            .collect()
    }
}

/// First 16 hex characters of the SHA-256 of the config text as loaded —
/// the provenance stamp carried in every CSV header.
pub fn config_hash(text: &str) -> String {
    let digest = Sha256::digest(text.as_bytes());
    let mut out = String::with_capacity(16);
    for byte in &digest[..8] {
        use std::fmt::Write;
        write!(out, "{byte:02x}").expect("writing to a String cannot fail");
    }
    out
}

/// Configs compiled into the binary, addressable by name from `--config`.
pub const BUNDLED: &[(&str, &str)] = &[
    ("load_sweep_n172", include_str!("../configs/load_sweep_n172.toml")),
    ("load_sweep_n315", include_str!("../configs/load_sweep_n315.toml")),
    ("floor_check_n172", include_str!("../configs/floor_check_n172.toml")),
    ("slot_timing", include_str!("../configs/slot_timing.toml")),
];

/// Returns the bundled config text for `name`, if any.
pub fn bundled(name: &str) -> Option<&'static str> {
    BUNDLED.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

/// Loads config text from a file path, falling back to a bundled name.
pub fn load_config_text(path_or_name: &str) -> Result<String> {
    let p = std::path::Path::new(path_or_name);
    if p.exists() {
        return std::fs::read_to_string(p)
            .with_context(|| format!("reading config {path_or_name}"));
    }
    if let Some(text) = bundled(path_or_name) {
        return Ok(text.to_string());
    }
    bail!(
        "config {path_or_name:?} is neither a file nor a bundled name \
         (bundled: {})",
        BUNDLED.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(", ")
    )
}
