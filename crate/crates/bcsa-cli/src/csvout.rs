//! The result table: one fixed CSV schema shared by every pipeline, plus a
//! comment header tying each file to its tool version, config text, and seed.
//!
//! Rows are sorted by (protocol, load, receiver degree) so repeated runs of
//! one config — at any worker count — produce byte-identical files.

use std::cmp::Ordering;
use std::fmt::Write;

/// Column names, in emission order.
pub const CSV_HEADER: &str =
    "protocol,n,m,g,dist,receiver_k,trials,unresolved_mean,plr,ci95_lo,ci95_hi,seed";

/// One result row. Analytic rows carry `trials = 0` and a degenerate
/// interval; rows not conditioned on a receiver degree carry
/// `receiver_k = -1`.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    /// Pipeline that produced the row.
    pub protocol: &'static str,
    /// Slots per frame (the load-equivalent slot count for unslotted rows).
    pub n: u32,
    /// Users, receiver included.
    pub m: u32,
    /// Channel load, users per slot.
    pub g: f64,
    /// Degree distribution in polynomial text form, `-` where not
    /// applicable.
    pub dist: String,
    /// Receiver degree the row conditions on; -1 = unconditioned.
    pub receiver_k: i32,
    /// Monte-Carlo trials behind the row; 0 for analytic rows.
    pub trials: u64,
    /// Mean unresolved neighbors per trial (expected count for analytic
    /// rows).
    pub unresolved_mean: f64,
    /// Loss probability per neighbor packet.
    pub plr: f64,
    /// 95% interval on `plr`; degenerate for analytic rows.
    pub ci95: (f64, f64),
    /// Master seed of the run.
    pub seed: u64,
}

fn row_order(a: &CsvRow, b: &CsvRow) -> Ordering {
    a.protocol
        .cmp(b.protocol)
        .then(a.g.partial_cmp(&b.g).expect("loads are finite"))
        .then(a.receiver_k.cmp(&b.receiver_k))
}

/// Renders the full CSV document: provenance comments, header line, then
/// the rows sorted into canonical order. Loss columns print with six
/// significant digits in scientific notation.
pub fn render_csv(version: &str, config_hash: &str, seed: u64, rows: &[CsvRow]) -> String {
    let mut sorted: Vec<&CsvRow> = rows.iter().collect();
    sorted.sort_by(|a, b| row_order(a, b));
    let mut out = String::new();
    writeln!(out, "# tool: bcsa {version}").unwrap();
    writeln!(out, "# config: {config_hash}").unwrap();
    writeln!(out, "# seed: {seed}").unwrap();
    writeln!(out, "{CSV_HEADER}").unwrap();
    for r in sorted {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{:.5e},{:.5e},{:.5e},{:.5e},{}",
            r.protocol,
            r.n,
            r.m,
            r.g,
            r.dist,
            r.receiver_k,
            r.trials,
            r.unresolved_mean,
            r.plr,
            r.ci95.0,
            r.ci95.1,
            r.seed,
        )
        .unwrap();
    }
    out
}
