//! Command-line driver: runs experiment configs, the regression suite, and
//! the catalog dump.

use anyhow::{bail, ensure, Result};
use clap::{Parser, Subcommand};

use bcsa_cli::config::{self, ExperimentConfig};
use bcsa_cli::csvout::render_csv;
use bcsa_cli::runner::{self, catalog_for};
use bcsa_cli::verify::{self, Tolerances, ALL_CRITERIA};

#[derive(Parser)]
#[command(
    name = "bcsa",
    version,
    about = "Broadcast coded slotted ALOHA: simulation and analysis toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute the pipelines a config describes and emit CSV results.
    Run {
        /// Config file path, or the name of a bundled config.
        #[arg(long)]
        config: String,
        /// CSV output path; overrides the config's own `out`. Without
        /// either, rows go to standard output.
        #[arg(long)]
        out: Option<String>,
        /// Master seed override.
        #[arg(long)]
        seed: Option<u64>,
        /// Worker thread count (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Run the regression suite and print one pass/fail line per criterion.
    Verify {
        /// Comma-separated criterion ids to run (default: all).
        #[arg(long)]
        criteria: Option<String>,
        /// Tolerance scale: 1 is the reference suite, 0 collapses every
        /// window to a point (forced failure).
        #[arg(long, default_value_t = 1.0)]
        tol_scale: f64,
        /// Worker thread count (default: all cores).
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Print the unresolvable-pattern catalog as CSV.
    Catalog {
        /// Config whose [floor] section bounds the catalog (defaults apply
        /// otherwise).
        #[arg(long)]
        config: Option<String>,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run { config, out, seed, threads } => cmd_run(&config, out, seed, threads),
        Command::Verify { criteria, tol_scale, threads } => {
            cmd_verify(criteria.as_deref(), tol_scale, threads)
        }
        Command::Catalog { config } => cmd_catalog(config.as_deref()),
    }
}

/// Writes to stdout, treating a closed pipe (e.g. `bcsa catalog | head`) as
/// a normal early exit instead of a panic.
fn print_all(text: &str) -> Result<()> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => std::process::exit(0),
        r => Ok(r?),
    }
}

fn cmd_run(
    config: &str,
    out: Option<String>,
    seed: Option<u64>,
    threads: Option<usize>,
) -> Result<()> {
    let text = config::load_config_text(config)?;
    let cfg = ExperimentConfig::from_toml(&text)?;
    let hash = config_hash_of(&text);
    let seed_used = seed.unwrap_or(cfg.experiment.seed);
    let output = runner::with_thread_pool(threads, || runner::execute(&cfg, seed))??;

    let mut text = String::new();
    let mut stdout_is_csv = false;
    if !output.rows.is_empty() {
        let csv = render_csv(env!("CARGO_PKG_VERSION"), &hash, seed_used, &output.rows);
        match out.or_else(|| cfg.experiment.out.clone()) {
            Some(path) => {
                std::fs::write(&path, &csv)?;
                text.push_str(&format!("wrote {} rows to {path}\n", output.rows.len()));
            }
            None => {
                text.push_str(&csv);
                stdout_is_csv = true;
            }
        }
    }
    for line in output.summary.lines() {
        // Keep bare-stdout output parseable as CSV by commenting the
        // summary.
        if stdout_is_csv {
            text.push_str("# ");
        }
        text.push_str(line);
        text.push('\n');
    }
    print_all(&text)
}

fn config_hash_of(text: &str) -> String {
    config::config_hash(text)
}

fn cmd_verify(criteria: Option<&str>, tol_scale: f64, threads: Option<usize>) -> Result<()> {
    ensure!(
        tol_scale.is_finite() && tol_scale >= 0.0,
        "tolerance scale must be a finite non-negative number"
    );
    let ids: Vec<u8> = match criteria {
        None => ALL_CRITERIA.to_vec(),
        Some(list) => list
            .split(',')
            .map(|token| {
                token
                    .trim()
                    .parse::<u8>()
                    .map_err(|_| anyhow::anyhow!("bad criterion id {token:?}"))
            })
            .collect::<Result<_>>()?,
    };
    let tol = Tolerances { scale: tol_scale };
    let results = runner::with_thread_pool(threads, || verify::run_all(&tol, &ids))??;
    print_all(&verify::render_report(&results))?;
    let failed = results.iter().filter(|r| !r.pass).count();
    if failed > 0 {
        bail!("{failed} of {} criteria failed", results.len());
    }
    Ok(())
}

fn cmd_catalog(config: Option<&str>) -> Result<()> {
    let floor = match config {
        Some(c) => ExperimentConfig::from_toml(&config::load_config_text(c)?)?.floor,
        None => Default::default(),
    };
    let cfg = ExperimentConfig {
        floor,
        ..minimal_config()
    };
    let mut text = String::from("users,degrees,distinct_slots,labelings\n");
    for class in catalog_for(&cfg) {
        let degrees: Vec<String> = class.degrees.iter().map(|d| d.to_string()).collect();
        text.push_str(&format!(
            "{},{},{},{}\n",
            class.users(),
            degrees.join("+"),
            class.distinct_slots,
            class.labelings
        ));
    }
    print_all(&text)
}

/// A throwaway config value for pipelines that only need one section.
fn minimal_config() -> ExperimentConfig {
    ExperimentConfig::from_toml(
        "[experiment]\nname = \"catalog\"\nprotocol = \"floor\"\nseed = 0\n",
    )
    .expect("static config text parses")
}
