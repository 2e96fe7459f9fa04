//! End-to-end behavior of the `bcsa` binary: exit codes, output formats,
//! and config handling as a user sees them.

use std::io::Write;
use std::process::{Command, Output};

fn bcsa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bcsa"))
        .args(args)
        .output()
        .expect("binary must spawn")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is UTF-8")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is UTF-8")
}

#[test]
fn timing_table_prints_slot_and_frame_figures() {
    let out = bcsa(&["run", "--config", "slot_timing"]);
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    let text = stdout_of(&out);
    assert!(text.contains("timing: 200 312 317 315"), "got: {text}");
    assert!(text.contains("timing: 400 576 581 172"), "got: {text}");
}

#[test]
fn malformed_config_fails_with_diagnostic() {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    file.write_all(b"this is [[[ not toml").unwrap();
    let path = file.path().to_str().unwrap().to_string();
    let out = bcsa(&["run", "--config", &path]);
    assert!(!out.status.success());
    assert!(stderr_of(&out).contains("malformed config"));
}

#[test]
fn unknown_config_name_lists_bundled_ones() {
    let out = bcsa(&["run", "--config", "definitely_not_here"]);
    assert!(!out.status.success());
    let err = stderr_of(&out);
    assert!(err.contains("load_sweep_n172"), "got: {err}");
}

#[test]
fn catalog_emits_csv_of_pattern_classes() {
    let out = bcsa(&["catalog"]);
    assert!(out.status.success());
    let text = stdout_of(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("users,degrees,distinct_slots,labelings"));
    assert!(text.contains("2+2"), "two-user degree-2 classes must appear");
    assert!(lines.count() >= 10, "catalog should hold many classes");
}

#[test]
fn verify_passing_criterion_exits_zero() {
    let out = bcsa(&["verify", "--criteria", "8"]);
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    let text = stdout_of(&out);
    assert!(text.contains("criterion 8: PASS"), "got: {text}");
    assert!(text.contains("verify: 1/1 criteria passed"), "got: {text}");
}

#[test]
fn collapsed_tolerance_forces_failure_and_nonzero_exit() {
    let out = bcsa(&["verify", "--criteria", "8", "--tol-scale", "0"]);
    assert!(!out.status.success());
    assert!(stdout_of(&out).contains("criterion 8: FAIL"));
}

#[test]
fn verify_report_is_reproducible() {
    let a = bcsa(&["verify", "--criteria", "1"]);
    let b = bcsa(&["verify", "--criteria", "1"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn unknown_criterion_id_is_rejected() {
    let out = bcsa(&["verify", "--criteria", "17"]);
    assert!(!out.status.success());
    assert!(stderr_of(&out).contains("unknown criterion 17"));
}

#[test]
fn run_writes_csv_with_provenance_header() {
    let config = r#"
[experiment]
name = "one-point"
protocol = "bcsa"
seed = 5

[dist]
spec = "x3"

[load]
g = [0.5]

[budget]
min_error_events = 0
max_trials = 2048
chunk_trials = 256
initial_trials = 2048

[bcsa]
n = 50
"#;
    let mut file = tempfile::NamedTempFile::new().unwrap();
    file.write_all(config.as_bytes()).unwrap();
    let cfg_path = file.path().to_str().unwrap().to_string();
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("rows.csv").to_str().unwrap().to_string();

    let out = bcsa(&["run", "--config", &cfg_path, "--out", &out_path, "--seed", "7"]);
    assert!(out.status.success(), "stderr: {}", stderr_of(&out));
    // One aggregate row plus one row conditioned on the receiver degree.
    assert!(stdout_of(&out).contains("wrote 2 rows"));

    let csv = std::fs::read_to_string(&out_path).unwrap();
    assert!(csv.starts_with("# tool: bcsa "), "got: {csv}");
    assert!(csv.contains("# seed: 7"));
    assert!(csv.contains("protocol,n,m,g,dist,receiver_k,trials"));
    assert!(csv.contains("bcsa,50,25,0.5,1x3,-1,2048,"), "row body expected, got: {csv}");
}
