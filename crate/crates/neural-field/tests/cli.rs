//! Black-box checks of the command-line interface: exit codes, JSON output,
//! artifact files, and run-to-run determinism.

use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_neural-field"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary must spawn")
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout must be valid JSON")
}

fn scratch_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("neural-field-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn slp_roots_reports_neumann_lattice() {
    let out = run(&["slp-roots", "--halfwidth", "1.0", "--count", "5"]);
    let v = stdout_json(&out);
    let roots = v["roots"].as_array().expect("roots array");
    assert_eq!(roots.len(), 5);
    // Default rate k = 0: first root rho = i pi / 2.
    let rho = &roots[0]["rho"];
    assert!(rho[0].as_f64().unwrap().abs() < 1e-10);
    assert!((rho[1].as_f64().unwrap() - std::f64::consts::FRAC_PI_2).abs() < 1e-10);
}

#[test]
fn classify_locates_essential_and_resonant_points() {
    let v = stdout_json(&run(&["classify", "--z-re", "-1.0", "--z-im", "0.0"]));
    assert!(
        v["classification"].get("Essential").is_some(),
        "z = -alpha must classify as essential: {v}"
    );
    let v = stdout_json(&run(&["classify", "--z-re", "-2.0", "--z-im", "0.0"]));
    assert!(
        v["classification"].get("Resonant").is_some(),
        "z = -xi must classify as resonant: {v}"
    );
    let v = stdout_json(&run(&["classify", "--z-re", "0.5", "--z-im", "0.0"]));
    assert!(
        v["classification"].get("Resolvent").is_some(),
        "z = 0.5 must classify as resolvent: {v}"
    );
}

#[test]
fn usage_errors_exit_with_code_two() {
    // Unknown subcommand (handled by the argument parser).
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    // Missing config file.
    let out = run(&["--config", "/nonexistent/config.json", "hopf"]);
    assert_eq!(out.status.code(), Some(2));
    // Malformed config JSON, with the parse location reported.
    let dir = scratch_dir("badcfg");
    let path = dir.join("bad.json");
    std::fs::write(&path, "{ \"model\": { \"alpha\": }").unwrap();
    let out = run(&["--config", path.to_str().unwrap(), "hopf"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line"), "parse error must carry a location: {stderr}");
    // Malformed --seed quadruple.
    assert_eq!(run(&["square", "--seed", "1,2,3"]).status.code(), Some(2));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn numerical_failures_exit_with_code_one() {
    // The bundled model has one kernel term, so every square-search seed is
    // rejected and the command reports a numerical failure.
    let out = run(&["square", "--seed", "-1.4,0,0,4"]);
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("no seed converged"),
        "failure reason must be reported: {stderr}"
    );
}

#[test]
fn hopf_output_is_deterministic_and_in_range() {
    let first = run(&["hopf"]);
    let second = run(&["hopf"]);
    assert!(first.status.success());
    assert_eq!(
        first.stdout, second.stdout,
        "identical config must give bit-identical output"
    );
    let v = stdout_json(&first);
    let c_hat = v["c_hat"].as_f64().unwrap();
    assert!((-3.29..=-3.25).contains(&c_hat), "c_hat = {c_hat}");
}

#[test]
fn simulate_writes_probe_csv_and_snapshots() {
    let dir = scratch_dir("sim");
    let out = run(&[
        "--output-dir",
        dir.to_str().unwrap(),
        "simulate",
        "--t-end",
        "5.0",
        "--snapshot-stride",
        "25",
    ]);
    let v = stdout_json(&out);
    assert!(v["probe_files"].as_u64().unwrap() >= 1);
    let csv = std::fs::read_to_string(dir.join("probe_0.csv")).expect("probe CSV written");
    assert!(csv.starts_with("t,V\n"), "CSV header");
    assert!(csv.lines().count() > 10, "time series rows");
    assert!(v["snapshot_files"].as_u64().unwrap() >= 1);
    let field = std::fs::read_to_string(dir.join("snapshot_0000.txt")).expect("snapshot written");
    // Matrix text: the first data row carries the node count then the y nodes.
    let first_data = field
        .lines()
        .find(|l| !l.starts_with('#'))
        .expect("data row");
    let first: Vec<&str> = first_data.split_whitespace().collect();
    assert_eq!(first[0], "8", "leading entry is the per-axis node count");
    assert_eq!(first.len(), 9, "node count followed by the y nodes");
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn resolvent_check_passes_on_bundled_model() {
    let v = stdout_json(&run(&["resolvent-check", "--z-re", "0.5"]));
    assert!(v["in_span_error"].as_f64().unwrap() <= 1e-6);
    let sweep = v["bump_errors"].as_array().unwrap();
    assert_eq!(sweep.len(), 6);
}
