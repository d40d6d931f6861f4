use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn pathperc(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pathperc")).args(args).arg("--out").arg(out).output().unwrap()
}

fn manifest(out: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn generate_writes_the_requested_topology() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("k");
    assert!(pathperc(&["generate", "--kind", "complete", "--n", "50"], &out).status.success());
    let edges = std::fs::read_to_string(out.join("network.edges")).unwrap();
    assert_eq!(edges.lines().filter(|l| !l.starts_with('#')).count(), 50 * 49 / 2);

    let out = tmp.path().join("sat");
    assert!(pathperc(&["generate", "--kind", "satellite", "--n", "200", "--seed", "2"], &out).status.success());
    let nodes = std::fs::read_to_string(out.join("nodes.csv")).unwrap();
    assert_eq!(nodes.lines().count(), 201);
}

#[test]
fn flags_override_config_file_over_defaults() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.toml");
    std::fs::write(&cfg, "n = 120\nalpha = 3.0\nsteps = 50\nseed = 4\n").unwrap();
    let out = tmp.path().join("out");
    let cfg_arg = cfg.to_str().unwrap();
    let status = pathperc(&["run", "--config", cfg_arg, "--alpha", "5"], &out).status;
    assert!(status.success());
    let m = manifest(&out);
    assert_eq!(m["config"]["n"], 120);
    assert_eq!(m["config"]["alpha"], 5.0);
    assert_eq!(m["config"]["steps"], 50);
    assert_eq!(m["config"]["kind"], "ust");
    assert_eq!(m["command"], "run");
    assert!(m["prng"].as_str().unwrap().starts_with("ChaCha8"));
    let rows = std::fs::read_to_string(out.join("trajectory.csv")).unwrap();
    assert_eq!(rows.lines().next().unwrap(), "replica,step,removed_length,links_added,n_components,s_max,eta");
    assert_eq!(rows.lines().count(), 51);
}

#[test]
fn bad_arguments_exit_with_usage_code() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("x");
    assert_eq!(pathperc(&["solve", "--alpha", "-1"], &out).status.code(), Some(2));
    assert!(!out.join("manifest.json").exists());
    assert_eq!(pathperc(&["steady", "--replicas", "0"], &out).status.code(), Some(2));
    assert_eq!(pathperc(&["run", "--scheme", "teleport"], &out).status.code(), Some(2));
    assert_eq!(pathperc(&["frobnicate"], &out).status.code(), Some(2));

    let cfg = tmp.path().join("bad.toml");
    std::fs::write(&cfg, "nodes = 10\n").unwrap();
    assert_eq!(pathperc(&["run", "--config", cfg.to_str().unwrap()], &out).status.code(), Some(2));
}

#[test]
fn unconverged_solver_exits_with_its_own_code() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("s");
    let o = pathperc(&["solve", "--alpha", "2", "--smax", "300", "--max-iter", "3"], &out);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(manifest(&out)["converged"], false);
    assert!(out.join("vs_theory.csv").exists());
}

#[test]
fn predict_reports_the_closed_form_threshold() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("p");
    assert!(pathperc(&["predict", "--tau", "2.25", "--smax", "1000000"], &out).status.success());
    let m: Value = serde_json::from_str(&std::fs::read_to_string(out.join("moments.json")).unwrap()).unwrap();
    let x = m["alpha_star_asym_over_sqrt_smax"].as_f64().unwrap();
    assert!((x - 0.7837).abs() < 5e-4);
}
