use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn sggraph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sggraph"))
        .args(args)
        .env_remove("SGGRAPH_SEED")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn exact_reports_the_two_vertex_marginal() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = sggraph(&["exact", "--beta", "1", "--window", "0,0;1,0", "--out", out]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let summary = read_json(&dir.path().join("summary.json"));
    let marginal = summary["result"]["marginals"][0]["marginal"].as_f64().unwrap();
    assert!((marginal - 0.268941).abs() < 1e-6);
    assert_eq!(summary["config"]["beta"], 1.0);
    assert!(summary["duration_seconds"].is_number());
    let csv = std::fs::read_to_string(dir.path().join("distribution.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# {\"tool\":\"sggraph\",\"version\":"));
    assert_eq!(lines.next(), Some("bitmask,probability,energy"));
    assert_eq!(lines.count(), 2);
}

#[test]
fn malformed_window_is_a_config_error_with_position() {
    let o = sggraph(&["exact", "--beta", "1", "--window", "0:1,0;1"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("position 5"), "{}", stderr(&o));
}

#[test]
fn oversized_window_is_refused() {
    let o = sggraph(&["exact", "--beta", "1", "--window", "0:2,0:2"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("limited to 24"));
}

#[test]
fn missing_beta_and_bad_values_are_config_errors() {
    assert_eq!(code(&sggraph(&["exact", "--window", "0:1,0:1"])), 2);
    assert_eq!(code(&sggraph(&["exact", "--beta", "hot", "--window", "0:1,0:1"])), 2);
    assert_eq!(code(&sggraph(&["exact", "--beta", "1", "--window", "0:1,0:1", "--model", "ising"])), 2);
}

#[test]
fn model_guards_are_refusals() {
    let o = sggraph(&["exact", "--beta", "1", "--window", "0:1,0:1", "--model", "ferrari", "--h0", "0.6", "--h1", "1"]);
    assert_eq!(code(&o), 3);
    assert_eq!(code(&sggraph(&["exact", "--beta", "-1", "--window", "0:1,0:1"])), 3);
}

#[test]
fn perfect_output_is_byte_identical_for_a_fixed_seed() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let c = tempfile::tempdir().unwrap();
    let run = |dir: &Path, seed: &str| {
        let o = sggraph(&[
            "perfect", "--model", "ferrari", "--beta", "6", "--window", "0:2,0:2", "--samples", "300", "--seed", seed,
            "--out", "OUT",
        ]
        .map(|s| if s == "OUT" { dir.to_str().unwrap() } else { s }));
        assert_eq!(code(&o), 0, "{}", stderr(&o));
        std::fs::read(dir.join("samples.ndjson")).unwrap()
    };
    let (x, y, z) = (run(a.path(), "11"), run(b.path(), "11"), run(c.path(), "12"));
    assert_eq!(x, y);
    assert_ne!(x, z);
    let text = String::from_utf8(x).unwrap();
    let first: Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert_eq!(first["header"]["seed"], 11);
    assert_eq!(first["header"]["config"]["model"], "ferrari");
    assert_eq!(text.lines().count(), 301);
    let stats = read_json(&a.path().join("stats.json"));
    assert_eq!(stats["result"]["samples"], 300);
    assert!(stats["result"]["tails"]["space_diameter"].is_array());
}

#[test]
fn seed_falls_back_to_the_environment() {
    let run = |env: Option<&str>, extra: &[&str]| {
        let mut cmd = Command::new(env!("CARGO_BIN_EXE_sggraph"));
        cmd.args(["perfect", "--beta", "3", "--window", "0:1,0:1", "--samples", "50"]).args(extra);
        cmd.env_remove("SGGRAPH_SEED");
        if let Some(v) = env {
            cmd.env("SGGRAPH_SEED", v);
        }
        let o = cmd.output().unwrap();
        assert_eq!(code(&o), 0);
        let v: Value = serde_json::from_slice(&o.stdout).unwrap();
        v["seed"].as_u64().unwrap()
    };
    assert_eq!(run(Some("77"), &[]), 77);
    assert_eq!(run(Some("77"), &["--seed", "5"]), 5);
}

#[test]
fn config_file_values_are_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# bounds run\nmodel = ferrari\nbeta = 6\nk = 3\n").unwrap();
    let o = sggraph(&["bounds", "--config", cfg.to_str().unwrap(), "--beta", "7"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["config"]["beta"], 7.0);
    assert_eq!(v["result"]["m"], -0.6);
    assert_eq!(v["result"]["space_diameter_tail"].as_array().unwrap().len(), 3);
    std::fs::write(&cfg, "temperature = 3\n").unwrap();
    let o = sggraph(&["bounds", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains(":1: unknown key"));
}

#[test]
fn subcritical_perfect_run_names_beta_star() {
    let o = sggraph(&["perfect", "--beta", "1", "--window", "0:1,0:1"]);
    assert_eq!(code(&o), 3);
    let err = stderr(&o);
    assert!(err.contains("beta = 1") && err.contains("beta* = 2.29"), "{err}");
}

#[test]
fn cap_exceeded_exit_code() {
    let o = sggraph(&["perfect", "--beta", "2.5", "--window", "0:9,0:9", "--max-rect", "5"]);
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).contains("max_rectangles"));
}

#[test]
fn bounds_report_beta_star() {
    let o = sggraph(&["bounds", "--beta", "4"]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((v["result"]["beta_star"].as_f64().unwrap() - 2.29243).abs() < 1e-3);
    assert!(v["result"]["mixing"]["values"].as_array().unwrap().len() >= 5);
}

#[test]
fn clt_needs_enough_replicas() {
    let o = sggraph(&["clt", "--beta", "3", "--samples", "10"]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("100 replicas"));
}

#[test]
fn clt_report_on_a_small_window() {
    let o = sggraph(&["clt", "--beta", "3", "--window", "0:4,0:4", "--samples", "100"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let report = &v["result"]["report"];
    assert_eq!(report["replicas"], 100);
    assert!(report["grand_mean"]["ks"]["p_value"].is_number());
    assert!(report["reference"]["mean"].is_number());
}

#[test]
fn forward_trace_is_deterministic_and_dominated() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [a.path(), b.path()] {
        let o = sggraph(&[
            "forward", "--model", "twostar", "--beta", "1", "--window", "0:1,0:1", "--horizon", "200", "--seed", "3",
            "--out", dir.to_str().unwrap(),
        ]);
        assert_eq!(code(&o), 0, "{}", stderr(&o));
    }
    let ta = std::fs::read(a.path().join("trace.csv")).unwrap();
    assert_eq!(ta, std::fs::read(b.path().join("trace.csv")).unwrap());
    assert!(String::from_utf8(ta).unwrap().lines().nth(1) == Some("time,kind,x1,y1,x2,y2,mark,accepted"));
    let report = read_json(&a.path().join("report.json"));
    assert_eq!(report["result"]["dominance_violations"], 0);
    assert!(report["result"]["exact_edge_count"].is_number());
}

#[test]
fn edge_only_frequencies_by_length() {
    let o = sggraph(&["perfect", "--beta", "3", "--window=-3:3,-3:3", "--samples", "20000", "--k", "1"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let n = 20_000.0;
    let mut by_length = std::collections::BTreeMap::<i64, (f64, f64)>::new();
    for e in v["result"]["independent_edges"].as_array().unwrap() {
        let q: Vec<i64> = e["edge"].as_array().unwrap().iter().map(|x| x.as_i64().unwrap()).collect();
        let l = (q[0] - q[2]).abs() + (q[1] - q[3]).abs();
        let entry = by_length.entry(l).or_default();
        entry.0 += e["empirical"].as_f64().unwrap() * n;
        entry.1 += e["exact"].as_f64().unwrap() * n;
    }
    // lengths with a usable normal approximation
    for (l, (observed, expected)) in by_length.into_iter().filter(|(_, (_, e))| *e > 20.0) {
        let z = (observed - expected) / expected.sqrt();
        assert!(z.abs() < 3.0, "length {l}: {observed} vs {expected}");
    }
}

#[test]
fn validate_subset_passes() {
    let o = sggraph(&["validate", "--only", "4,7", "--format", "text"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 2);
}

#[test]
fn validate_signals_failures_with_exit_code_5() {
    let o = sggraph(&["validate", "--only", "2", "--format", "text"]);
    assert_eq!(code(&o), 5);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().next().unwrap().starts_with("FAIL [2]"));
    assert_eq!(code(&sggraph(&["validate", "--only", "12"])), 2);
}
