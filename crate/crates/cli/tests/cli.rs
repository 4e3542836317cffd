use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn hedgehog(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hedgehog")).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

#[test]
fn invalid_input_exits_two() {
    for args in [
        &["solve", "--R", "0.9"][..],
        &["solve", "--R", "1"],
        &["solve", "--t", "-1"],
        &["solve", "--nr", "5"],
        &["spectrum", "--R-range", "2:1:3"],
        &["spectrum", "--t-range", "0:1"],
        &["minimize", "--grid", "8x6"],
        &["plot", "--kind", "H"],
        &["plot", "--kind", "map"],
        &["no-such-command"],
    ] {
        let o = hedgehog(args);
        assert_eq!(code(&o), 2, "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
    assert_eq!(code(&hedgehog(&["--help"])), 0);
}

#[test]
fn solve_writes_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("p.csv");
    let js = dir.path().join("p.json");
    let o = hedgehog(&["solve", "--R", "1.5", "--t", "50", "--nr", "1025", "--out", csv.to_str().unwrap(), "--json", js.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert_eq!(v, serde_json::from_str::<Value>(&fs::read_to_string(&js).unwrap()).unwrap());
    assert_eq!(v["bounds"]["passed"], true);
    assert!(v["min_h"].as_f64().unwrap() >= (1.0f64 - 12.0 / 50.0).sqrt());
    let text = fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("r,h,dh,eta,bound_sqrt"));
    assert_eq!(lines.count(), 1025);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    fs::write(&cfg, "# shell\nR = 1.7\nt = 3\nnr = 257\n").unwrap();
    let o = hedgehog(&["--config", cfg.to_str().unwrap(), "solve", "--t", "9"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["config"]["R"], 1.7);
    assert_eq!(v["config"]["t"], 9.0);
    assert_eq!(v["config"]["nr"], 257);

    fs::write(&cfg, "R 1.7\n").unwrap();
    assert_eq!(code(&hedgehog(&["--config", cfg.to_str().unwrap(), "solve"])), 2);
    assert_eq!(code(&hedgehog(&["--config", dir.path().join("missing").to_str().unwrap(), "solve"])), 2);
}

#[test]
fn seeded_minimize_is_reproducible() {
    let run = || {
        let o = hedgehog(&["minimize", "--grid", "8x6x8", "--runs", "2", "--nr", "257", "--seed", "7"]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        o.stdout
    };
    let a = run();
    assert_eq!(a, run());
    let v: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["summary"]["runs"].as_array().unwrap().len(), 2);
    assert_eq!(v["checks"]["gap_within_tolerance"], true);
}

#[test]
fn minimize_snapshot_has_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let snap = dir.path().join("q.csv");
    let o = hedgehog(&["minimize", "--grid", "6x4x8", "--runs", "1", "--nr", "129", "--snapshot", snap.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(fs::read_to_string(&snap).unwrap().lines().count(), 6 * 4 * 8 + 1);
    let meta: Value = serde_json::from_str(&fs::read_to_string(snap.with_extension("json")).unwrap()).unwrap();
    assert_eq!(meta["seed"], 0);
}

#[test]
fn nonconverged_minimize_fails_unless_allowed() {
    let base = ["minimize", "--grid", "8x6x8", "--runs", "1", "--nr", "129", "--max-iter", "2", "--tol", "1e-12"];
    assert_eq!(code(&hedgehog(&base)), 1);
    let mut allowed = base.to_vec();
    allowed.push("--allow-nonconverged");
    assert_eq!(code(&hedgehog(&allowed)), 0);
}

#[test]
fn verify_lemmas_small_run() {
    let o = hedgehog(&["verify-lemmas", "--samples", "5000", "--seed", "3"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert_eq!(v["report"]["all_passed"], true);
    assert_eq!(v["report"]["exact"]["y2_at_one"], "-441133354650/60505388947441");
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.lines().filter(|l| l.starts_with("ok")).count() >= 10);
}

#[test]
fn spectrum_sweep_and_stability_map() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("s.csv");
    let o = hedgehog(&["spectrum", "--R-range", "1.3:1.6:2", "--t-range", "0:10:2", "--nr", "257", "--csv", csv.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    let reports = v["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 4);
    assert!(reports.iter().all(|r| r["verdict"] == "stable"));
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(text.starts_with("R,t,"));

    let svg = dir.path().join("map.svg");
    let o = hedgehog(&["plot", "--kind", "map", "--input", csv.to_str().unwrap(), "--out", svg.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(fs::read_to_string(&svg).unwrap().starts_with("<svg"));
    let o = hedgehog(&["plot", "--kind", "map", "--input", csv.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(!o.stdout.is_empty());

    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "x,y\n1,2\n").unwrap();
    assert_eq!(code(&hedgehog(&["plot", "--kind", "map", "--input", bad.to_str().unwrap()])), 2);
}

#[test]
fn plots_of_g_and_profile() {
    let dir = tempfile::tempdir().unwrap();
    let svg = dir.path().join("g.svg");
    assert_eq!(code(&hedgehog(&["plot", "--kind", "G", "--out", svg.to_str().unwrap()])), 0);
    let text = fs::read_to_string(&svg).unwrap();
    assert!(text.starts_with("<svg") && text.trim_end().ends_with("</svg>"));
    let o = hedgehog(&["plot", "--kind", "profile", "--R", "1.5", "--t", "10", "--format", "ascii"]);
    assert_eq!(code(&o), 0);
    assert!(String::from_utf8_lossy(&o.stdout).lines().count() >= 20);
}

#[test]
fn threshold_table() {
    let o = hedgehog(&["thresholds"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8_lossy(&o.stdout);
    for name in ["R0", "R0_alt", "R_local", "R_star", "tau2"] {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name} missing");
    }
    assert!(text.contains("989 = 43 * 23 exactly: yes"));
    let v = stdout_json(&hedgehog(&["thresholds", "--json"]));
    assert_eq!(v["tau2"]["sqrt_discriminant"], 89);
}
