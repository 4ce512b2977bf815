use serde_json::Value;
use std::path::PathBuf;
use std::process::{Command, Output};

fn configs() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn config(name: &str) -> String {
    configs().join(name).to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mpoints"))
        .args(args)
        .output()
        .expect("spawn mpoints")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("mpoints-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn norm_form_invariants() {
    let out = run(&["invariants", &config("normform_qi_m2.json")]);
    assert_eq!(out.status.code(), Some(0));
    let v = &json(&out)["invariants"];
    assert_eq!(v["a"], serde_json::json!({"num": 1, "den": 2}));
    assert_eq!(v["b"], 1);
    assert_eq!(v["alpha"], serde_json::json!({"num": 1, "den": 4}));
    assert_eq!(v["picRank"], 2);
}

#[test]
fn invariant_block_is_deterministic() {
    let a = run(&["invariants", &config("conjugate_lines_campana.json")]);
    let b = run(&["invariants", &config("conjugate_lines_campana.json")]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn unknown_divisor_index_is_a_config_error() {
    let text = std::fs::read_to_string(config("integral_p1.json"))
        .unwrap()
        .replace("\"subset\": [0]", "\"subset\": [7]");
    let path = scratch("bad.json");
    std::fs::write(&path, text).unwrap();
    let out = run(&["invariants", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn missing_file_and_bad_json() {
    assert_eq!(
        run(&["invariants", "/nonexistent/x.json"]).status.code(),
        Some(2)
    );
    let path = scratch("garbage.json");
    std::fs::write(&path, "{ not json").unwrap();
    assert_eq!(
        run(&["invariants", path.to_str().unwrap()]).status.code(),
        Some(2)
    );
}

#[test]
fn usage_errors() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["count"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn count_then_fit() {
    let csv = scratch("darmon.csv");
    let out = run(&[
        "count",
        &config("darmon_p1_22.json"),
        "--max-height",
        "65536",
        "--threads",
        "2",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("B,count"));
    assert!(text.lines().last().unwrap().starts_with("65536,"));
    let out = run(&["fit", csv.to_str().unwrap(), "--fix-b", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let a = json(&out)["fit"]["aHat"].as_f64().unwrap();
    assert!((a - 1.0).abs() < 0.05, "aHat = {a}");
    let out = run(&[
        "fit",
        csv.to_str().unwrap(),
        "--fix-a",
        "1",
        "--b-candidates",
        "0,1,2",
    ]);
    assert_eq!(json(&out)["ranking"][0]["bMinus1"], 0);
}

#[test]
fn count_to_stdout_matches_file() {
    let csv = scratch("campana.csv");
    let cfg = config("campana_p1_22.json");
    let a = run(&["count", &cfg, "--max-height", "4096"]);
    run(&[
        "count",
        &cfg,
        "--max-height",
        "4096",
        "--chunks",
        "3",
        "--out",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(
        String::from_utf8(a.stdout).unwrap(),
        std::fs::read_to_string(&csv).unwrap()
    );
}

#[test]
fn verify_passes_and_fails() {
    let cfg = config("campana_p1_22.json");
    let out = run(&["verify", &cfg, "--max-height", "262144"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(json(&out)["verdict"]["pass"], true);
    let out = run(&[
        "verify",
        &config("fermat_222.json"),
        "--max-height",
        "262144",
        "--tol-a",
        "0.0001",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn oracle_agrees_with_count() {
    let cfg = config("weak_p1_three_points.json");
    let out = run(&["oracle", "count", &cfg, "--t", "40"]);
    let brute: u128 = String::from_utf8(out.stdout)
        .unwrap()
        .trim()
        .parse()
        .unwrap();
    let out = run(&["count", &cfg, "--bounds", "40"]);
    let line = String::from_utf8(out.stdout).unwrap();
    let fast: u128 = line
        .lines()
        .nth(1)
        .unwrap()
        .split(',')
        .nth(1)
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(brute, fast);
}

#[test]
fn fixture_round_trip() {
    let cfg = config("darmon_p1_22.json");
    let fx = scratch("darmon.fixture");
    let out = run(&[
        "oracle",
        "fixture",
        &cfg,
        "--t",
        "30",
        "--out",
        fx.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["oracle", "check", fx.to_str().unwrap(), &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&[
        "oracle",
        "check",
        fx.to_str().unwrap(),
        &config("campana_p1_22.json"),
    ]);
    assert_eq!(out.status.code(), Some(3));
}
