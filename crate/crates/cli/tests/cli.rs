use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rough-metric")).args(args).output().unwrap()
}

fn ok_json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap()
}

fn value(v: &Value) -> f64 {
    v["value"].as_f64().unwrap()
}

#[test]
fn distance_examples() {
    let quotient = ok_json(&["distance", "--family", "limit-quotient", "--p", "0.5,0", "--q", "0.5,1"]);
    assert_eq!(value(&quotient), 0.0);

    let square = ok_json(&[
        "distance", "--family", "shortcut-square", "--index", "4", "--p", "0.5,0.5", "--q", "0.375,0.5",
    ]);
    assert!((value(&square) - 1.0 / 32.0).abs() < 1e-12);
    assert!(square["path"].as_array().unwrap().len() >= 2);

    let middle = ok_json(&[
        "distance", "--family", "dyadic", "--regime", "middle", "--index", "3", "--p", "0.5,0.09375", "--q",
        "0.5,0.15625",
    ]);
    assert!((value(&middle) - 1.0 / 48.0).abs() < 1e-12);
}

#[test]
fn distance_on_exported_metric() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("unit.json");
    let path_str = path.to_str().unwrap();
    assert_eq!(code(&["export", "--family", "limit-euclid", "--out", path_str]), 0);
    let v = ok_json(&["distance", "--metric", path_str, "--p", "0,0", "--q", "1,1"]);
    assert!((value(&v) - 2f64.sqrt()).abs() < 1e-12);
}

#[test]
fn export_to_stdout_round_trips() {
    let v = ok_json(&["export", "--family", "shortcut-rect", "--index", "2"]);
    assert_eq!(v["x_cuts"], serde_json::json!([0.0, 0.25, 0.75, 1.0]));
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["distance", "--family", "nope", "--p", "0,0", "--q", "1,1"]), 2);
    assert_eq!(code(&["distance", "--family", "shortcut-square", "--p", "0,0", "--q", "1,1"]), 2);
    assert_eq!(code(&["distance", "--family", "shortcut-square", "--index", "4", "--p", "0,2", "--q", "1,1"]), 2);
    assert_eq!(code(&["distance", "--family", "shortcut-square", "--index", "999", "--p", "0,0", "--q", "1,1"]), 2);
    assert_eq!(code(&["distance", "--family", "dyadic", "--index", "3", "--p", "0,0", "--q", "1,1"]), 2);
    assert_eq!(code(&["distance", "--metric", "/no/such/file.json", "--p", "0,0", "--q", "1,1"]), 2);
    assert_eq!(
        code(&["distance", "--family", "shortcut-square", "--index", "4", "--p", "0,0", "--q", "1,1", "--tol", "0"]),
        3
    );
    assert_eq!(
        code(&[
            "distance", "--family", "shortcut-square", "--index", "4", "--p", "0,0", "--q", "1,1",
            "--samples-per-edge", "0",
        ]),
        3
    );
    assert_eq!(code(&["witness", "--family", "limit-euclid", "--c", "1", "--direction", "sideways"]), 2);
}

#[test]
fn force_lifts_index_caps() {
    let args = ["distance", "--family", "dyadic-dense", "--index", "13", "--p", "0,0", "--q", "1,0"];
    assert_eq!(code(&args), 2);
    let mut forced = args.to_vec();
    forced.push("--force");
    assert_eq!(code(&forced), 0);
}

fn converge(dir: &Path, stem: &str, extra: &[&str]) -> Output {
    let out = dir.join(stem);
    let mut args = vec!["converge", "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn converge_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let extra = ["--family", "shortcut-rect", "--index", "2,4,8", "--samples", "20", "--seed", "7"];
    let a = converge(dir.path(), "a", &extra);
    let b = converge(dir.path(), "b", &extra);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    let csv_a = fs::read(dir.path().join("a.csv")).unwrap();
    assert_eq!(csv_a, fs::read(dir.path().join("b.csv")).unwrap());
    assert!(String::from_utf8(csv_a).unwrap().starts_with("family,index,pair_id,px,py,qx,qy,d_metric,d_base,gap\n"));

    let summary: Value = serde_json::from_slice(&fs::read(dir.path().join("a.json")).unwrap()).unwrap();
    let stdout: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(summary, stdout);
    assert_eq!(summary["indices"], serde_json::json!([2, 4, 8]));
}

#[test]
fn converge_formats() {
    let dir = tempfile::tempdir().unwrap();
    let extra = ["--family", "shortcut-square", "--index", "2", "--samples", "5", "--format", "csv"];
    assert!(converge(dir.path(), "only.csv", &extra).status.success());
    assert!(dir.path().join("only.csv").exists());
    assert!(!dir.path().join("only.json").exists());
}

#[test]
fn blowup_line_above_one_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let out = converge(
        dir.path(),
        "bl",
        &["--family", "blowup-line", "--alpha", "2", "--index", "2,8,32", "--samples", "30"],
    );
    assert!(out.status.success());
    let summary: Value = serde_json::from_slice(&out.stdout).unwrap();
    for gap in summary["sup_gaps"].as_array().unwrap() {
        assert!(gap.as_f64().unwrap() <= 2e-6);
    }
}

#[test]
fn failed_converge_leaves_no_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = converge(dir.path(), "bad", &["--family", "shortcut-square", "--index", "4", "--tol", "0"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(out.stdout.is_empty());
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);

    let out = converge(dir.path(), "none", &["--family", "limit-euclid", "--strategy", "witnesses"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 0);

    let missing = dir.path().join("no-such-dir").join("x");
    let out = run(&["converge", "--family", "shortcut-square", "--index", "2", "--samples", "3", "--out", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
}

#[test]
fn witness_examples() {
    let dense = ok_json(&[
        "witness", "--family", "dyadic-dense", "--index", "3", "--c", "0.6666666666666666", "--direction", "lower",
    ]);
    assert!(dense["d_metric"].as_f64().unwrap() < dense["c"].as_f64().unwrap() * dense["d_base"].as_f64().unwrap());

    let middle = ok_json(&["witness", "--family", "dyadic", "--regime", "middle", "--index", "3", "--c", "0.5", "--direction", "lower"]);
    assert!((middle["d_metric"].as_f64().unwrap() - 1.0 / 48.0).abs() < 1e-12);
    assert_eq!(middle["index"], 3);

    let out = run(&["witness", "--family", "limit-euclid", "--c", "1", "--direction", "lower", "--samples", "20"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap().trim(), "none");
}

#[test]
fn config_file_and_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    fs::write(&cfg, "family = \"shortcut-square\"\nindex = 4\n\n[solver]\ntolerance = 0.0\n").unwrap();
    let cfg = cfg.to_str().unwrap();

    // The file's invalid tolerance is used unless a flag overrides it.
    assert_eq!(code(&["--config", cfg, "distance", "--p", "0.5,0.5", "--q", "0.375,0.5"]), 3);
    let v = ok_json(&["--config", cfg, "distance", "--p", "0.5,0.5", "--q", "0.375,0.5", "--tol", "1e-6"]);
    assert!((value(&v) - 1.0 / 32.0).abs() < 1e-12);

    // Flags beat the file's family and index.
    let v = ok_json(&[
        "--config", cfg, "distance", "--family", "limit-quotient", "--p", "0.5,0", "--q", "0.5,1", "--tol", "1e-6",
    ]);
    assert_eq!(value(&v), 0.0);

    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "famly = \"x\"\n").unwrap();
    assert_eq!(code(&["--config", bad.to_str().unwrap(), "export", "--family", "limit-euclid"]), 2);
}

#[test]
fn thread_override() {
    let out = Command::new(env!("CARGO_BIN_EXE_rough-metric"))
        .args(["export", "--family", "limit-euclid"])
        .env("ROUGH_METRIC_THREADS", "lots")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_rough-metric"))
        .args(["export", "--family", "limit-euclid"])
        .env("ROUGH_METRIC_THREADS", "1")
        .output()
        .unwrap();
    assert!(out.status.success());
}
