use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures/v1").join(name)
}

fn melon(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_melon")).args(args).env_remove("MELON_THREADS").output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn build_then_invariants() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("s4.json");
    let built = melon(&["build", "standard", "--n", "4", "--out", file.to_str().unwrap()]);
    assert!(built.status.success());
    assert!(built.stdout.is_empty());
    let inv = melon(&["invariants", file.to_str().unwrap()]);
    assert_eq!(inv.status.code(), Some(0));
    let v = stdout_json(&inv);
    assert_eq!(v["short_arc_count"], 4);
    assert_eq!(v["arc_count"], 6);
    assert_eq!(v["delta2"]["matrix"].as_array().unwrap().len(), 7);
}

#[test]
fn compare_standard_and_alt_six() {
    let out =
        melon(&["compare", fixture("standard_6.json").to_str().unwrap(), fixture("alt_6.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["equivalent"], false);
    assert_eq!(v["certificate"]["distinguishing_value"], 5);
}

#[test]
fn compare_the_two_four_puncture_systems() {
    let out =
        melon(&["compare", fixture("standard_4.json").to_str().unwrap(), fixture("alt_4.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert_eq!(v["equivalent"], true);
    assert!(v["row_ops"].is_array());
}

#[test]
fn validate_reports_isotopic_pair() {
    let out = melon(&["validate", fixture("broken_isotopic_pair.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    assert_eq!(v["violations"][0]["rule"], "isotopic-pair");
    assert!(String::from_utf8_lossy(&out.stderr).contains("isotopic-pair"));
    let good = melon(&["validate", fixture("alt_5.json").to_str().unwrap()]);
    assert_eq!(good.status.code(), Some(0));
    assert_eq!(stdout_json(&good)["valid"], true);
}

#[test]
fn table_csv_matches_golden() {
    let out = melon(&["table", fixture("standard_6.json").to_str().unwrap(), "--format", "csv"]);
    assert!(out.status.success());
    assert_eq!(out.stdout, std::fs::read(fixture("standard_6_table.csv")).unwrap());
}

#[test]
fn reduce_and_insertions() {
    let reduced = melon(&["reduce", fixture("alt_5.json").to_str().unwrap(), "--puncture", "5"]);
    assert!(reduced.status.success());
    let v = stdout_json(&reduced);
    assert_eq!(v["n"], 4);
    assert_eq!(v["arcs"].as_array().unwrap().len(), 6);
    let bad = melon(&["reduce", fixture("alt_5.json").to_str().unwrap(), "--puncture", "9"]);
    assert_eq!(bad.status.code(), Some(2));

    let ins = melon(&["insertions", fixture("standard_4.json").to_str().unwrap()]);
    assert!(ins.status.success());
    assert_eq!(stdout_json(&ins)["count"], 0);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(melon(&["build", "standard", "--n", "1"]).status.code(), Some(2));
    assert_eq!(melon(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(melon(&["validate", "/nonexistent/file.json"]).status.code(), Some(2));
    let threads = Command::new(env!("CARGO_BIN_EXE_melon"))
        .args(["build", "standard", "--n", "3"])
        .env("MELON_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(threads.status.code(), Some(2));
}

#[test]
fn malformed_input_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("junk.json");
    std::fs::write(&file, "{\"n\": 3}").unwrap();
    let out = melon(&["table", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
}

#[test]
fn enumerate_budget_and_resume() {
    let dir = tempfile::tempdir().unwrap();
    let ck = dir.path().join("ck.json");
    let ck = ck.to_str().unwrap();
    let cut = melon(&["enumerate", "--n", "4", "--node-budget", "20", "--checkpoint", ck]);
    assert_eq!(cut.status.code(), Some(3));
    let resumed = melon(&["enumerate", "--n", "4", "--resume", ck]);
    assert_eq!(resumed.status.code(), Some(0));
    let v = stdout_json(&resumed);
    assert_eq!(v["class_count"], 2);
    assert_eq!(melon(&["enumerate", "--n", "5"]).status.code(), Some(2));
}

#[test]
fn report_uses_certificate_from_six() {
    let out = melon(&["report", "--n", "7"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["method"], "certificate");
    assert_eq!(v["certificate"]["distinguishing_value"], 6);
    let small = melon(&["report", "--n", "3"]);
    assert_eq!(stdout_json(&small)["pass"], true);
}

#[test]
fn render_is_deterministic() {
    let file = fixture("alt_6.json");
    let a = melon(&["render", file.to_str().unwrap(), "--format", "svg"]);
    let b = melon(&["render", file.to_str().unwrap()]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert!(a.stdout.starts_with(b"<svg"));
}

#[test]
fn thread_override_gives_same_output() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_melon"))
            .args(["enumerate", "--n", "4"])
            .env("MELON_THREADS", threads)
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run("1"), run("4"));
}
