use std::process::{Command, Output};

use berg_core::oracle::corpus;
use serde_json::Value;

fn berg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_berg")).args(args).output().expect("run berg")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn analyze_silver_json() {
    let o = berg(&["analyze", "0,1;1,2", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["N"], 2);
    assert_eq!(v["word"], "11");
    assert_eq!(v["kind"], "semi-period");
    assert_eq!(v["total"], 4);
    assert_eq!(v["shapes"].as_array().unwrap().len(), 2);
}

#[test]
fn not_hyperbolic_exits_2() {
    let o = berg(&["analyze", "1,1;0,1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not hyperbolic"));
}

#[test]
fn parse_error_reports_position() {
    let o = berg(&["word", "1,2;3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("position"));
}

#[test]
fn usage_error_exits_2() {
    assert_eq!(berg(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(berg(&["render", "0,1;1,2", "--index", "2..0"]).status.code(), Some(2));
}

#[test]
fn sweep_bound_3_is_clean() {
    let o = berg(&["sweep", "--bound", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("mismatches: 0"), "{}", stdout(&o));
}

#[test]
fn sweep_respects_thread_setting() {
    let o = Command::new(env!("CARGO_BIN_EXE_berg"))
        .args(["sweep", "--bound", "2", "--dedup"])
        .env("BERG_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    let bad = Command::new(env!("CARGO_BIN_EXE_berg"))
        .args(["sweep", "--bound", "2"])
        .env("BERG_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn verify_accepts_negative_entries() {
    let o = berg(&["verify", "-3,1;-1,0"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verified"));
}

#[test]
fn json_parses_for_corpus() {
    for m in corpus(2) {
        let s = m.to_string();
        let o = berg(&["analyze", &s, "--json"]);
        assert_eq!(o.status.code(), Some(0), "{s}");
        let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
        let total: i64 = v["shapes"].as_array().unwrap().iter().map(|s| s["count"].as_i64().unwrap()).sum();
        assert_eq!(v["total"].as_i64(), Some(total));
    }
}

#[test]
fn render_to_file_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.svg");
    let b = dir.path().join("b.svg");
    for p in [&a, &b] {
        let o = berg(&["render", "2,1;1,1", "--placement", "0", "--overlay", "--out", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    let sa = std::fs::read(&a).unwrap();
    assert!(sa.starts_with(b"<?xml"));
    assert_eq!(sa, std::fs::read(&b).unwrap());
    let fan = berg(&["render", "0,1;1,2", "--index", "0..2"]);
    assert_eq!(stdout(&fan).matches("class=\"panel\"").count(), 3);
}

#[test]
fn symmetry_of_word() {
    let o = berg(&["symmetry", "--word", "1", "--kind", "semi-period"]);
    assert!(stdout(&o).contains("type V"));
    let o = berg(&["symmetry", "--word", "110011"]);
    assert!(stdout(&o).contains("type I\n"));
}
