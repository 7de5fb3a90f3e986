use std::path::Path;
use std::process::Command;
use std::str::FromStr;

use num_rational::BigRational;
use serde_json::Value;
use tempfile::TempDir;

fn tpd(args: &[&str]) -> (i32, Value, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_tpd"))
        .args(args)
        .output()
        .expect("tpd runs");
    let stderr = String::from_utf8_lossy(&out.stderr).into_owned();
    let report = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("no JSON on stdout ({e}); stderr: {stderr}"));
    (out.status.code().unwrap(), report, stderr)
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn write(dir: &TempDir, name: &str, body: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    path_str(&p).to_string()
}

const TRIANGLE: &str = r#"{"labels": ["a", "b", "c"],
  "dist": [["0", "1", "1/2"], ["1", "0", "3/4"], ["1/2", "3/4", "0"]],
  "map": [0, 0, 2]}"#;

#[test]
fn validate_accepts_a_metric() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "s.json", TRIANGLE);
    let (code, report, _) = tpd(&["validate", "--space", &f]);
    assert_eq!(code, 0);
    assert_eq!(report["result"]["valid"], true);
    assert_eq!(report["command"], "validate");
    assert_eq!(report["input_digest"].as_str().unwrap().len(), 64);
}

#[test]
fn validate_reports_a_triangle_violation() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "s.json", r#"{"labels": ["a", "b", "c"], "dist": [["0", "5", "1"], ["5", "0", "1"], ["1", "1", "0"]]}"#);
    let (code, report, stderr) = tpd(&["validate", "--space", &f]);
    assert_eq!(code, 1);
    let res = &report["result"];
    assert_eq!(res["valid"], false);
    assert_eq!(res["violations"][0]["axiom"], "triangle");
    assert!(stderr.contains("triangle (a,b) via c"), "{stderr}");
    // commands that need a metric refuse the file outright
    let (code, _, _) = tpd(&["periodic", "--space", &f]);
    assert_eq!(code, 2);
}

#[test]
fn malformed_entry_is_named() {
    let dir = TempDir::new().unwrap();
    let f = write(&dir, "s.json", r#"{"labels": ["a", "b"], "dist": [["0", "1"], ["1.5", "0"]], "map": [0, 0]}"#);
    let (code, report, stderr) = tpd(&["alpha", "--space", &f, "--arity", "2"]);
    assert_eq!(code, 2);
    assert!(report["error"].as_str().unwrap().contains("dist[1][0]"));
    assert!(stderr.contains("dist[1][0]"));

    let g = write(&dir, "t.json", r#"{"labels": ["a", "b"], "dist": [["0", "1"], ["1", "0"]], "map": [0, 7]}"#);
    let (code, _, stderr) = tpd(&["alpha", "--space", &g, "--arity", "2"]);
    assert_eq!(code, 2, "{stderr}");
    let (code, _, _) = tpd(&["alpha", "--space", "/nonexistent/space.json", "--arity", "2"]);
    assert_eq!(code, 2);
}

#[test]
fn two_cycle_sample_coefficient() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("two.json");
    let (code, _, _) = tpd(&["twocycle", "--grid-max", "4", "--grid-step", "1", "--emit", path_str(&f)]);
    assert_eq!(code, 0);
    let (code, report, _) = tpd(&["alpha", "--space", path_str(&f), "--arity", "3"]);
    assert_eq!(code, 0);
    assert_eq!(report["result"]["alpha_hat"], "1/3");
    assert_eq!(report["result"]["witness"], serde_json::json!([0, 1, 2]));
    assert_eq!(report["mode"], "exhaustive");
}

#[test]
fn ladder_below_its_arity_is_not_a_contraction() {
    let (code, report, _) = tpd(&["ladder", "--n", "4", "--eps", "1/100", "--a", "10", "--depth", "6", "--arity", "3"]);
    assert_eq!(code, 0);
    assert_eq!(report["result"]["alpha_hat"], "1");
    assert_eq!(report["result"]["certified"], false);
}

#[test]
fn ladder_emit_round_trips_exactly() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("ladder.json");
    for arity in ["3", "4", "5"] {
        let (_, direct, _) = tpd(&["ladder", "--arity", arity, "--emit", path_str(&f)]);
        let (code, from_file, _) = tpd(&["alpha", "--space", path_str(&f), "--arity", arity]);
        assert_eq!(code, 0);
        for key in ["arity", "alpha_hat", "witness", "witness_labels", "tuples_examined", "mode", "certified"] {
            assert_eq!(direct["result"][key], from_file["result"][key], "{key} at arity {arity}");
        }
    }
}

#[test]
fn certify_and_theorem_exit_codes() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("ladder.json");
    tpd(&["ladder", "--emit", path_str(&f)]);
    let f = path_str(&f);
    let (code, report, _) = tpd(&["certify", "--space", f, "--arity", "4", "--alpha", "3/4"]);
    assert_eq!((code, report["result"]["holds"].clone()), (0, Value::Bool(true)));
    let (code, report, _) = tpd(&["certify", "--space", f, "--arity", "3", "--alpha", "99/100"]);
    assert_eq!(code, 1);
    assert_eq!(report["result"]["holds"], false);
    assert!(report["result"]["counterexample"].is_array());
    let (code, _, _) = tpd(&["certify", "--space", f, "--arity", "3", "--alpha", "1"]);
    assert_eq!(code, 2);

    // identity on two points: not a contraction, so the theorem holds vacuously
    let g = write(&dir, "id.json", r#"{"labels": ["a", "b"], "dist": [["0", "1"], ["1", "0"]], "map": [0, 1]}"#);
    let (code, report, _) = tpd(&["theorem", "--space", &g, "--arity", "2"]);
    assert_eq!(code, 0);
    assert_eq!(report["result"]["certified"], false);
    assert_eq!(report["result"]["conclusion_holds"], true);
}

#[test]
fn orbit_and_periodic_reports() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("ladder.json");
    tpd(&["ladder", "--emit", path_str(&f)]);
    let (code, report, _) = tpd(&["orbit", "--space", path_str(&f), "--start", "1", "--arity", "4"]);
    assert_eq!(code, 0);
    let res = &report["result"];
    assert_eq!(res["visited"], serde_json::json!([1, 4, 7, 10, 13, 16, 0, 0]));
    assert_eq!(res["tuple_sums"], serde_json::json!(["115/2", "115/4", "115/8"]));
    assert_eq!(res["tail_bound"]["holds"], true);
    let (code, report, _) = tpd(&["orbit", "--space", path_str(&f), "--start", "1", "--arity", "4", "--alpha", "1/4"]);
    assert_eq!(code, 1);
    assert_eq!(report["result"]["tail_bound"]["holds"], false);

    let (code, report, _) = tpd(&["periodic", "--space", path_str(&f)]);
    assert_eq!(code, 0);
    assert_eq!(report["result"]["periodic_points"][0]["label"], "x*");
    assert_eq!(report["result"]["fixed_points"], 1);
}

fn rationals(v: &Value, out: &mut Vec<String>) {
    match v {
        Value::String(s) if s.chars().next().is_some_and(|c| c.is_ascii_digit() || c == '-') && !s.contains('_') => {
            out.push(s.clone())
        }
        Value::Array(xs) => xs.iter().for_each(|x| rationals(x, out)),
        Value::Object(m) => m.values().for_each(|x| rationals(x, out)),
        _ => {}
    }
}

#[test]
fn emitted_rationals_reparse_exactly() {
    let (_, report, _) = tpd(&["ladder", "--eps", "3/700", "--a", "21/2", "--arity", "4"]);
    let mut found = Vec::new();
    rationals(&report["result"], &mut found);
    assert!(found.len() > 5);
    for s in found {
        let parsed = BigRational::from_str(&s).unwrap_or_else(|_| panic!("{s} is not p/q"));
        assert_eq!(tpd_core::format_rational(&parsed), s);
    }
}

#[test]
fn subsetmap_and_fuzz_summaries() {
    let dir = TempDir::new().unwrap();
    let f = dir.path().join("sub.json");
    let (code, report, _) = tpd(&["subsetmap", "--seed", "3", "--emit", path_str(&f)]);
    assert_eq!(code, 0);
    assert_eq!(report["result"]["instances"], 1);
    let (code, _, _) = tpd(&["validate", "--space", path_str(&f)]);
    assert_eq!(code, 0);
    let (code, _, _) = tpd(&["subsetmap", "--trials", "2", "--emit", path_str(&f)]);
    assert_eq!(code, 2);

    let (code, report, _) = tpd(&["fuzz", "--seed", "5", "--trials", "12", "--max-points", "6", "--jobs", "2"]);
    assert_eq!(code, 0);
    assert_eq!(report["jobs"], 2);
    assert_eq!(report["result"]["records"].as_array().unwrap().len(), 12);
}

#[test]
fn bad_arguments_exit_with_two() {
    let out = Command::new(env!("CARGO_BIN_EXE_tpd"))
        .args(["ladder", "--eps", "0.01"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let (code, report, _) = tpd(&["ladder", "--n", "2"]);
    assert_eq!(code, 2);
    assert_eq!(report["ok"], false);
}
