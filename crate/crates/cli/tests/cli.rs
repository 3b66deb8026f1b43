use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_groupcount"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn envelope(args: &[&str]) -> (Value, i32) {
    let mut full = args.to_vec();
    full.push("--json");
    let out = run(&full);
    let v: Value = serde_json::from_slice(&out.stdout).expect("valid JSON");
    (v, out.status.code().unwrap())
}

#[test]
fn count_text_and_json() {
    let out = run(&["count", "7575"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "g(7575) = 6");

    let (v, code) = envelope(&["count", "1"]);
    assert_eq!(code, 0);
    assert_eq!(v["command"], "count");
    assert_eq!(v["status"], "ok");
    assert_eq!(v["result"]["value"], 1);
}

#[test]
fn count_unsupported() {
    let (v, code) = envelope(&["count", "16"]);
    assert_ne!(code, 0);
    assert_eq!(v["status"], "unsupported");
    assert_eq!(v["result"]["reason"], "fourth-power");
    assert_eq!(v["result"]["lower_bound"], 14);
}

#[test]
fn parse_and_validation_errors() {
    assert_eq!(run(&["count", "abc"]).status.code(), Some(2));
    assert_eq!(run(&["count", "0"]).status.code(), Some(2));
    assert_eq!(run(&["solve", "8", "--max", "10"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--max", "1000001"]).status.code(), Some(2));
    let (v, code) = envelope(&["count", "0"]);
    assert_eq!(code, 2);
    assert_eq!(v["status"], "error");
}

#[test]
fn graph_formats() {
    let dot = stdout(&run(&["graph", "1827", "--dot"]));
    assert_eq!(dot.matches("->").count(), 2);
    assert_eq!(dot.matches("dashed").count(), 1);

    let (v, _) = envelope(&["graph", "255"]);
    assert_eq!(v["result"]["edges"].as_array().unwrap().len(), 0);

    let dot = stdout(&run(&["graph", "30", "--dot"]));
    let edges: Vec<&str> = dot.lines().filter(|l| l.contains("->")).collect();
    assert_eq!(edges.len(), 2);
    assert!(edges
        .iter()
        .all(|l| l.trim_start().starts_with("\"2^1\" ->") && !l.contains("dashed")));
}

#[test]
fn classify_and_solve() {
    let (v, _) = envelope(&["classify", "32661"]);
    assert_eq!(v["result"]["k"], 7);
    assert_eq!(v["result"]["matched_rule"], "T7.VII");

    let out = run(&["solve", "7", "--max", "400"]);
    assert!(stdout(&out).lines().any(|l| l == "375"));

    let out = run(&["solve", "4", "--max", "100"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Miller"));
}

#[test]
fn json_is_independent_of_jobs() {
    let one = run(&["solve", "6", "--max", "20000", "--jobs", "1", "--json"]).stdout;
    let many = run(&["solve", "6", "--max", "20000", "--jobs", "7", "--json"]).stdout;
    assert_eq!(one, many);
    let a = run(&["verify", "--max", "5000", "--jobs", "1", "--json"]).stdout;
    let b = run(&["verify", "--max", "5000", "--jobs", "3", "--json"]).stdout;
    assert_eq!(a, b);
}

#[test]
fn verify_reports_no_disagreements() {
    let (v, code) = envelope(&["verify", "--max", "20000"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["disagreements"], 0);
    assert!(v["result"]["per_k"]["6"].as_u64().unwrap() > 0);
}

#[test]
fn census_target_six() {
    let (v, code) = envelope(&["census", "--vertices", "5", "--target", "6"]);
    assert_eq!(code, 0);
    let entries = v["result"]["entries"].as_array().unwrap();
    let names: Vec<&str> = entries
        .iter()
        .map(|e| e["name"].as_str().unwrap())
        .collect();
    assert_eq!(names.len(), 2);
    assert!(names.contains(&"Q") && names.contains(&"triangle(2)"));
    let q = entries.iter().find(|e| e["name"] == "Q").unwrap();
    assert!(q["labels"].is_null());
    assert_eq!(q["witness"], 7455);
}
