//! End-to-end checks of the command-line interface: output shapes, exit
//! codes, and the resume/parallel guarantees of the census log.

use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quadorders"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_with_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quadorders"))
        .args(args)
        .env(key, value)
        .output()
        .expect("binary runs")
}

fn json_lines(output: &Output) -> Vec<serde_json::Value> {
    assert!(output.status.success(), "stderr: {}", String::from_utf8_lossy(&output.stderr));
    String::from_utf8(output.stdout.clone())
        .expect("utf-8 stdout")
        .lines()
        .map(|line| serde_json::from_str(line).expect("json line"))
        .collect()
}

fn exit_code(output: &Output) -> i32 {
    output.status.code().expect("process not signalled")
}

#[test]
fn info_reports_field_invariants() {
    let lines = json_lines(&run(&["info", "10", "--json"]));
    assert_eq!(lines.len(), 1);
    let info = &lines[0];
    assert_eq!(info["kind"], "info");
    assert_eq!(info["d_k"], "40");
    assert_eq!(info["omega"], "sqrt(d)");
    assert_eq!(info["unit_norm"], "-1");
    assert_eq!(info["class_number"], "2");
    assert_eq!(info["ramified"], serde_json::json!(["2", "5"]));

    let lines = json_lines(&run(&["info", "85", "--json"]));
    assert_eq!(lines[0]["omega"], "(1+sqrt(d))/2");
    assert_eq!(lines[0]["d_k"], "85");
}

#[test]
fn classify_exit_codes_encode_the_answer() {
    let yes = run(&["classify", "10", "2", "--json"]);
    assert_eq!(exit_code(&yes), 0);
    let lines = json_lines(&yes);
    assert_eq!(lines[0]["unusual"], true);
    assert_eq!(lines[0]["route"], "thm44");

    let no = run(&["classify", "10", "3", "--json"]);
    assert_eq!(exit_code(&no), 1);

    assert_eq!(exit_code(&run(&["classify", "10", "0"])), 2);
    assert_eq!(exit_code(&run(&["classify", "12", "2"])), 2);
    assert_eq!(exit_code(&run(&["classify", "ten", "2"])), 2);
    assert_eq!(exit_code(&run(&["classify", "10", "2", "--route", "thm50"])), 2);
}

#[test]
fn classify_routes_agree_and_gate() {
    for route in ["thm44", "thm29", "cor28", "thm39"] {
        assert_eq!(exit_code(&run(&["classify", "10", "2", "--route", route])), 0, "{route}");
        assert_eq!(exit_code(&run(&["classify", "10", "6", "--route", route])), 1, "{route}");
    }
    assert_eq!(exit_code(&run(&["classify", "15", "6", "--route", "cor28"])), 0);
    // The norm route refuses fields with N(ε) = 1.
    assert_eq!(exit_code(&run(&["classify", "15", "6", "--route", "thm39"])), 2);
}

#[test]
fn conductors_lists_and_flags_completeness() {
    let lines = json_lines(&run(&["conductors", "15", "--json"]));
    assert_eq!(lines[0]["complete"], true);
    assert_eq!(lines[0]["bound"], "30");
    assert_eq!(
        lines[0]["conductors"],
        serde_json::json!(["2", "3", "5", "6", "10", "15", "30"])
    );

    let lines = json_lines(&run(&["conductors", "10", "--json"]));
    assert_eq!(lines[0]["complete"], false);
    let listed: Vec<String> = lines[0]["conductors"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    for expected in ["2", "5", "10", "35"] {
        assert!(listed.contains(&expected.to_string()), "missing {expected}");
    }

    let lines = json_lines(&run(&["conductors", "10", "--bound", "10", "--json"]));
    assert_eq!(lines[0]["conductors"], serde_json::json!(["2", "5", "10"]));
}

#[test]
fn type_form_reports_the_slot() {
    let lines = json_lines(&run(&["type-form", "85", "--json"]));
    assert_eq!(lines[0]["type"], "3");
    assert_eq!(lines[0]["form"], "6");
    assert_eq!(
        lines[0]["reduced_conductors"],
        serde_json::json!(["5", "10", "17", "34", "85", "170"])
    );

    let lines = json_lines(&run(&["type-form", "34", "--json"]));
    assert_eq!(lines[0]["type"], serde_json::Value::Null);
    assert_eq!(lines[0]["reduced_conductors"], serde_json::json!([]));
}

#[test]
fn census_reproduces_the_golden_table() {
    let output = run(&["census", "--max-disc", "1000", "--json"]);
    let lines = json_lines(&output);
    assert_eq!(lines.len(), 8);
    let mut discs: Vec<u64> =
        lines.iter().map(|l| l["disc"].as_str().unwrap().parse().unwrap()).collect();
    discs.sort_unstable();
    assert_eq!(discs, vec![160, 240, 416, 540, 560, 928, 945, 1000]);
    for line in &lines {
        assert_eq!(line["kind"], "order");
        assert_eq!(line["class_number"], "2");
    }
}

#[test]
fn census_worker_count_does_not_change_output() {
    let solo = run(&["census", "--max-disc", "2000", "--json"]);
    let team = run(&["census", "--max-disc", "2000", "--jobs", "3", "--json"]);
    assert_eq!(exit_code(&solo), 0);
    assert_eq!(solo.stdout, team.stdout);
}

#[test]
fn census_resume_replays_and_extends_the_log() {
    let dir = tempfile::tempdir().expect("tempdir");
    let log = dir.path().join("census.jsonl");
    let log_arg = log.to_str().unwrap();

    let first = run(&["census", "--max-disc", "1000", "--json", "--resume", log_arg]);
    let second = run(&["census", "--max-disc", "1000", "--json", "--resume", log_arg]);
    assert_eq!(exit_code(&first), 0);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(json_lines(&first).len(), 8);

    // A torn tail (partial final line) only costs the uncommitted chunk.
    let bytes = std::fs::read(&log).unwrap();
    std::fs::write(&log, &bytes[..bytes.len() - 7]).unwrap();
    let third = run(&["census", "--max-disc", "1000", "--json", "--resume", log_arg]);
    assert_eq!(first.stdout, third.stdout);
    assert_eq!(std::fs::read(&log).unwrap(), bytes);

    let fresh = run(&["census", "--max-disc", "1000", "--json"]);
    assert_eq!(first.stdout, fresh.stdout);
    assert!(log_has_marker(&log));
}

fn log_has_marker(path: &Path) -> bool {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .any(|line| line.contains(r#""kind":"range_done""#))
}

#[test]
fn search_v_finds_the_known_fields() {
    let lines = json_lines(&run(&["search-v", "--max-d", "2000", "--json"]));
    let ds: Vec<&str> = lines.iter().map(|l| l["d"].as_str().unwrap()).collect();
    assert_eq!(ds, vec!["46", "430", "1817"]);

    let human = run(&["search-v", "--max-d", "50"]);
    let text = String::from_utf8(human.stdout).unwrap();
    assert!(text.starts_with("46\n"), "{text}");
}

#[test]
fn attributes_reports_membership_rows() {
    let lines = json_lines(&run(&["attributes", "430", "--json"]));
    let report = &lines[0];
    assert_eq!(report["beta"], "6");
    assert_eq!(report["t"], "3");
    assert_eq!(report["unit_norm"], "1");
    assert_eq!(report["class_number"], "2");
    let rows = report["ramified"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert!(rows.iter().all(|r| r["unusual"] == false));

    let lines = json_lines(&run(&["attributes", "10", "--json"]));
    let rows = lines[0]["ramified"].as_array().unwrap();
    assert!(rows.iter().all(|r| r["unusual"] == true && r["pell_solvable"] == false));
}

#[test]
fn budget_exhaustion_exits_with_its_own_code() {
    let out = run_with_env(&["conductors", "10"], "QUADORDERS_SIEVE_LIMIT", "50");
    assert_eq!(exit_code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("budget"));
}

#[test]
fn invalid_field_arguments_exit_with_usage_code() {
    assert_eq!(exit_code(&run(&["info", "12"])), 2);
    assert_eq!(exit_code(&run(&["info", "1"])), 2);
    assert_eq!(exit_code(&run(&["conductors", "10", "--bound", "0"])), 2);
    assert_eq!(exit_code(&run(&["no-such-verb"])), 2);
}
