use std::path::Path;
use std::process::{Command, Output};

fn hochlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hochlab")).args(args).output().expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn malformed_json_exits_2_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "bad.json", "{\n  \"name\": \"x\",\n  \"tasks\": [\n");
    let o = hochlab(&["run", &p]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 4, column 0"), "{}", stderr(&o));
}

#[test]
fn unknown_field_exits_2_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        dir.path(),
        "extra.json",
        r#"{"name": "x", "tasks": [{"task": "bar-acyclicity", "algebra": {"kind": "scalar"}, "max_degree": 1, "colour": 3}]}"#,
    );
    let o = hochlab(&["run", &p]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert!(err.contains("line 1, column") && err.contains("colour"), "{err}");
}

#[test]
fn invalid_name_and_empty_tasks_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "a.json", r#"{"name": "no spaces", "tasks": [{"task": "homology", "algebra": {"kind": "scalar"}, "max_degree": 0}]}"#);
    assert_eq!(hochlab(&["run", &p]).status.code(), Some(2));
    let p = write(dir.path(), "b.json", r#"{"name": "empty", "tasks": []}"#);
    assert_eq!(hochlab(&["run", &p]).status.code(), Some(2));
}

#[test]
fn budget_overrun_exits_3() {
    let o = hochlab(&["--budget-cols", "100", "homology", "--algebra", "matrix:3", "--max-degree", "3"]);
    assert_eq!(o.status.code(), Some(3));
    let o = hochlab(&["--json", "--budget-cols", "100", "homology", "--algebra", "matrix:3", "--max-degree", "3"]);
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["tasks"][0]["status"], "budget");
    assert_eq!(r["totals"]["budget_exceeded"], 1);
}

#[test]
fn expected_failure_exits_0_and_unexpected_failure_exits_1() {
    let ok = hochlab(&["excision", "--extension", "unitization:square-zero:1", "--max-degree", "1", "--expect", "fail"]);
    assert_eq!(ok.status.code(), Some(0), "{}", stderr(&ok));
    let bad = hochlab(&["excision", "--extension", "unitization:square-zero:1", "--max-degree", "1"]);
    assert_eq!(bad.status.code(), Some(1));
    let text = String::from_utf8_lossy(&bad.stdout);
    assert!(text.contains("UNEXPECTED"), "{text}");
}

#[test]
fn sabotaged_identity_reports_a_witness() {
    let o = hochlab(&[
        "--json", "verify-identities", "--frame", "1,2", "--identity", "shift-sum", "--degrees", "1", "--sabotage",
        "--expect", "fail",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r["tasks"][0]["verdict"], "fail");
    assert!(r["tasks"][0]["result"]["first_failure"].is_object());
}

#[test]
fn homology_verb_checks_dimensions() {
    let o = hochlab(&["homology", "--algebra", "matrix:2", "--max-degree", "2", "--expect-dims", "1,0,0"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let o = hochlab(&["homology", "--algebra", "matrix:2", "--max-degree", "2", "--expect-dims", "1,1,0"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn output_dir_holds_report_tasks_summary_and_matrices() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = hochlab(&[
        "--output-dir", out.to_str().unwrap(), "--dump-matrices", "homology", "--algebra", "matrix:2", "--max-degree", "1",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report = std::fs::read_to_string(out.join("report.json")).unwrap();
    assert!(report.ends_with("}\n"));
    assert!(out.join("tasks/00-homology.json").exists());
    let summary = std::fs::read_to_string(out.join("summary.txt")).unwrap();
    assert_eq!(summary, String::from_utf8_lossy(&o.stdout));
    let mtx: Vec<_> = std::fs::read_dir(out.join("matrices")).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert!(!mtx.is_empty());
    let d1 = std::fs::read_to_string(out.join("matrices/00-homology-hochschild-d1.mtx")).unwrap();
    let m = hochlab::linalg::SparseMatrix::from_market(&d1).unwrap();
    // δ_1 : A⊗A → A for M_2
    assert_eq!((m.rows(), m.cols()), (4, 16));
}

#[test]
fn seed_override_changes_only_seeded_results() {
    let scenario = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/gamma.json");
    let s = scenario.to_str().unwrap();
    let a = hochlab(&["--json", "--seed", "5", "run", s]);
    let b = hochlab(&["--json", "--seed", "5", "run", s]);
    let c = hochlab(&["--json", "--seed", "6", "run", s]);
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
    assert_eq!(c.status.code(), Some(0));
}
