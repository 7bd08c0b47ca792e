use std::process::{Command, Output};

use brst_core::scalar::q;
use brst_core::GradedAlgebra;

fn brst(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_brst")).args(args).output().unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn catalog_algebra_passes_at_low_level() {
    let out = brst(&["--algebra", "dual_numbers", "--level", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let r = json(&out);
    assert_eq!(r["algebra"], "dual_numbers");
    assert_eq!(r["all_passed"], true);
    assert!(r["hamiltonian"].as_array().is_some_and(|h| !h.is_empty()));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(brst(&["--algebra", "mat2", "--level", "0"]).status.code(), Some(2));
    assert_eq!(brst(&["--algebra", "mat2", "--level", "7"]).status.code(), Some(2));
    assert_eq!(brst(&["--algebra", "/nonexistent/alg.json"]).status.code(), Some(2));
    assert_eq!(brst(&["--algebra", "mat2", "--suite", "cohomology"]).status.code(), Some(2));
    assert_eq!(brst(&["--level", "2"]).status.code(), Some(2));
}

#[test]
fn unit_law_violation_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    let text = r#"{"name":"broken","dim":2,"unit_index":0,"parity":[0,0],"f":[[0,0,0,1],[0,1,1,1]]}"#;
    std::fs::write(&path, text).unwrap();
    let out = brst(&["--algebra", path.to_str().unwrap(), "--level", "2"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unit law"));
}

#[test]
fn seeded_nonassociative_table_is_detected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mat2_bad.json");
    let bad = GradedAlgebra::builtin("mat2").unwrap().with_structure_constant(2, 3, 1, q(2)).unwrap().renamed("mat2_bad");
    std::fs::write(&path, bad.to_json()).unwrap();
    let p = path.to_str().unwrap();

    let probe = brst(&["--algebra", p, "--level", "3", "--suite", "nonassoc"]);
    assert_eq!(probe.status.code(), Some(0));
    let r = json(&probe);
    let rep = &r["reports"][0];
    assert_eq!(rep["family"], "nonassoc");
    assert!(!rep["witnesses"].as_array().unwrap().is_empty());

    let full = brst(&["--algebra", p, "--level", "3", "--suite", "residuals", "--suite", "bar"]);
    assert_eq!(full.status.code(), Some(1));
    assert_eq!(json(&full)["all_passed"], false);
}

#[test]
fn dump_writes_one_file_per_key() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("u");
    let report = dir.path().join("report.json");
    let out = brst(&[
        "--algebra",
        "mat2",
        "--level",
        "3",
        "--suite",
        "recursion",
        "--dump-u",
        dump.to_str().unwrap(),
        "--report",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let u111: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dump.join("U_1_1__0_1.json")).unwrap()).unwrap();
    assert_eq!(u111["key"], serde_json::json!([1, 1, 0, 1]));
    assert!(std::fs::read_dir(&dump).unwrap().count() >= 4);
    let r: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(r["suites"], serde_json::json!(["recursion"]));
}
