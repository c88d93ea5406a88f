//! Exit codes and outputs of the `choral` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn choral(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_choral")).args(args).output().unwrap()
}

fn corpus(rel: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(rel).display().to_string()
}

#[test]
fn check_exit_codes() {
    assert_eq!(choral(&["check", &corpus("positive/DistAuth.chor")]).status.code(), Some(0));
    assert_eq!(choral(&["check", &corpus("negative/TypeMismatch.chor")]).status.code(), Some(1));
    assert_eq!(choral(&["check", "/nonexistent/X.chor"]).status.code(), Some(2));
    assert_eq!(choral(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn json_diagnostics_are_one_object_per_line() {
    let out = choral(&["--json-diagnostics", "check", &corpus("negative/TypeMismatch.chor")]);
    let stdout = String::from_utf8(out.stdout).unwrap();
    let first: serde_json::Value = serde_json::from_str(stdout.lines().next().unwrap()).unwrap();
    assert_eq!(first["code"], "TypeMismatch");
}

#[test]
fn project_writes_units_and_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = choral(&["project", &corpus("positive/HelloRoles.chor"), "--out", out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for rel in ["A/HelloRoles_A.lchor", "B/HelloRoles_B.lchor", "manifest.json"] {
        assert!(dir.path().join(rel).is_file(), "missing {rel}");
    }
    let wrong = choral(&["project", &corpus("negative/ConsumeItemsWrong.chor"), "--out", out]);
    assert_eq!(wrong.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&wrong.stderr).contains("MergeFailure"));
}

#[test]
fn run_compare_agrees() {
    let o = choral(&[
        "run",
        &corpus("positive/Mergesort.chor"),
        "--manifest",
        &corpus("positive/Mergesort.manifest.json"),
        "--compare",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn non_positive_deadline_is_a_usage_error() {
    let o = choral(&[
        "oracle",
        &corpus("positive/HelloRoles.chor"),
        "--manifest",
        &corpus("positive/HelloRoles.manifest.json"),
        "--deadline",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn test_command_reports_passes() {
    let o = choral(&["test", &corpus("positive/VitalsStreaming.chor"), &corpus("tests/VitalsStreamingTest.chor")]);
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(o.status.success(), "{stdout}");
    assert!(stdout.contains("PASS VitalsStreamingTest.test1"), "{stdout}");
}
