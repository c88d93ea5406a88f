//! The vitals streaming test passes as written and catches a broken
//! pseudonymiser.

use std::path::PathBuf;
use std::time::Duration;

use choral_core::prelude::load;
use choral_core::testkit::{discover, test_frontend, CaseStatus};

const PSEUDONYMISE: &str = "return new Vitals@Gatherer(\"anonymous\"@Gatherer, vitals.heartRate);";

fn sources(pseudonymise: &str) -> Vec<(String, String)> {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus");
    let read = |p: &str| std::fs::read_to_string(root.join(p)).unwrap();
    let program = read("positive/VitalsStreaming.chor");
    assert!(program.contains(PSEUDONYMISE));
    vec![
        ("VitalsStreaming.chor".into(), program.replace(PSEUDONYMISE, pseudonymise)),
        ("VitalsStreamingTest.chor".into(), read("tests/VitalsStreamingTest.chor")),
    ]
}

#[test]
fn one_case_with_two_workers_passes() {
    let f = load(&sources(PSEUDONYMISE));
    assert!(!f.has_errors(), "{}", f.render_diags());
    let (cases, diags) = discover(&f);
    assert!(diags.is_empty());
    assert_eq!(cases.len(), 1);
    assert_eq!(cases[0].name(), "VitalsStreamingTest.test1");
    assert_eq!(cases[0].roles, ["Device", "Gatherer"]);
    let report = test_frontend(&f, Duration::from_secs(10)).unwrap();
    assert_eq!(report.cases.len(), 1);
    assert_eq!(report.cases[0].workers, 2);
    assert!(report.all_passed(), "{:?}", report.cases[0]);
}

#[test]
fn no_op_pseudonymiser_fails_the_assertion() {
    let f = load(&sources("return vitals;"));
    assert!(!f.has_errors(), "{}", f.render_diags());
    let report = test_frontend(&f, Duration::from_secs(10)).unwrap();
    let case = &report.cases[0];
    assert_eq!(case.status, CaseStatus::Failed);
    let cause = case.cause().unwrap();
    assert_eq!((cause.role.as_str(), cause.message.as_str()), ("Gatherer", "bad pseudonymisation"));
}
