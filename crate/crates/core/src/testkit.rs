//! Choreographic unit tests: `@Test` methods are projected like any other
//! member and run with one worker per role over a fresh registry.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use serde::Serialize;

use crate::interp::distributed::{run_roles, status_of};
use crate::interp::Status;
use crate::prelude::Frontend;
use crate::project::{project_frontend, user_decls};
use crate::runtime::{Registry, RtError};
use crate::syntax::*;

pub const TEST_ANNOTATION: &str = "Test";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TestCase {
    pub class: String,
    pub method: String,
    pub roles: Vec<String>,
    /// Projected unit of the test class for each role.
    pub units: BTreeMap<String, String>,
    #[serde(skip)]
    pub span: Span,
}

impl TestCase {
    pub fn name(&self) -> String {
        format!("{}.{}", self.class, self.method)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CaseStatus {
    Passed,
    Failed,
    DeadlockTimeout,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoleFailure {
    pub role: String,
    pub message: String,
    /// Caused by another worker's failure (peer exit or deadline).
    pub secondary: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct CaseResult {
    pub name: String,
    pub status: CaseStatus,
    pub duration_ms: f64,
    pub workers: usize,
    pub failures: Vec<RoleFailure>,
    pub transcripts: BTreeMap<String, Vec<String>>,
}

impl CaseResult {
    pub fn passed(&self) -> bool {
        self.status == CaseStatus::Passed
    }

    /// The failure that explains the case, preferring a primary one.
    pub fn cause(&self) -> Option<&RoleFailure> {
        self.failures.iter().find(|f| !f.secondary).or(self.failures.first())
    }
}

fn shape_error(m: &Method, decl: &Decl) -> Option<Diagnostic> {
    let mut problems = Vec::new();
    if !m.is_static() {
        problems.push("be static");
    }
    if !m.params.is_empty() {
        problems.push("have no parameters");
    }
    if !matches!(m.ret, TypeExpr::Void(_)) {
        problems.push("return void");
    }
    if problems.is_empty() {
        return None;
    }
    Some(
        Diagnostic::error(
            Code::TestShape,
            m.span,
            format!("Test method '{}.{}' must {}.", decl.name.name, m.name.name, problems.join(" and ")),
        )
        .with_note("Test methods are run without arguments or an instance."),
    )
}

/// Test methods of the user declarations, with a diagnostic for every
/// annotated method of the wrong shape. Unit names are filled in by
/// [`pair_units`].
pub fn discover(front: &Frontend) -> (Vec<TestCase>, Vec<Diagnostic>) {
    let mut cases = Vec::new();
    let mut diags = Vec::new();
    for d in user_decls(&front.program, &front.checked) {
        for m in d.methods.iter().filter(|m| m.has_annotation(TEST_ANNOTATION)) {
            if let Some(e) = shape_error(m, d) {
                diags.push(e);
                continue;
            }
            cases.push(TestCase {
                class: d.name.name.clone(),
                method: m.name.name.clone(),
                roles: d.roles.iter().map(|r| r.name.clone()).collect(),
                units: BTreeMap::new(),
                span: m.span,
            });
        }
    }
    (cases, diags)
}

/// Finds each case's per-role units by their provenance.
pub fn pair_units(cases: &mut [TestCase], units: &LocalProgram) {
    for c in cases {
        for r in &c.roles {
            let unit =
                units.unit_for(&c.class, r).or_else(|| if c.roles.len() == 1 { units.unit(&c.class) } else { None });
            if let Some(u) = unit {
                c.units.insert(r.clone(), u.name.clone());
            }
        }
    }
}

/// Runs every case in order, each against its own registry.
pub fn run_tests(units: &LocalProgram, cases: &[TestCase], deadline: Duration) -> Vec<CaseResult> {
    cases.iter().map(|c| run_case(units, c, deadline)).collect()
}

fn run_case(units: &LocalProgram, case: &TestCase, deadline: Duration) -> CaseResult {
    let start = Instant::now();
    let registry = Registry::new();
    let outcomes = run_roles(units, &case.roles, &registry, deadline, |w, p| {
        let unit = case
            .units
            .get(w.role())
            .and_then(|n| p.unit(n))
            .ok_or_else(|| RtError::Type(format!("no projection of {} for role {}", case.class, w.role())))?;
        w.run_static(unit, &case.method)
    });
    let status = match status_of(&outcomes) {
        Status::Ok => CaseStatus::Passed,
        Status::DeadlockTimeout { .. } => CaseStatus::DeadlockTimeout,
        Status::Error { .. } => CaseStatus::Failed,
    };
    let mut failures = Vec::new();
    let mut transcripts = BTreeMap::new();
    for o in outcomes {
        if let Err(e) = &o.result {
            failures.push(RoleFailure { role: o.role.clone(), message: describe(e), secondary: e.is_secondary() });
        }
        transcripts.insert(o.role, o.transcript);
    }
    CaseResult {
        name: case.name(),
        status,
        duration_ms: start.elapsed().as_secs_f64() * 1e3,
        workers: case.roles.len(),
        failures,
        transcripts,
    }
}

fn describe(e: &RtError) -> String {
    match e {
        RtError::Assertion(m) => m.clone(),
        other => other.to_string(),
    }
}

/// Outcome of testing a set of sources.
#[derive(Debug, Clone, Serialize)]
pub struct TestReport {
    pub cases: Vec<CaseResult>,
}

impl TestReport {
    pub fn passed(&self) -> usize {
        self.cases.iter().filter(|c| c.passed()).count()
    }

    pub fn all_passed(&self) -> bool {
        self.passed() == self.cases.len()
    }
}

/// Discovers, projects and runs the tests of a checked program. Shape and
/// projection errors are returned instead of running anything.
pub fn test_frontend(front: &Frontend, deadline: Duration) -> Result<TestReport, Vec<Diagnostic>> {
    let (mut cases, diags) = discover(front);
    if diag::has_errors(&diags) {
        return Err(diags);
    }
    let projection = project_frontend(front);
    if projection.has_errors() {
        return Err(projection.diags);
    }
    let units = projection.program();
    pair_units(&mut cases, &units);
    Ok(TestReport { cases: run_tests(&units, &cases, deadline) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::prelude::load_str;

    const PAIR: &str = "class Pair@(A, B) {\n\
        @Test public static void same() {\n\
            SymChannel@(A, B)<Object> ch = TestUtils@(A, B).newLocalChannel(\"k\"@[A, B]);\n\
            Integer@B x = ch.<Integer>com(4@A);\n\
            Assert@B.assertTrue(\"four\"@B, x == 4@B); }\n\
        @Test public static void wrong() { Assert@A.assertTrue(\"expected failure\"@A, false@A); }\n\
        @Test public static void split() {\n\
            SymChannel@(A, B)<Object> ch = TestUtils@(A, B).newLocalChannel(\"k1\"@A, \"k2\"@B);\n\
            Integer@B x = ch.<Integer>com(4@A); } }";

    fn front(src: &str) -> Frontend {
        let f = load_str("Pair.chor", src);
        assert!(!f.has_errors(), "{}", f.render_diags());
        f
    }

    #[test]
    fn unannotated_classes_have_no_cases() {
        let f = front("class Plain@A { public static void run() { } }");
        let (cases, diags) = discover(&f);
        assert!(cases.is_empty() && diags.is_empty());
    }

    #[test]
    fn parameters_violate_the_test_shape() {
        let f = front("class T@A { @Test public static void t(Integer@A n) { } }");
        let (cases, diags) = discover(&f);
        assert!(cases.is_empty());
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].code, Code::TestShape);
        assert!(diags[0].message.contains("have no parameters"), "{}", diags[0].message);
    }

    #[test]
    fn instance_and_non_void_tests_are_rejected() {
        let f = front("class T@A { @Test public Integer@A t() { return 1@A; } }");
        let (_, diags) = discover(&f);
        assert!(diags[0].message.contains("be static and return void"), "{}", diags[0].message);
    }

    #[test]
    fn failures_stay_within_their_case() {
        let report = test_frontend(&front(PAIR), Duration::from_millis(600)).unwrap();
        let by_name: BTreeMap<_, _> = report.cases.iter().map(|c| (c.name.as_str(), c)).collect();
        assert_eq!(report.cases.len(), 3);
        assert!(by_name["Pair.same"].passed(), "{:?}", by_name["Pair.same"]);
        let wrong = by_name["Pair.wrong"];
        assert_eq!(wrong.status, CaseStatus::Failed);
        assert_eq!(wrong.cause().unwrap().message, "expected failure");
        assert_eq!(wrong.cause().unwrap().role, "A");
        assert_eq!(by_name["Pair.split"].status, CaseStatus::DeadlockTimeout);
        assert!(by_name.values().all(|c| c.workers == 2));
    }
}
