//! Every negative corpus program fails with its designated diagnostic.

use std::fs;
use std::path::PathBuf;
use std::time::Instant;

use choral_core::prelude::load;
use choral_core::project::project_frontend;
use choral_core::syntax::Code;

#[derive(serde::Deserialize)]
struct Expected {
    code: String,
    line: usize,
}

#[test]
fn negative_corpus_fails_as_designated() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus/negative");
    let start = Instant::now();
    let mut seen = 0;
    for entry in fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("chor") {
            continue;
        }
        let expected: Expected =
            serde_json::from_str(&fs::read_to_string(path.with_extension("expected.json")).unwrap()).unwrap();
        let code = Code::parse(&expected.code).expect("known code");
        let f = load(&[(path.display().to_string(), fs::read_to_string(&path).unwrap())]);
        let diags = if f.has_errors() { f.diags.clone() } else { project_frontend(&f).diags };
        let errors: Vec<_> = diags.iter().filter(|d| d.is_error()).collect();
        let hit = errors.iter().find(|d| d.code == code && d.line(&f.sources) == expected.line);
        let Some(hit) = hit else {
            panic!("{}: expected {code} at line {}, got:\n{}", path.display(), expected.line, f.render_diags());
        };
        let clash = errors.iter().any(|d| d.span == hit.span && d.code != code);
        assert!(!clash, "{}: other codes at the same span", path.display());
        seen += 1;
    }
    assert_eq!(seen, 9);
    assert!(start.elapsed().as_secs_f64() < 1.0);
}
