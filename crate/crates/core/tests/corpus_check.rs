//! Every positive corpus program checks without errors.

use std::fs;
use std::path::PathBuf;

use choral_core::prelude::load;

fn corpus_dir(kind: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(kind)
}

#[test]
fn positive_corpus_checks() {
    let mut seen = 0;
    for entry in fs::read_dir(corpus_dir("positive")).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().and_then(|e| e.to_str()) != Some("chor") {
            continue;
        }
        let text = fs::read_to_string(&path).unwrap();
        let f = load(&[(path.display().to_string(), text)]);
        assert!(!f.has_errors(), "{}:\n{}", path.display(), f.render_diags());
        seen += 1;
    }
    assert!(seen > 0);
}
