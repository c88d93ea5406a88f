//! The standard declarations every program sees: host classes, the channel
//! hierarchy and test utilities.

use crate::check::{check_program, Checked};
use crate::parse::{parse_program, IdGen};
use crate::syntax::{diag, Diagnostic, FileId, Program, SourceMap};

pub const FILES: [(&str, &str); 3] = [
    ("<prelude>/lang.chor", include_str!("../prelude/lang.chor")),
    ("<prelude>/channels.chor", include_str!("../prelude/channels.chor")),
    ("<prelude>/testing.chor", include_str!("../prelude/testing.chor")),
];

/// A parsed and checked program together with its sources.
#[derive(Debug)]
pub struct Frontend {
    pub sources: SourceMap,
    pub program: Program,
    pub checked: Checked,
    /// Parse and check diagnostics, parse errors first.
    pub diags: Vec<Diagnostic>,
    pub user_files: Vec<FileId>,
}

impl Frontend {
    pub fn has_errors(&self) -> bool {
        diag::has_errors(&self.diags)
    }

    pub fn render_diags(&self) -> String {
        self.diags.iter().map(|d| d.render(&self.sources)).collect::<Vec<_>>().join("\n")
    }
}

/// Parses `files` (name, text) on top of the prelude and checks the result.
/// Checking is skipped when parsing fails.
pub fn load(files: &[(String, String)]) -> Frontend {
    let mut sources = SourceMap::new();
    let mut ids = Vec::new();
    for (name, text) in FILES {
        ids.push((sources.add(name, text), true));
    }
    let mut user_files = Vec::new();
    for (name, text) in files {
        let id = sources.add(name.clone(), text.clone());
        user_files.push(id);
        ids.push((id, false));
    }
    let mut gen = IdGen::new();
    let (program, mut diags) = parse_program(&sources, &ids, &mut gen);
    let checked = if diag::has_errors(&diags) { Checked::empty() } else { check_program(&program) };
    diags.extend(checked.diags.iter().cloned());
    Frontend { sources, program, checked, diags, user_files }
}

/// Single-file convenience wrapper around [`load`].
pub fn load_str(name: &str, text: &str) -> Frontend {
    load(&[(name.to_string(), text.to_string())])
}
