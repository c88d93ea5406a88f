//! Structured diagnostics and their box-style rendering.

use std::fmt;

use serde::Serialize;

use super::span::{SourceMap, Span};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Code {
    SyntaxError,
    UnknownName,
    DuplicateDecl,
    TypeMismatch,
    KindMismatch,
    MissingRole,
    BadGuard,
    NoApplicableMethod,
    AmbiguousMethod,
    MissingImplementation,
    RoleAliasing,
    CyclicInheritance,
    RoleSetMismatch,
    IllegalOverload,
    BadSelectionAnnotation,
    BadSelectionLabel,
    UnusedRole,
    MergeFailure,
    TestShape,
}

impl Code {
    pub fn as_str(self) -> &'static str {
        match self {
            Code::SyntaxError => "SyntaxError",
            Code::UnknownName => "UnknownName",
            Code::DuplicateDecl => "DuplicateDecl",
            Code::TypeMismatch => "TypeMismatch",
            Code::KindMismatch => "KindMismatch",
            Code::MissingRole => "MissingRole",
            Code::BadGuard => "BadGuard",
            Code::NoApplicableMethod => "NoApplicableMethod",
            Code::AmbiguousMethod => "AmbiguousMethod",
            Code::MissingImplementation => "MissingImplementation",
            Code::RoleAliasing => "RoleAliasing",
            Code::CyclicInheritance => "CyclicInheritance",
            Code::RoleSetMismatch => "RoleSetMismatch",
            Code::IllegalOverload => "IllegalOverload",
            Code::BadSelectionAnnotation => "BadSelectionAnnotation",
            Code::BadSelectionLabel => "BadSelectionLabel",
            Code::UnusedRole => "UnusedRole",
            Code::MergeFailure => "MergeFailure",
            Code::TestShape => "TestShape",
        }
    }

    pub fn parse(s: &str) -> Option<Code> {
        ALL_CODES.iter().copied().find(|c| c.as_str() == s)
    }
}

const ALL_CODES: &[Code] = &[
    Code::SyntaxError,
    Code::UnknownName,
    Code::DuplicateDecl,
    Code::TypeMismatch,
    Code::KindMismatch,
    Code::MissingRole,
    Code::BadGuard,
    Code::NoApplicableMethod,
    Code::AmbiguousMethod,
    Code::MissingImplementation,
    Code::RoleAliasing,
    Code::CyclicInheritance,
    Code::RoleSetMismatch,
    Code::IllegalOverload,
    Code::BadSelectionAnnotation,
    Code::BadSelectionLabel,
    Code::UnusedRole,
    Code::MergeFailure,
    Code::TestShape,
];

impl fmt::Display for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub code: Code,
    pub severity: Severity,
    pub span: Span,
    pub message: String,
    pub expecting: Option<String>,
    pub found: Option<String>,
    pub notes: Vec<String>,
}

impl Diagnostic {
    pub fn error(code: Code, span: Span, message: impl Into<String>) -> Self {
        Diagnostic {
            code,
            severity: Severity::Error,
            span,
            message: message.into(),
            expecting: None,
            found: None,
            notes: Vec::new(),
        }
    }

    pub fn warning(code: Code, span: Span, message: impl Into<String>) -> Self {
        Diagnostic { severity: Severity::Warning, ..Diagnostic::error(code, span, message) }
    }

    /// The "Incompatible types" shape used for every expecting/found mismatch.
    pub fn mismatch(span: Span, expecting: impl Into<String>, found: impl Into<String>) -> Self {
        let expecting = expecting.into();
        let found = found.into();
        let mut d = Diagnostic::error(
            Code::TypeMismatch,
            span,
            format!("Incompatible types: expecting '{expecting}' found '{found}'."),
        );
        d.expecting = Some(expecting);
        d.found = Some(found);
        d
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }

    /// 1-based line of the span start.
    pub fn line(&self, sources: &SourceMap) -> usize {
        sources.get(self.span.file).line_col(self.span.start).0
    }

    /// Box rendering: location, source excerpt, caret line, `Code: message`.
    pub fn render(&self, sources: &SourceMap) -> String {
        let file = sources.get(self.span.file);
        let (line, col) = file.line_col(self.span.start);
        let excerpt = file.line_text(line);
        let mut out = String::new();
        let kind = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        out.push_str(&format!("{kind} in {}:{line}:{col}\n", file.name));
        out.push_str(&format!("  {excerpt}\n"));
        out.push_str(&format!("  {}^\n", "-".repeat(col.saturating_sub(1))));
        out.push_str(&format!("{}: {}\n", self.code, self.message));
        for n in &self.notes {
            out.push_str(&format!("  note: {n}\n"));
        }
        out
    }

    /// One JSON object per diagnostic for machine consumers.
    pub fn to_json(&self, sources: &SourceMap) -> serde_json::Value {
        let file = sources.get(self.span.file);
        let (line, column) = file.line_col(self.span.start);
        serde_json::json!({
            "code": self.code.as_str(),
            "severity": self.severity,
            "file": file.name,
            "line": line,
            "column": column,
            "start": self.span.start,
            "end": self.span.end,
            "message": self.message,
            "expecting": self.expecting,
            "found": self.found,
            "notes": self.notes,
        })
    }
}

pub fn has_errors(diags: &[Diagnostic]) -> bool {
    diags.iter().any(Diagnostic::is_error)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_has_caret_under_column() {
        let mut sm = SourceMap::new();
        let f = sm.add("t.chor", "class X {\n  Integer@A x = \"foo\"@A;\n}\n");
        let start = sm.get(f).text.find("\"foo\"").unwrap() as u32;
        let d = Diagnostic::mismatch(Span::new(f, start, start + 5), "Integer@A", "String@A");
        let r = d.render(&sm);
        let lines: Vec<&str> = r.lines().collect();
        assert_eq!(lines[1], "    Integer@A x = \"foo\"@A;");
        assert_eq!(lines[2].find('^').unwrap(), lines[1].find('"').unwrap());
        assert_eq!(lines[3], "TypeMismatch: Incompatible types: expecting 'Integer@A' found 'String@A'.");
    }

    #[test]
    fn code_names_round_trip() {
        for c in ALL_CODES {
            assert_eq!(Code::parse(c.as_str()), Some(*c));
        }
    }
}
