//! Core language definitions shared by every phase: spans, diagnostics, the
//! surface and local ASTs, kinds and types.

pub mod ast;
pub mod diag;
pub mod local;
pub mod span;
pub mod types;

pub use ast::*;
pub use diag::{Code, Diagnostic, Severity};
pub use local::*;
pub use span::{FileId, SourceFile, SourceMap, Span};
pub use types::{Kind, Type};
pub mod visit;
