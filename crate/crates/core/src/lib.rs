//! Compiler and runtime for a choreographic programming language whose data
//! types carry role annotations.
//!
//! The pipeline is: [`parse`] sources into the surface AST, [`check`] kinds,
//! types and role constraints, [`project`] every declaration to one local
//! unit per role, then execute either the choreography directly
//! ([`interp::global`]) or its projections over channels
//! ([`interp::distributed`]).

pub mod check;
pub mod interp;
pub mod metrics;
pub mod parse;
pub mod prelude;
pub mod project;
pub mod runtime;
pub mod syntax;
pub mod testkit;
