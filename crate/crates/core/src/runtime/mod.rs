//! Channel semantics, runtime values and the builtin prelude.

pub mod builtins;
pub mod channel;
mod value;

use thiserror::Error;

pub use builtins::Host;
pub use channel::{Channel, Deadline, Endpoint, Message, Registry, CAPACITY};
pub use value::{plain_view, value_items, Obj, Value, View};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RtError {
    #[error("deadline reached while blocked: {0}")]
    Deadline(String),
    #[error("peer on channel '{0}' terminated")]
    ClosedPeer(String),
    #[error("assertion failed: {0}")]
    Assertion(String),
    #[error("uncaught {class}: {message}")]
    Thrown { class: String, message: String },
    #[error("protocol violation: {0}")]
    Protocol(String),
    #[error("channel error: {0}")]
    Channel(String),
    #[error("runtime type error: {0}")]
    Type(String),
}

impl RtError {
    /// Errors caused by another worker's failure rather than by this one.
    pub fn is_secondary(&self) -> bool {
        matches!(self, RtError::ClosedPeer(_) | RtError::Deadline(_))
    }
}
