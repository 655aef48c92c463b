//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed statement in strict parsing mode.
    #[error("parse error at line {line}: {reason}")]
    Parse { line: u64, reason: String },

    /// Graph algorithm invoked on a graph without nodes.
    #[error("operation requires a non-empty graph")]
    EmptyGraph,

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    /// A persisted index file does not match the expected layout.
    #[error("invalid index format in {file}: {reason}")]
    InvalidFormat { file: String, reason: String },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// Mention span is out of bounds, inverted, or overlaps another span.
    #[error("invalid span [{start}, {end}): {reason}")]
    InvalidSpan {
        start: usize,
        end: usize,
        reason: String,
    },

    /// Predicted mentions do not line up with the gold mentions.
    #[error("mention mismatch: {0}")]
    MentionMismatch(String),

    /// Entity type information was never ingested but a type-based filter
    /// was requested.
    #[error("no entity type table available (TYPES_UNAVAILABLE)")]
    TypesUnavailable,

    #[error("{0}")]
    Other(String),
}
