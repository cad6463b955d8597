use thiserror::Error;

use crate::pattern_graph::ValidationReport;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid pattern: {0}")]
    InvalidPattern(ValidationReport),

    #[error("unknown vertex {0}")]
    UnknownVertex(String),

    #[error("dimension mismatch: expected {expected} entries, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite entry at index {index}")]
    NonFinite { index: usize },

    #[error("radius {value} at index {index} is outside (0, pi/2)")]
    RadiusOutOfRange { index: usize, value: f64 },

    #[error("bigon input out of range: {0}")]
    BigonInput(String),

    #[error("exhaustive check supports at most {max} vertices, got {got}; use the flow method")]
    TooManyVertices { max: usize, got: usize },

    #[error("flow margin must be positive, got {0}")]
    NonPositiveMargin(f64),

    #[error("invalid configuration: {0}")]
    Config(String),
}
