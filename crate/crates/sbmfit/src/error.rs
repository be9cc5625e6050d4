//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by model construction, estimation and evaluation.
#[derive(Debug, Error)]
pub enum SbmError {
    /// A parameter fails its validity requirements (probabilities out of
    /// range, empty lists, mismatched lengths, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// An exact-enumeration routine was asked for an instance above its
    /// hard size guard.
    #[error("instance too large: {0}")]
    Capacity(String),

    /// Two inputs that must agree in shape do not.
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    /// Inputs are individually valid but mutually inconsistent
    /// (e.g. a label outside the block matrix range).
    #[error("inconsistent inputs: {0}")]
    Consistency(String),

    /// A numerical routine failed to converge or produced non-finite values.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// An evaluation metric is undefined on the given input
    /// (no positives, empty denominator, ...).
    #[error("degenerate evaluation: {0}")]
    DegenerateEvaluation(String),

    /// A text input could not be parsed.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, SbmError>;
