use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by frame construction, reconstruction, and the
/// experiment harness.
#[derive(Debug, Error)]
pub enum FrameError {
    /// A vector or coefficient sequence has the wrong length.
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    /// The vectors do not span: the smallest eigenvalue of the frame
    /// operator is not strictly positive (relative to the largest).
    #[error("not a frame: smallest frame-operator eigenvalue {min_eigenvalue:e} is below the positive-definiteness tolerance (largest {max_eigenvalue:e})")]
    NotAFrame {
        min_eigenvalue: f64,
        max_eigenvalue: f64,
    },

    /// A non-finite value (NaN or infinity) was encountered.
    #[error("non-finite value in {context}")]
    NonFinite { context: &'static str },

    /// The saturated solver's active index set became empty; the
    /// reconstruction guarantee no longer applies.
    #[error("active index set is empty at iteration {iteration}; saturated reconstruction stalled")]
    StalledActiveSet { iteration: usize },

    /// A greedy step produced a nonpositive relaxation parameter. The
    /// step formula guarantees a positive value for any nonzero
    /// residual, so this indicates an internal inconsistency.
    #[error("internal error: greedy step size {alpha} is not positive")]
    NonPositiveStep { alpha: f64 },

    /// A caller-supplied parameter is out of range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// File I/O failed.
    #[error("I/O failure at {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },

    /// A frame file could not be parsed.
    #[error("parse failure at {path} (line {line}): {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, FrameError>;
