//! Error type shared by every module in this crate.
//!
//! Validation problems (bad dimensions, unusable inputs) and numerical
//! problems (singular matrices, resolution limits, runaway sizes) are kept
//! as separate variants so callers can map them to distinct exit codes.

use thiserror::Error;

/// Errors produced by the transform, point-set and detection routines.
#[derive(Debug, Error)]
pub enum CoreError {
    /// Two objects that must share a dimension do not.
    #[error("dimension mismatch: {context} (expected {expected}, got {got})")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        got: usize,
    },

    /// A matrix that must be invertible is singular or numerically unusable.
    #[error("singular matrix in {context}: |det| = {det:.3e} (threshold {tol:.3e})")]
    SingularMatrix {
        context: &'static str,
        det: f64,
        tol: f64,
    },

    /// An input collection is empty or too small for the requested operation.
    #[error("not enough data for {context}: need at least {need}, got {got}")]
    TooFewPoints {
        context: &'static str,
        need: usize,
        got: usize,
    },

    /// A window in a gap profile contains no points.
    #[error("empty window at radius {radius} in gap profile")]
    EmptyWindow { radius: f64 },

    /// An enumeration would exceed the configured atom/point cap.
    #[error("{context} would produce {count} items, above the cap of {cap}")]
    CapExceeded {
        context: &'static str,
        count: usize,
        cap: usize,
    },

    /// A grid or signal cannot resolve the requested structure.
    #[error("resolution violation: {0}")]
    ResolutionViolation(String),

    /// A structural hypothesis (matrix shape, measure order) does not hold.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A parameter is outside its documented range.
    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    /// An internal mathematical identity failed beyond tolerance.
    #[error("property violation: {0}")]
    PropertyViolation(String),

    /// Serialization or file I/O failed.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// JSON (de)serialization failed.
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl CoreError {
    /// True for errors that indicate bad input rather than numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            CoreError::DimensionMismatch { .. }
                | CoreError::TooFewPoints { .. }
                | CoreError::InvalidParam(_)
                | CoreError::ShapeMismatch(_)
                | CoreError::Json(_)
        )
    }
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, CoreError>;
