use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input data violated a precondition (non-finite coordinates and similar).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Two points or a point and a mapping disagree on dimension.
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// A scheme or schedule parameter is outside its admissible range.
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// A check was requested on data that cannot support it.
    #[error("not applicable: {0}")]
    NotApplicable(String),

    /// A problem definition could not be parsed into a mapping.
    #[error("parse error: {0}")]
    Parse(String),

    /// A problem parsed but failed validation of its declared class or fixed points.
    #[error("load error: {0}")]
    Load(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
