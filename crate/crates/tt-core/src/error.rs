use thiserror::Error;

/// Errors raised by tensor-train construction and arithmetic.
#[derive(Error, Debug)]
pub enum TTError {
    /// A core or network violates a structural invariant (rank chain,
    /// boundary ranks, kind constraints). The index names the offending core.
    #[error("structural error at core {index}: {reason}")]
    Structure { index: usize, reason: String },

    /// Two operands disagree on shape; the index names the offending core.
    #[error("shape mismatch at core {index}: {reason}")]
    ShapeMismatch { index: usize, reason: String },

    /// A dense materialization would exceed the caller-supplied budget.
    #[error("dense size of {required} elements exceeds budget of {budget}")]
    BudgetExceeded { required: usize, budget: usize },

    /// Invalid argument outside the core/shape system.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// Numeric failure reported at a specific batch slice (e.g. a singular
    /// matrix while scaling gain slices).
    #[error("numeric failure at batch slice {slice}: {reason}")]
    NumericAtSlice { slice: usize, reason: String },

    /// Failure inside the LAPACK-backed decomposition layer.
    #[error("linear algebra backend: {0}")]
    Backend(#[from] ndarray_linalg::error::LinalgError),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    /// Malformed binary dump.
    #[error("invalid dump: {0}")]
    InvalidDump(String),
}

pub type Result<T> = std::result::Result<T, TTError>;

impl TTError {
    pub(crate) fn structure(index: usize, reason: impl Into<String>) -> Self {
        TTError::Structure {
            index,
            reason: reason.into(),
        }
    }

    pub(crate) fn shape(index: usize, reason: impl Into<String>) -> Self {
        TTError::ShapeMismatch {
            index,
            reason: reason.into(),
        }
    }
}
