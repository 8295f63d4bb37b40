use thiserror::Error;

#[derive(Error, Debug)]
pub enum KalmanError {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The innovation covariance slice for this batch index failed its
    /// positive-definite factorization. Usually a modeling error (zero
    /// measurement noise with redundant rows); regularize via the noise spec.
    #[error("innovation covariance slice {slice} is not positive definite")]
    SingularInnovation { slice: usize },

    #[error("dense size of {required} elements exceeds budget of {budget}")]
    BudgetExceeded { required: usize, budget: usize },

    #[error(transparent)]
    Train(#[from] tt_core::TTError),

    #[error("linear algebra backend: {0}")]
    Backend(#[from] ndarray_linalg::error::LinalgError),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("invalid dump: {0}")]
    InvalidDump(String),
}

pub type Result<T> = std::result::Result<T, KalmanError>;
