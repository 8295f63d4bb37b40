use thiserror::Error;

#[derive(Error, Debug)]
pub enum ConvertError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dense size of {required} elements exceeds budget of {budget}")]
    BudgetExceeded { required: usize, budget: usize },

    #[error(transparent)]
    Train(#[from] tt_core::TTError),

    #[error("linear algebra backend: {0}")]
    Backend(#[from] ndarray_linalg::error::LinalgError),
}

pub type Result<T> = std::result::Result<T, ConvertError>;
