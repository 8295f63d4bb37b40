use thiserror::Error;

#[derive(Error, Debug)]
pub enum SimError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("time index {t} out of range (stream has {len} samples)")]
    TimeOutOfRange { t: usize, len: usize },

    #[error("malformed CSV at line {line}: {reason}")]
    Csv { line: usize, reason: String },

    #[error(transparent)]
    Convert(#[from] krp_convert::ConvertError),

    #[error(transparent)]
    Train(#[from] tt_core::TTError),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, SimError>;
