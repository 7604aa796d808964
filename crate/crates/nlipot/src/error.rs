use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("grid mismatch: {0}")]
    Mismatch(String),
    #[error("non-finite value at flat index {0}")]
    NonFinite(usize),
    #[error("node {index} lies outside the Nyquist band on axis {axis}")]
    Nyquist { index: usize, axis: usize },
    #[error("field file: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}
