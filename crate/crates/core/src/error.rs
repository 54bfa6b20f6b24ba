use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("domain error: {0}")]
    Domain(String),

    /// Zero variance or too few samples for the requested statistic.
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("non-finite value {0} in data stream")]
    NonFinite(f64),

    #[error("resource exhausted: {0}")]
    Resource(String),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
