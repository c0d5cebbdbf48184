use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A caller-supplied argument is outside the operation's domain.
    #[error("invalid argument: {0}")]
    Argument(String),

    /// A numeric input was NaN or infinite where a finite value is required.
    #[error("domain error: {0}")]
    Domain(String),

    /// The sample carries no information about the quantity being estimated.
    #[error("degenerate sample: {0}")]
    Degenerate(String),

    /// The operation was called with a configuration it does not implement.
    #[error("contract violation: {0}")]
    Contract(String),

    /// A tabular input does not conform to its schema.
    #[error("line {line}: {message}")]
    Schema { line: u64, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn schema(line: u64, msg: impl Into<String>) -> Self {
        Error::Schema {
            line,
            message: msg.into(),
        }
    }
}
