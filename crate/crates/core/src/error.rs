use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input violated a precondition (length, alphabet, parameter range).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// An operation referenced state that does not exist yet.
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// A serialized artifact could not be decoded.
    #[error("format error at {location}: {message}")]
    Format { location: String, message: String },

    /// An internal consistency check failed.
    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn format(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Format {
            location: location.into(),
            message: message.into(),
        }
    }
}
