use std::path::Path;

use thiserror::Error;

/// CLI failures, grouped by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, bad config, or a missing prerequisite. Exit 2.
    #[error("{0}")]
    Usage(String),

    /// Input data failed validation. Exit 3.
    #[error("{0}")]
    Data(String),

    /// An internal check failed. Exit 4.
    #[error("{0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Data(_) => 3,
            CliError::Internal(_) => 4,
        }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        let msg = format!("{}: {err}", path.display());
        match err.kind() {
            std::io::ErrorKind::NotFound | std::io::ErrorKind::PermissionDenied => CliError::Usage(msg),
            _ => CliError::Data(msg),
        }
    }

    /// Prefixes the message with the input it concerns.
    pub fn context(self, what: impl std::fmt::Display) -> Self {
        match self {
            CliError::Usage(m) => CliError::Usage(format!("{what}: {m}")),
            CliError::Data(m) => CliError::Data(format!("{what}: {m}")),
            CliError::Internal(m) => CliError::Internal(format!("{what}: {m}")),
        }
    }
}

impl From<lcpk_core::Error> for CliError {
    fn from(err: lcpk_core::Error) -> Self {
        use lcpk_core::Error as E;
        match err {
            E::InvalidInput(_) | E::Format { .. } | E::Io(_) => CliError::Data(err.to_string()),
            E::InvalidState(_) => CliError::Usage(err.to_string()),
            E::Invariant(_) => CliError::Internal(err.to_string()),
        }
    }
}
