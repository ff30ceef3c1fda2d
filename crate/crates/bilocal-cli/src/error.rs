//! Error type mapping failures onto the fixed exit codes: 0 success,
//! 2 usage/parse error, 3 constraint violation.

use thiserror::Error;

/// A command failure with its exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, unreadable or malformed files, out-of-range parameters.
    #[error("{0}")]
    Usage(String),
    /// A measurement strategy violated its constraints.
    #[error("constraint violation: {0}")]
    Constraint(String),
}

impl CliError {
    /// Process exit code for this failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Constraint(_) => 3,
        }
    }

    pub(crate) fn usage(err: impl std::fmt::Display) -> Self {
        CliError::Usage(err.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(err: std::io::Error) -> Self {
        CliError::Usage(err.to_string())
    }
}
