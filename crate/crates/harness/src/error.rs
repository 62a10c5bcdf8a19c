use std::process::ExitCode;

use thiserror::Error;

/// Harness failures, each mapped to a process exit code.
#[derive(Debug, Error)]
pub enum HarnessError {
    /// Bad input: config, flags, parameters or caps. Exit code 2.
    #[error("{0}")]
    Validation(String),
    /// The run completed but a checked guarantee failed. Exit code 3.
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    /// Any other library error. Exit code 1.
    #[error(transparent)]
    Core(symtest_core::Error),
}

impl From<symtest_core::Error> for HarnessError {
    fn from(e: symtest_core::Error) -> Self {
        use symtest_core::Error as E;
        match e {
            E::InvalidParameter(_)
            | E::Parse(_)
            | E::DomainMismatch(_)
            | E::TooLargeForEnumeration { .. }
            | E::CapExceeded { .. }
            | E::NotGranular(_)
            | E::EmptyProperty => HarnessError::Validation(e.to_string()),
            other => HarnessError::Core(other),
        }
    }
}

impl HarnessError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            HarnessError::Validation(_) => ExitCode::from(2),
            HarnessError::Verification(_) => ExitCode::from(3),
            HarnessError::Io(_) | HarnessError::Core(_) => ExitCode::from(1),
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
