use std::process::ExitCode;

use thiserror::Error;

/// Command failure, split by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags or inputs; nothing has been written. Exit code 1.
    #[error("{0}")]
    Validation(String),
    /// Failure after work started. Exit code 2.
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(self.code())
    }

    pub fn code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Runtime(_) => 2,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub(crate) fn invalid(e: impl std::fmt::Display) -> CliError {
    CliError::Validation(e.to_string())
}

pub(crate) fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}
