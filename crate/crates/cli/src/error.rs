use std::fmt::Display;

/// Errors that end a run, split by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad arguments or unreadable input; exit code 2.
    #[error("{0}")]
    Usage(String),
    /// The run itself could not complete; exit code 1.
    #[error("{0}")]
    Failure(String),
}

impl CliError {
    pub fn usage(msg: impl Display) -> Self {
        CliError::Usage(msg.to_string())
    }

    pub fn failure(msg: impl Display) -> Self {
        CliError::Failure(msg.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }
}

impl From<naqc::Error> for CliError {
    fn from(e: naqc::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}
