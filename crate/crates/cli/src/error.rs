use mcdl_core::Error;

/// A failed command, tagged with its process exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// A report ran to completion but one of its bound checks failed.
    #[error("{0}")]
    CheckFailed(String),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    InvalidDesign(String),
    #[error("{0}")]
    PartitionInfeasible(String),
    #[error("{0}")]
    DimensionMismatch(String),
    #[error("{0}")]
    GateFailed(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::CheckFailed(_) => 1,
            CliError::Usage(_) => 2,
            CliError::InvalidDesign(_) => 3,
            CliError::PartitionInfeasible(_) => 4,
            CliError::DimensionMismatch(_) => 5,
            CliError::GateFailed(_) => 6,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let message = e.to_string();
        match e {
            Error::DimensionMismatch { .. } => CliError::DimensionMismatch(message),
            Error::PartitionInfeasible { .. } => CliError::PartitionInfeasible(message),
            Error::InvalidSize(_)
            | Error::InvalidPartitionSize(_)
            | Error::IncompatibleBinCount { .. }
            | Error::TooFewReplications { .. } => CliError::Usage(message),
            _ => CliError::InvalidDesign(message),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
