use buyback_core::LabError;
use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const INFEASIBLE: i32 = 1;
    pub const USAGE_IO: i32 = 2;
    pub const VALIDATION: i32 = 3;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Lab(#[from] LabError),
    #[error("usage: {0}")]
    Usage(String),
    #[error("{path}: {reason}")]
    Io { path: String, reason: String },
}

impl CliError {
    pub fn io(path: &std::path::Path, e: impl std::fmt::Display) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            reason: e.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Lab(LabError::Infeasible { .. }) => exit::INFEASIBLE,
            CliError::Lab(LabError::Io(_)) | CliError::Usage(_) | CliError::Io { .. } => exit::USAGE_IO,
            CliError::Lab(_) => exit::VALIDATION,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
