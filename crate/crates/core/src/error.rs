use thiserror::Error;

pub type Result<T> = std::result::Result<T, LabError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    /// A scenario or parameter block violates one of its invariants.
    #[error("invalid configuration: field `{field}`: {reason}")]
    Config { field: &'static str, reason: String },

    /// Input outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A trade program cannot be executed under the participation cap.
    #[error("infeasible program: target {target:.2} exceeds max feasible value {max_feasible:.2}")]
    Infeasible { target: f64, max_feasible: f64 },

    /// Parameter out of the supported range of a computation.
    #[error("parameter error: {0}")]
    Parameter(String),

    /// Disclosure tape failed validation. `line` is 1-based in the source file.
    #[error("tape error at line {line}: {reason}")]
    Tape { line: u64, reason: String },

    #[error("empty tape")]
    EmptyTape,

    #[error("io error: {0}")]
    Io(String),
}

impl LabError {
    pub fn config(field: &'static str, reason: impl Into<String>) -> Self {
        LabError::Config {
            field,
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for LabError {
    fn from(e: std::io::Error) -> Self {
        LabError::Io(e.to_string())
    }
}
