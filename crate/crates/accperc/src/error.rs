use thiserror::Error;

/// Errors reported by solvers, samplers, and configuration parsing.
#[derive(Debug, Error)]
pub enum Error {
    /// A configuration value is outside its documented domain.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A computation would exceed an explicit size or memory budget.
    #[error("capacity exceeded: {0}")]
    Capacity(String),

    /// An adaptive numerical method could not reach its error target.
    #[error("accuracy target not reached: {0}")]
    Accuracy(String),

    /// Input data violates a structural precondition (for example a fitness
    /// assignment with duplicate values, or a non-increasing schedule).
    #[error("invalid input: {0}")]
    Input(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code for the command-line frontend: configuration and
    /// input errors exit with 2, capacity and accuracy errors with 3.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Input(_) | Error::Json(_) => 2,
            Error::Capacity(_) | Error::Accuracy(_) => 3,
            Error::Io(_) => 1,
        }
    }
}
