use thiserror::Error;

/// Failures of a CLI run, each mapped to an exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] almsq_core::Error),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("regression mismatch: {0}")]
    Regression(String),
}

impl CliError {
    /// 2 invalid config, 3 infeasible scale, 4 precision failure, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(almsq_core::Error::PrecisionExhausted(_)) => 4,
            CliError::Core(e) if e.is_infeasible() => 3,
            CliError::Core(_) => 2,
            CliError::Io(_) | CliError::Regression(_) => 1,
        }
    }
}
