use spin_dimer::DimerError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("infeasible schedule: {0}")]
    Infeasible(#[from] DimerError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("verification failed: {0}")]
    Verify(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verify(_) => 1,
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Infeasible(_) => 3,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
