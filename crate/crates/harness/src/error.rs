use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Core(#[from] zonoclt_core::Error),

    #[error("failed to write {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("serialization failed: {0}")]
    Json(#[from] serde_json::Error),

    #[error("thread pool: {0}")]
    ThreadPool(String),

    #[error(
        "{count} of {replications} draws were degenerate (> 0.1% cap); \
         suspect the generator or the linear algebra"
    )]
    DegenerateDraws { count: u64, replications: usize },
}

impl HarnessError {
    /// CLI exit code: 2 for invalid config, 3 for exceeded compute
    /// budgets, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::InvalidConfig(_) => 2,
            Self::Core(zonoclt_core::Error::BudgetExceeded { .. }) => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
