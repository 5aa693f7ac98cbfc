use std::path::PathBuf;

use crate::estimation::ArimaModel;

/// Errors produced by the modelling pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("degenerate series: {0}")]
    DegenerateSeries(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("degrees of freedom: lag {lag} must exceed fitted-parameter count {fitdf}")]
    DegreesOfFreedom { lag: usize, fitdf: usize },

    #[error("horizon {horizon} exceeds 10x the effective sample size ({n_effective})")]
    HorizonTooLong { horizon: usize, n_effective: usize },

    #[error("optimizer did not converge after {restarts} restarts (best -loglik {best_objective:.6})")]
    Convergence {
        restarts: usize,
        best_objective: f64,
        best: Box<ArimaModel>,
    },

    #[error("search failed, every candidate fit failed: {}", .causes.join("; "))]
    SearchFailure { causes: Vec<String> },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("data integrity: {0}")]
    DataIntegrity(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit status used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Convergence { .. } | Error::SearchFailure { .. } => 3,
            Error::Parse { .. } | Error::DataIntegrity(_) => 4,
            _ => 2,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
