//! Top-level error of a run and its process exit code.

use crate::boundary::BoundaryError;
use crate::config::ConfigError;
use crate::hodograph::domain::DomainError;
use crate::hodograph::MarchError;
use crate::inversion::InversionError;
use crate::verify::residuals::ResidualError;
use std::path::PathBuf;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("boundary data: {0}")]
    Boundary(#[from] BoundaryError),
    #[error("determinate domain: {0}")]
    Domain(#[from] DomainError),
    #[error("hodograph march: {0}")]
    March(#[from] MarchError),
    #[error("inversion: {0}")]
    Inversion(#[from] InversionError),
    #[error("residual suite: {0}")]
    Residual(#[from] ResidualError),
    #[error("{path}: {message}")]
    Artifact { path: PathBuf, message: String },
    #[error("thread pool: {0}")]
    Threads(String),
}

/// Exit codes of the command-line tool.
pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_MONITOR: i32 = 3;
pub const EXIT_NUMERICAL: i32 = 4;

impl Error {
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => EXIT_CONFIG,
            Error::March(e) if e.is_monitor() => EXIT_MONITOR,
            _ => EXIT_NUMERICAL,
        }
    }

    pub(crate) fn artifact(path: impl Into<PathBuf>, message: impl ToString) -> Self {
        Error::Artifact { path: path.into(), message: message.to_string() }
    }
}
