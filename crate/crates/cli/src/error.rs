use std::path::PathBuf;

use sgnp_core::{GeneratorError, InstanceError, SolverError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: {message}", path.display())]
    Config { path: PathBuf, message: String },
    #[error("{}: {source}", path.display())]
    Instance { path: PathBuf, source: InstanceError },
    #[error(transparent)]
    Generator(#[from] GeneratorError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}
