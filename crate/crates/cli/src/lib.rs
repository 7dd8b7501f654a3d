//! Experiment harness for the `gridrecov` command-line tool: error sweeps,
//! CSV and SVG reports, and the acceptance checks.

pub mod acceptance;
pub mod experiment;
pub mod report;

use std::path::PathBuf;

use thiserror::Error;

pub use experiment::{
    predict, run_algorithm, run_experiment, AdversaryKind, Algorithm, ErrorRow, ErrorTable, ExperimentConfig, TruthKind,
};
pub use report::{emit_csv, emit_plot, table_csv, table_svg};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("{algorithm} failed: {source}")]
    Algorithm {
        algorithm: Algorithm,
        source: gridrecov_core::Error,
    },

    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error(transparent)]
    Core(#[from] gridrecov_core::Error),

    #[error("{0}")]
    Failed(String),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn algorithm(algorithm: Algorithm, source: gridrecov_core::Error) -> Self {
        CliError::Algorithm { algorithm, source }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn is_capacity(&self) -> bool {
        match self {
            CliError::Capacity(_) => true,
            CliError::Algorithm { source, .. } | CliError::Core(source) => source.is_capacity(),
            _ => false,
        }
    }

    /// 3 for capacity errors, 2 for invalid input, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        if self.is_capacity() {
            3
        } else {
            match self {
                CliError::Config(_) | CliError::Algorithm { .. } | CliError::Core(_) => 2,
                _ => 1,
            }
        }
    }
}
