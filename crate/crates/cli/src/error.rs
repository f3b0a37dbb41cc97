use std::path::PathBuf;

use chiral_ladder_core::{ModelError, SolveError, SpectraError};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("config error: {}", .0.join("; "))]
    Config(Vec<String>),
    #[error("solver error{}: {source}", at(*.delta, *.spacing))]
    Solve {
        delta: Option<f64>,
        spacing: Option<f64>,
        source: SolveError,
    },
    #[error("i/o error on {}: {source}", .path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

fn at(delta: Option<f64>, spacing: Option<f64>) -> String {
    match (delta, spacing) {
        (Some(d), Some(l)) => format!(" at delta={d} Gamma0, L={l} nm"),
        (Some(d), None) => format!(" at delta={d} Gamma0"),
        (None, Some(l)) => format!(" at L={l} nm"),
        (None, None) => String::new(),
    }
}

impl CliError {
    /// 1 config or usage, 2 solver, 3 I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 1,
            CliError::Solve { .. } => 2,
            CliError::Io { .. } => 3,
        }
    }

    pub fn solve(source: SolveError) -> Self {
        CliError::Solve {
            delta: source.delta(),
            spacing: None,
            source,
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Config(errors) => {
                CliError::Config(errors.iter().map(ToString::to_string).collect())
            }
            ModelError::Ddi(e) => CliError::Config(vec![e.to_string()]),
        }
    }
}

impl From<SpectraError> for CliError {
    fn from(e: SpectraError) -> Self {
        match e {
            SpectraError::Model(e) => e.into(),
            SpectraError::Solve(e) => CliError::solve(e),
            other => CliError::Usage(other.to_string()),
        }
    }
}
