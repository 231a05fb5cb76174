use std::io;
use std::path::PathBuf;

use gaussian_complexity_core::{Error, ErrorClass};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),

    #[error("cannot access {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },

    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },

    #[error("{0}")]
    InvalidSpec(String),

    #[error("{0}")]
    InvalidConfig(String),

    #[error("{0}")]
    Usage(String),

    #[error("cannot write output: {0}")]
    Output(#[source] io::Error),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CliError::Core(e) => e.name(),
            CliError::Io { .. } => "Io",
            CliError::Parse { .. } => "Parse",
            CliError::InvalidSpec(_) => "InvalidSpec",
            CliError::InvalidConfig(_) => "InvalidConfig",
            CliError::Usage(_) => "Usage",
            CliError::Output(_) => "Output",
        }
    }

    /// 2 for numerical-domain failures, 3 for invalid input, 4 when the
    /// oracle did not converge.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) => match e.class() {
                ErrorClass::NumericDomain => 2,
                ErrorClass::Validation => 3,
                ErrorClass::NoConvergence => 4,
            },
            CliError::Output(_) => 1,
            _ => 3,
        }
    }

    /// Extra numeric fields carried into the error JSON.
    pub fn details(&self) -> Vec<(&'static str, f64)> {
        match self {
            CliError::Core(Error::NoConvergence {
                best_length,
                residual,
            }) => vec![("best_length", *best_length), ("residual", *residual)],
            _ => Vec::new(),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
