use std::path::PathBuf;

use thiserror::Error;

use crate::diagnostics::BpViolation;

/// Errors raised by model evaluations (admissibility, pressure, wave speeds).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("non-finite state {0:?}")]
    NonFinite(Vec<f64>),
    #[error("reference state {0:?} lies outside the admissible set")]
    InadmissibleReference(Vec<f64>),
    #[error("non-positive density {0}")]
    NonPositiveDensity(f64),
    #[error("non-positive pressure {0}")]
    NonPositivePressure(f64),
    #[error("specific heat ratio must exceed 1, got {0}")]
    InvalidGamma(f64),
}

/// Invalid experiment, geometry or boundary configuration.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("unknown experiment `{name}`; valid names: {}", valid.join(", "))]
    UnknownExperiment { name: String, valid: Vec<String> },
    #[error("config line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Invalid(String),
}

impl ConfigError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        ConfigError::Invalid(msg.into())
    }
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("bound-preservation violated: {0}")]
    Violation(Box<BpViolation>),
    #[error("step limit of {0} reached before the final time")]
    MaxSteps(usize),
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl SolverError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        SolverError::Io {
            path: path.into(),
            source,
        }
    }
}
