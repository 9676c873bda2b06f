use std::io;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("singular input: {0}")]
    SingularInput(String),

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    /// A single malformed line or value in a config file.
    #[error("line {line}: key `{key}`: {message}")]
    Parse {
        line: usize,
        key: String,
        message: String,
    },

    #[error("missing required keys: {}", .0.join(", "))]
    MissingKeys(Vec<String>),

    #[error("snapshot format error: {0}")]
    Format(String),

    #[error("numerical blow-up at step {step} (z = {z:e} m)")]
    NumericalBlowup { step: usize, z: f64 },

    #[error("fit failed after {iterations} iterations (rms residual {rms:e}): {reason}")]
    FitFailure {
        reason: String,
        iterations: usize,
        rms: f64,
        last: Vec<f64>,
    },

    #[error("measurement failed at k = {k_perp:e} 1/m: {reason}")]
    MeasurementFailure { k_perp: f64, reason: String },

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidArgument(_)
            | Error::InvalidConfiguration(_)
            | Error::Parse { .. }
            | Error::MissingKeys(_) => 2,
            Error::SingularInput(_) | Error::NumericalBlowup { .. } => 3,
            Error::FitFailure { .. } | Error::MeasurementFailure { .. } => 4,
            Error::Format(_) | Error::Io(_) => 1,
        }
    }
}
