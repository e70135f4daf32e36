use std::path::PathBuf;

use resonant::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error in `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error("cannot read {path}: {source}")]
    Input {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("cannot write {path}: {source}")]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Core(#[from] CoreError),
}

impl CliError {
    pub fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Process exit status; 2 is reserved for command-line usage errors.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config { .. } | CliError::Input { .. } => 3,
            CliError::Output { .. } => 7,
            CliError::Core(e) => match e {
                CoreError::InvalidParameter { .. }
                | CoreError::DimensionMismatch { .. }
                | CoreError::Json(_) => 3,
                CoreError::Capacity { .. } => 4,
                CoreError::Unresolvable { .. }
                | CoreError::Ambiguous { .. }
                | CoreError::BandCollision { .. }
                | CoreError::UnsupportedGate { .. } => 5,
                CoreError::NotNormalized { .. }
                | CoreError::OutsideSchedule { .. }
                | CoreError::StepUnderflow { .. }
                | CoreError::NonFinite { .. } => 6,
                CoreError::Io(_) | CoreError::Csv(_) => 7,
            },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
