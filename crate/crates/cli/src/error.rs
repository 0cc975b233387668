use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: cannot parse config: {message}")]
    Parse { path: String, message: String },

    #[error("invalid configuration: {0}")]
    Validation(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("run failed: {0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Validation(_) => 1,
            CliError::Runtime(_) => 2,
            CliError::Io { .. } => 3,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Classifies a library error, prefixing it with the config field at fault.
    pub fn from_core(field: &str, err: caaoi::Error) -> Self {
        use caaoi::Error as E;
        let located = |msg: String| {
            if field.is_empty() || field == "system" {
                msg
            } else {
                format!("{field}: {msg}")
            }
        };
        match &err {
            E::NonConvergence { .. }
            | E::DegenerateEquation { .. }
            | E::MonotonicityViolation { .. }
            | E::NotThreshold { .. }
            | E::ZeroSlots => CliError::Runtime(located(err.to_string())),
            E::NonPositiveWeight { index, .. } => {
                CliError::Validation(located(format!("system[{index}].weight: {err}")))
            }
            E::ProbabilityOutOfRange { index, .. } => {
                CliError::Validation(located(format!("system[{index}].p: {err}")))
            }
            _ => CliError::Validation(located(err.to_string())),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
