use thiserror::Error;

use qwalk_core::WalkError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),

    #[error("{message}{}", seed.map(|s| format!(" [seed {s}]")).unwrap_or_default())]
    Numerical { message: String, seed: Option<u64> },

    #[error("{0}")]
    Gate(String),

    #[error("cannot write {path}: {reason}")]
    Io { path: String, reason: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 1,
            CliError::Numerical { .. } => 2,
            CliError::Gate(_) => 3,
        }
    }

    /// Parameter errors are the caller's; everything else is numerical.
    pub fn from_walk(e: WalkError, seed: Option<u64>) -> Self {
        match e {
            WalkError::InvalidParameter(_) | WalkError::UnsupportedCase(_) => CliError::Usage(e.to_string()),
            WalkError::Realization { seed: s, .. } => CliError::Numerical { message: e.to_string(), seed: Some(s) },
            other => CliError::Numerical { message: other.to_string(), seed },
        }
    }
}
