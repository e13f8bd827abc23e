use std::path::PathBuf;

use bfamily_core::error::ErrorCategory;

/// Failures of the driver, each mapped to a process exit code.
#[derive(Debug, thiserror::Error)]
pub enum LabError {
    #[error("config key `{key}`: {message}")]
    Config { key: String, message: String },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("cannot parse config {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error(transparent)]
    Core(#[from] bfamily_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

pub type LabResult<T> = Result<T, LabError>;

impl LabError {
    pub fn config(key: &str, message: impl Into<String>) -> Self {
        LabError::Config {
            key: key.to_string(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        LabError::Io {
            path: path.into(),
            source,
        }
    }

    /// Exit status: 2 config, 3 breakdown, 4 blow-up, 5 under-resolution, 6 IO.
    pub fn exit_code(&self) -> i32 {
        match self {
            LabError::Config { .. } | LabError::UnknownKey(_) | LabError::Parse { .. } => 2,
            LabError::Core(e) => match e.category() {
                ErrorCategory::Config => 2,
                ErrorCategory::Breakdown => 3,
                ErrorCategory::BlowUp => 4,
                ErrorCategory::UnderResolution => 5,
            },
            LabError::Io { .. } | LabError::Format { .. } => 6,
        }
    }

    /// Short category name printed next to the message.
    pub fn category(&self) -> &'static str {
        match self.exit_code() {
            2 => "config",
            3 => "breakdown",
            4 => "blow-up",
            5 => "under-resolution",
            _ => "io",
        }
    }
}
