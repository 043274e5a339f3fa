use serde_json::json;

/// Failure of a CLI run, classified by exit status.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Unreadable or invalid configuration (exit 2).
    #[error("config error{}: {message}", key.as_ref().map(|k| format!(" in `{k}`")).unwrap_or_default())]
    Config {
        key: Option<String>,
        message: String,
    },
    /// A computation failed (exit 3).
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// Writing artifacts failed (exit 1).
    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config {
            key: Some(key.into()),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }

    /// Single-line JSON report for stderr.
    pub fn to_json(&self) -> serde_json::Value {
        let (kind, key) = match self {
            CliError::Config { key, .. } => ("config", key.clone()),
            CliError::Numerical(_) => ("numerical", None),
            CliError::Io(_) => ("io", None),
        };
        json!({
            "error": {
                "kind": kind,
                "key": key,
                "message": self.to_string(),
                "exit_code": self.exit_code(),
            }
        })
    }
}

impl From<qpulse_core::Error> for CliError {
    fn from(e: qpulse_core::Error) -> Self {
        match e {
            qpulse_core::Error::InvalidParameter { name, reason } => CliError::Config {
                key: Some(name),
                message: reason,
            },
            qpulse_core::Error::Nyquist { .. } => CliError::Config {
                key: None,
                message: e.to_string(),
            },
            other => CliError::Numerical(other.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
