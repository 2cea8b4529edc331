use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error in `{key}`: {message}")]
    Config { key: String, message: String },
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("solver error: {0}")]
    Solver(#[from] panov_fv_core::Error),
    #[error("property failure: {0}")]
    Property(String),
}

impl CliError {
    pub fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status: 1 property failure, 2 configuration or file
    /// problem, 3 solver error.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Property(_) => 1,
            CliError::Config { .. } | CliError::Io { .. } => 2,
            CliError::Solver(_) => 3,
        }
    }
}
