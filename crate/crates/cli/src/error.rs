use std::path::Path;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("{0}")]
    Schema(String),
    #[error("missing key `{0}`")]
    Missing(String),
    #[error("key `{key}`: expected {expected}")]
    WrongType { key: String, expected: String },
    #[error("key `{key}`: {message}")]
    Invalid { key: String, message: String },
    #[error("{module}: {message}")]
    Module { module: &'static str, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

impl CliError {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        }
    }

    pub fn module(module: &'static str, e: impl std::fmt::Display) -> Self {
        CliError::Module {
            module,
            message: e.to_string(),
        }
    }

    /// Category printed ahead of the message on stderr.
    pub fn category(&self) -> &'static str {
        match self {
            CliError::Parse { .. } => "config parse error",
            CliError::Schema(_) | CliError::Missing(_) | CliError::WrongType { .. } | CliError::Invalid { .. } => {
                "config error"
            }
            CliError::Module { .. } => "module error",
            CliError::Io { .. } => "io error",
        }
    }
}
