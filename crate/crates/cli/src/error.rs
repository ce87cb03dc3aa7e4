use std::io;
use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Malformed configuration file, with the position of the problem.
    #[error("{}:{line}:{column}: {message}", path.display())]
    Config {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{0}")]
    Usage(String),

    #[error("{context}: {source}")]
    Model { context: String, source: chainrisk::Error },

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

impl CliError {
    /// 2 for bad input, 3 for IO failures, 4 when the solver gives up.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } | CliError::Usage(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Model { source, .. } => match source {
                chainrisk::Error::NoConvergence { .. } => 4,
                chainrisk::Error::Io(_) => 3,
                _ => 2,
            },
        }
    }

    pub fn io(path: &Path, source: io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn model(context: impl Into<String>, source: chainrisk::Error) -> Self {
        CliError::Model {
            context: context.into(),
            source,
        }
    }

    pub fn json(path: &Path, e: serde_json::Error) -> Self {
        if e.is_io() {
            return CliError::io(path, e.into());
        }
        let full = e.to_string();
        let suffix = format!(" at line {} column {}", e.line(), e.column());
        CliError::Config {
            path: path.to_path_buf(),
            line: e.line(),
            column: e.column(),
            message: full.strip_suffix(&suffix).unwrap_or(&full).to_string(),
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
