use std::fmt;
use std::path::PathBuf;

use revdiff_core::OpticsError;

/// Failure of a CLI command, carrying its process exit code.
#[derive(Debug)]
pub enum CliError {
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
    Validation {
        field: String,
        message: String,
    },
    Runtime(String),
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse { .. } => 2,
            CliError::Validation { .. } => 3,
            CliError::Runtime(_) | CliError::Io { .. } => 4,
        }
    }

    pub fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Validation {
            field: field.into(),
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// Library errors raised while building a scenario are configuration
    /// problems; `field` names the config entry they stem from.
    pub fn from_setup(field: &str, err: OpticsError) -> Self {
        match err {
            OpticsError::UnequalPath { .. } => CliError::validation("z_o1 + z_o2", err.to_string()),
            OpticsError::Resolution { .. } => CliError::validation("grid.n_samples", err.to_string()),
            OpticsError::OverlappingApertures { .. } | OpticsError::RasterFormat(_) => {
                CliError::validation("object", err.to_string())
            }
            OpticsError::InvalidArgument(_) | OpticsError::DegenerateGeometry(_) => {
                CliError::validation(field, err.to_string())
            }
            other => CliError::Runtime(other.to_string()),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse { line, column, message } => {
                write!(f, "parse error at line {line}, column {column}: {message}")
            }
            CliError::Validation { field, message } => write!(f, "invalid config at `{field}`: {message}"),
            CliError::Runtime(msg) => write!(f, "runtime error: {msg}"),
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
        }
    }
}

impl std::error::Error for CliError {}

impl From<OpticsError> for CliError {
    fn from(err: OpticsError) -> Self {
        CliError::Runtime(err.to_string())
    }
}
