use std::path::PathBuf;

use evoipd_core::dsl::SetError;

/// Process exit statuses.
pub mod exit {
    pub const OK: u8 = 0;
    pub const USAGE: u8 = 2;
    pub const INPUT: u8 = 3;
    pub const INTERNAL: u8 = 4;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{}: column `{column}`: {detail}", file.display())]
    Schema { file: PathBuf, column: String, detail: String },
    #[error(transparent)]
    Set(#[from] SetError),
    #[error("{0}")]
    Input(String),
    #[error("internal error: {0}")]
    Internal(String),
    /// Several independent failures; the batch finished the rest.
    #[error("{} failure(s):\n{}", .0.len(), .0.iter().map(|e| format!("  {e}")).collect::<Vec<_>>().join("\n"))]
    Batch(Vec<CliError>),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }

    pub fn schema(file: impl Into<PathBuf>, column: &str, detail: impl Into<String>) -> Self {
        CliError::Schema { file: file.into(), column: column.to_string(), detail: detail.into() }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io { .. } | CliError::Schema { .. } => exit::USAGE,
            CliError::Set(e) => match e {
                SetError::MissingMeta { .. } | SetError::BadMeta { .. } | SetError::Io { .. } => exit::USAGE,
                _ => exit::INPUT,
            },
            CliError::Input(_) => exit::INPUT,
            CliError::Internal(_) => exit::INTERNAL,
            CliError::Batch(errors) => errors.iter().map(CliError::exit_code).max().unwrap_or(exit::INTERNAL),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
