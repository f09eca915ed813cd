use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error at `{path}`: {reason}")]
    Config { path: String, reason: String },
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid JSON in {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error(transparent)]
    Sim(#[from] tlsim::Error),
    #[error("unknown figure `{0}` (expected fig1..fig8)")]
    UnknownFigure(String),
}

pub type Result<T> = std::result::Result<T, CliError>;

pub(crate) fn config(path: impl Into<String>, reason: impl Into<String>) -> CliError {
    CliError::Config {
        path: path.into(),
        reason: reason.into(),
    }
}

pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
    let path = path.into();
    move |source| CliError::Io { path, source }
}
