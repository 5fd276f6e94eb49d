use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = TexError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum TexError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot decode {path}: {message}")]
    Format { path: PathBuf, message: String },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("size error: {0}")]
    Size(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("singular system: {0}")]
    Singular(String),
    #[error("duplicate feature name `{0}`")]
    NameCollision(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
}
