use std::path::{Path, PathBuf};

use texbank_core::TexError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("config: {0}")]
    Config(String),
    #[error("{0}")]
    Data(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] TexError),
    #[error("sample {id}: {source}")]
    Sample { id: String, source: Box<CliError> },
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

impl CliError {
    /// 0 success, 1 usage or configuration, 2 data, 3 I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) => 1,
            CliError::Data(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Core(e) => match e {
                TexError::Io { .. } => 3,
                TexError::Config(_) => 1,
                _ => 2,
            },
            CliError::Sample { source, .. } => source.exit_code(),
        }
    }

    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io { path: path.to_path_buf(), source }
    }

    pub(crate) fn csv(path: &Path, e: csv::Error) -> Self {
        if e.is_io_error() {
            match e.into_kind() {
                csv::ErrorKind::Io(source) => CliError::io(path, source),
                _ => unreachable!(),
            }
        } else {
            CliError::Data(format!("{}: {e}", path.display()))
        }
    }

    pub(crate) fn for_sample(self, id: &str) -> Self {
        CliError::Sample { id: id.to_string(), source: Box::new(self) }
    }
}
