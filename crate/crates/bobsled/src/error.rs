use std::io;
use std::path::{Path, PathBuf};

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {message}", path.display())]
    Config { path: PathBuf, message: String },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error("{context}: {message}")]
    Data { context: String, message: String },
    #[error("{context}: {source}")]
    Core {
        context: String,
        source: bobsled_core::Error,
    },
}

impl Error {
    /// 1 usage or configuration, 2 data, 3 numerical failure.
    pub fn exit_code(&self) -> u8 {
        use bobsled_core::Error as E;
        match self {
            Error::Usage(_) | Error::Config { .. } => 1,
            Error::Io { .. } | Error::Parse { .. } | Error::Data { .. } => 2,
            Error::Core { source, .. } => match source {
                E::RankDeficient | E::DegenerateWindow => 3,
                _ => 2,
            },
        }
    }

    pub fn io(path: impl AsRef<Path>, source: io::Error) -> Self {
        Error::Io {
            path: path.as_ref().to_path_buf(),
            source,
        }
    }

    pub fn config(path: impl AsRef<Path>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.as_ref().to_path_buf(),
            message: message.into(),
        }
    }

    pub fn parse(path: impl AsRef<Path>, line: u64, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.as_ref().to_path_buf(),
            line,
            message: message.into(),
        }
    }

    /// Reclassifies a parse failure in a configuration input.
    pub fn into_config(self) -> Self {
        match self {
            Error::Parse {
                path,
                line,
                message,
            } => Error::Config {
                path,
                message: format!("line {line}: {message}"),
            },
            other => other,
        }
    }

    pub fn data(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Data {
            context: context.into(),
            message: message.into(),
        }
    }
}

/// Attaches a context string to core results.
pub trait CoreContext<T> {
    fn context(self, context: impl Into<String>) -> Result<T>;
}

impl<T> CoreContext<T> for bobsled_core::Result<T> {
    fn context(self, context: impl Into<String>) -> Result<T> {
        self.map_err(|source| Error::Core {
            context: context.into(),
            source,
        })
    }
}
