use std::path::{Path, PathBuf};

use crate::config::ConfigError;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    /// A file was read but its contents are malformed.
    #[error("{}: {msg}", path.display())]
    Format { path: PathBuf, msg: String },
    #[error(transparent)]
    Core(#[from] qkdefect_core::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl AsRef<Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().to_path_buf(),
            source,
        }
    }

    pub fn format(path: impl AsRef<Path>, msg: impl ToString) -> Self {
        Error::Format {
            path: path.as_ref().to_path_buf(),
            msg: msg.to_string(),
        }
    }

    /// Process exit status: 2 for configuration or argument problems, 3 for
    /// IO and file-format problems, 4 when the requested size exceeds the
    /// simulator's capacity.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) => 2,
            Error::Io { .. } | Error::Format { .. } => 3,
            Error::Core(qkdefect_core::Error::Capacity { .. }) => 4,
            Error::Core(qkdefect_core::Error::Parse { .. }) => 3,
            Error::Core(_) => 2,
        }
    }
}
