use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] motif_forge_core::Error),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse { path: PathBuf, line: usize, message: String },
    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("{0}")]
    Usage(String),
    #[error("invalid checkpoint {path}: {message}")]
    Checkpoint { path: PathBuf, message: String },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// 1 for IO, 2 for usage, 3 for numeric failures.
    pub fn exit_code(&self) -> i32 {
        use motif_forge_core::Error as C;
        match self {
            Error::Io { .. } => 1,
            Error::Core(C::NonFiniteGradient(_) | C::NonFiniteLoss { .. }) => 3,
            Error::Core(_) | Error::Usage(_) | Error::Parse { .. } | Error::Json { .. } | Error::Checkpoint { .. } => 2,
        }
    }
}
