use std::path::PathBuf;

/// Errors of the file formats and the runner.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Core(#[from] rtm_core::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    /// Malformed configuration text.
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    /// Malformed or inconsistent data file.
    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }

    /// Process exit code: 2 for usage and configuration problems, 1 otherwise.
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Parse { .. } | Self::Io { .. } | Self::Core(rtm_core::Error::Config(_)) => 2,
            _ => 1,
        }
    }
}
