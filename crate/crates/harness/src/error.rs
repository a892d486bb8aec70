use std::path::{Path, PathBuf};

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("config error: {0}")]
    Config(String),
    #[error("numerical abort: {0}")]
    Numerical(String),
    #[error("I/O error at {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl HarnessError {
    /// Process exit status for this failure class.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) => 2,
            HarnessError::Numerical(_) => 3,
            HarnessError::Io { .. } => 4,
        }
    }

    pub fn io(path: &Path, source: std::io::Error) -> Self {
        HarnessError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

impl From<dnls_core::Error> for HarnessError {
    fn from(e: dnls_core::Error) -> Self {
        use dnls_core::Error as E;
        match e {
            E::NotPowerOfTwo(_)
            | E::InvalidGrid(_)
            | E::InvalidParameter(_)
            | E::Aliasing(_)
            | E::SpacingTooCoarse { .. } => HarnessError::Config(e.to_string()),
            E::LengthMismatch { .. } | E::NonFinite(_) | E::GridMismatch(_) | E::Blowup { .. } => {
                HarnessError::Numerical(e.to_string())
            }
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
