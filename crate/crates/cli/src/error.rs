use std::path::PathBuf;

use qcf_core::Error;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] Error),
    #[error("cannot write {}: {source}", .path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Core(
                Error::InvalidConfig(_)
                | Error::InvalidArgument(_)
                | Error::InvalidInterval { .. }
                | Error::UnsupportedObservable(_),
            ) => 2,
            CliError::Core(_) => 3,
        }
    }
}
