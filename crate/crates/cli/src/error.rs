use std::path::PathBuf;

use thiserror::Error;

pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_ESCAPE: u8 = 3;
pub const EXIT_NON_CONVERGENCE: u8 = 4;
pub const EXIT_IO: u8 = 5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] flyhop::Error),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        use flyhop::Error as E;
        match self {
            CliError::Core(E::EscapeViolation { .. }) => EXIT_ESCAPE,
            CliError::Core(E::NonConvergence { .. } | E::Numeric(_)) => EXIT_NON_CONVERGENCE,
            CliError::Core(_) | CliError::Config(_) => EXIT_VALIDATION,
            CliError::Io { .. } => EXIT_IO,
        }
    }
}
