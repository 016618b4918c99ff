use std::path::PathBuf;

use ambistop_core::Error as CoreError;
use ambistop_verify::VerifyError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Missing or malformed command-line input; usage text is printed alongside.
    #[error("{0}")]
    Usage(String),

    #[error("{0}")]
    Config(String),

    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error(transparent)]
    Verify(#[from] VerifyError),

    #[error("{0}")]
    Numeric(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) | CliError::Config(_) | CliError::Io { .. } => 2,
            CliError::Core(e) => core_code(e),
            CliError::Verify(e) => match e {
                VerifyError::Core(e) => core_code(e),
                VerifyError::InvalidConfig(_) | VerifyError::StartInStoppingRegion { .. } => 2,
                VerifyError::NoConvergence { .. } | VerifyError::ExcessTruncation { .. } => 3,
            },
            CliError::Numeric(_) => 3,
        }
    }

    pub fn shows_usage(&self) -> bool {
        matches!(self, CliError::Usage(_))
    }
}

fn core_code(e: &CoreError) -> u8 {
    match e {
        CoreError::SupremumNotAttained { .. }
        | CoreError::NoRootBracket
        | CoreError::RootBracketFailure(_)
        | CoreError::BranchUnavailable(_) => 3,
        _ => 2,
    }
}

pub type Result<T> = std::result::Result<T, CliError>;

pub fn io_err(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> CliError {
    let path = path.into();
    move |source| CliError::Io { path, source }
}
