use thiserror::Error;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Core(#[from] ambistop_core::Error),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("{fraction:.3} of paths hit the horizon before stopping (limit {limit})")]
    ExcessTruncation { fraction: f64, limit: f64 },
    #[error("start z = {z} lies in the stopping region")]
    StartInStoppingRegion { z: f64 },
}

pub type Result<T> = std::result::Result<T, VerifyError>;
