use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid model parameters: {0}")]
    InvalidParams(String),

    #[error("discount rate r = {r} does not exceed the required bound {bound}")]
    InfeasibleDiscount { r: f64, bound: f64 },

    #[error("characteristic roots for {0} are not real for these parameters")]
    ComplexRoots(String),

    #[error("reference point c must be non-negative, got {0}")]
    NonpositiveC(f64),

    #[error("evaluation point must be positive, got {0}")]
    NonpositiveZ(f64),

    #[error("state (x, y) = ({x}, {y}) must be strictly positive")]
    NonpositiveState { x: f64, y: f64 },

    #[error("branch H{0} is not available for this harmonic function")]
    BranchUnavailable(u8),

    #[error("supremum of the payoff-to-harmonic ratio is not attained on {side}")]
    SupremumNotAttained { side: &'static str },

    #[error("no sign change of D(c) found and neither one-sided case applies")]
    NoRootBracket,

    #[error("strikes must satisfy M > K > 0 (K = {k}, M = {m})")]
    BadStrikes { k: f64, m: f64 },

    #[error("digital strike must lie in (0, 1), got {0}")]
    BadDigitalStrike(f64),

    #[error("exchange strike must be positive, got {0}")]
    BadExchangeStrike(f64),

    #[error("root bracketing failed: {0}")]
    RootBracketFailure(String),

    #[error("interval must satisfy 0 < a < z < b (a = {a}, z = {z}, b = {b})")]
    BadInterval { a: f64, z: f64, b: f64 },

    #[error("payoff `{0}` cannot be built from a configuration document")]
    UnsupportedPayoff(String),
}

pub type Result<T> = std::result::Result<T, Error>;
