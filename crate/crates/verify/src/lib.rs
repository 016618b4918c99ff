//! Independent checks for `ambistop-core`: a finite-difference oracle for
//! the robust obstacle problem and Monte Carlo simulation of the worst-case
//! dynamics.

pub mod error;
pub mod mc;
pub mod pde;

pub use error::{Result, VerifyError};
pub use mc::{
    mc_exit_time, mc_martingale_check, mc_martingale_check_with, mc_value_check, simulate_worst_case, worst_case_policy,
    Ensemble, SimConfig, SimResult, MAX_TRUNCATION,
};
pub use pde::{pde_fixed_policy, pde_oracle, PdeConfig, PdeGrid};
