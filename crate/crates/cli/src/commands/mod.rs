pub mod exit_time;
pub mod figure;
pub mod solve;
pub mod verify;

use std::io::Write;
use std::path::Path;

use ambistop_core::{
    solve, solve_compound, solve_digital, solve_floor, solve_straddle, ModelParams, Payoff, PayoffKind, Solution,
};
use serde::Serialize;

use crate::csv::num;
use crate::error::{io_err, Result};

/// Uses the closed form where one exists.
pub fn solve_payoff(payoff: &Payoff, params: &ModelParams) -> Result<Solution> {
    Ok(match *payoff.kind() {
        PayoffKind::Compound { k, m } => solve_compound(k, m, params)?,
        PayoffKind::Floor => solve_floor(params)?,
        PayoffKind::Straddle => solve_straddle(params)?,
        PayoffKind::Digital { k } => solve_digital(k, params)?,
        _ => solve(payoff, params)?,
    })
}

/// Writes to `path`, or stdout when absent.
pub fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(io_err(p)),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(io_err("<stdout>")),
    }
}

pub fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report types serialise") + "\n"
}

pub fn params_line(p: &ModelParams) -> String {
    format!(
        "mu_x={} mu_y={} sigma_x={} sigma_y={} r={} kappa={}",
        num(p.mu_x),
        num(p.mu_y),
        num(p.sigma_x),
        num(p.sigma_y),
        num(p.r),
        num(p.kappa)
    )
}

pub fn payoff_label(p: &Payoff) -> String {
    match *p.kind() {
        PayoffKind::Compound { k, m } => format!("compound(K={},M={})", num(k), num(m)),
        PayoffKind::Digital { k } => format!("digital(k={})", num(k)),
        PayoffKind::ExchangeCall { k } => format!("exchange-call(k={})", num(k)),
        PayoffKind::ExchangePut { k } => format!("exchange-put(k={})", num(k)),
        _ => p.name(),
    }
}

pub fn run_header(what: &str) -> String {
    format!("ambistop {} {what}", env!("CARGO_PKG_VERSION"))
}
