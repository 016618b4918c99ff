#![allow(dead_code)]

use ambistop_core::{solve_compound, solve_digital, solve_floor, solve_straddle, ModelParams, Payoff, Solution};

pub fn fig1(kappa: f64) -> ModelParams {
    ModelParams::new(0.035, 0.035, 0.1, 0.1, 0.0351, kappa).unwrap()
}

pub fn fig3_floor(kappa: f64) -> ModelParams {
    ModelParams::new(0.02, 0.04, 0.05, 0.1, 0.05, kappa).unwrap()
}

pub fn fig3_straddle(kappa: f64) -> ModelParams {
    ModelParams::new(0.025, 0.03, 0.075, 0.1, 0.035, kappa).unwrap()
}

pub fn fig5(kappa: f64) -> ModelParams {
    ModelParams::new(0.02, 0.04, 0.05, 0.1, 0.041, kappa).unwrap()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

/// The four built-in payoffs with their reference parameter families.
pub fn families() -> Vec<(&'static str, Payoff, fn(f64) -> Solution)> {
    vec![
        ("compound", Payoff::compound(1.0, 2.0).unwrap(), |k| solve_compound(1.0, 2.0, &fig1(k)).unwrap()),
        ("floor", Payoff::floor(), |k| solve_floor(&fig3_floor(k)).unwrap()),
        ("straddle", Payoff::straddle(), |k| solve_straddle(&fig3_straddle(k)).unwrap()),
        ("digital", Payoff::digital(0.85).unwrap(), |k| solve_digital(0.85, &fig5(k)).unwrap()),
    ]
}

/// Reference ambiguity level for each family.
pub fn reference_kappa(name: &str) -> f64 {
    match name {
        "compound" => 0.3,
        "floor" => 0.1,
        "straddle" => 0.05,
        _ => 0.28,
    }
}
