#![allow(dead_code)]

use ambistop_core::ModelParams;
use proptest::prelude::*;

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

/// Parameters strictly inside the three-branch region.
pub fn three_branch() -> impl Strategy<Value = ModelParams> {
    (-0.05f64..0.1, -0.05f64..0.1, 0.05f64..0.4, 0.05f64..0.4, 0.0f64..0.5, 0.002f64..0.08).prop_map(
        |(mx, my, sx, sy, k, margin)| {
            let r = (mx - k * sx).max(my - k * sy) + margin;
            ModelParams::new(mx, my, sx, sy, r, k).unwrap()
        },
    )
}
