//! Scale function, speed measure and expected exit times of the ratio
//! process `Z = X / Y` under the switching worst-case measure.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::extreal::ext_f64;
use crate::harmonic::switching_ratio;
use crate::params::{ModelParams, Regime, SolvabilityClass};
use crate::quadrature::integrate_split;
use crate::roots::characteristic_roots;

const LOG_SWITCH: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioDiffusion {
    pub params: ModelParams,
    pub c: f64,
    /// `+inf` in the two-branch case, where `Z` never enters the third regime.
    #[serde(with = "ext_f64")]
    pub l: f64,
    pub sigma_sq: f64,
    pub mu1: f64,
    pub mu2: f64,
    pub mu3: f64,
}

/// `int_a^b p w^e dw` for `0 < a <= b`.
fn power_integral(p: f64, e: f64, a: f64, b: f64) -> f64 {
    let q = e + 1.0;
    let log_ratio = (b / a).ln();
    if q.abs() < LOG_SWITCH {
        p * a.powf(q) * log_ratio
    } else {
        p * a.powf(q) * (q * log_ratio).exp_m1() / q
    }
}

impl RatioDiffusion {
    /// Diffusion for reference point `c`, with `l` taken from the model.
    pub fn new(params: &ModelParams, c: f64) -> Result<Self> {
        let l = match params.require_feasible()? {
            SolvabilityClass::ThreeBranch => switching_ratio(&characteristic_roots(params, Regime::A2)?),
            _ => f64::INFINITY,
        };
        Self::with_switch(params, c, l)
    }

    pub fn with_switch(params: &ModelParams, c: f64, l: f64) -> Result<Self> {
        params.check()?;
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::NonpositiveC(c));
        }
        if !(l >= 1.0) {
            return Err(Error::InvalidParams(format!("switching ratio must be at least 1, got {l}")));
        }
        let p = params;
        let base = p.mu_x - p.mu_y + p.sigma_y * p.sigma_y;
        Ok(RatioDiffusion {
            params: *p,
            c,
            l,
            sigma_sq: p.sigma_sq(),
            mu1: base + p.kappa * (p.sigma_x + p.sigma_y),
            mu2: base - p.kappa * (p.sigma_x - p.sigma_y),
            mu3: base - p.kappa * (p.sigma_x + p.sigma_y),
        })
    }

    pub fn switch_point(&self) -> f64 {
        self.l * self.c
    }

    /// Drift coefficient of `Z` (per unit `Z`) at state `z`.
    pub fn drift(&self, z: f64) -> f64 {
        match self.piece(z) {
            0 => self.mu1,
            1 => self.mu2,
            _ => self.mu3,
        }
    }

    fn piece(&self, z: f64) -> usize {
        if z < self.c {
            0
        } else if z < self.switch_point() {
            1
        } else {
            2
        }
    }

    /// `(prefactor, exponent)` of the scale density on piece `i`.
    fn density_piece(&self, i: usize) -> (f64, f64) {
        let s2 = self.sigma_sq;
        match i {
            0 => (1.0, -2.0 * self.mu1 / s2),
            1 => (self.c.powf(-2.0 * (self.mu1 - self.mu2) / s2), -2.0 * self.mu2 / s2),
            _ => (
                self.c.powf(-2.0 * (self.mu1 - self.mu3) / s2) * self.l.powf(-2.0 * (self.mu2 - self.mu3) / s2),
                -2.0 * self.mu3 / s2,
            ),
        }
    }

    pub fn scale_density(&self, z: f64) -> Result<f64> {
        if !(z > 0.0 && z.is_finite()) {
            return Err(Error::NonpositiveZ(z));
        }
        let (p, e) = self.density_piece(self.piece(z));
        Ok(p * z.powf(e))
    }

    pub fn speed_density(&self, z: f64) -> Result<f64> {
        let s = self.scale_density(z)?;
        Ok(2.0 / (self.sigma_sq * z * z * s))
    }

    /// `S(b) - S(a)` computed piecewise without cancellation.
    pub fn scale_between(&self, a: f64, b: f64) -> f64 {
        if b < a {
            return -self.scale_between(b, a);
        }
        let cuts = [self.c, self.switch_point()];
        let mut total = 0.0;
        let mut lo = a;
        for (i, &cut) in cuts.iter().enumerate() {
            if lo >= b {
                break;
            }
            if lo < cut {
                let hi = b.min(cut);
                let (p, e) = self.density_piece(i);
                total += power_integral(p, e, lo, hi);
                lo = hi;
            }
        }
        if lo < b {
            let (p, e) = self.density_piece(2);
            total += power_integral(p, e, lo, b);
        }
        total
    }

    /// Scale function anchored at `S(c) = 0`.
    pub fn scale(&self, z: f64) -> Result<f64> {
        if !(z > 0.0 && z.is_finite()) {
            return Err(Error::NonpositiveZ(z));
        }
        Ok(self.scale_between(self.c, z))
    }

    /// Green function of `Z` killed on leaving `(a, b)`.
    pub fn green(&self, a: f64, b: f64, x: f64, y: f64) -> f64 {
        let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
        self.scale_between(a, lo) * self.scale_between(hi, b) / self.scale_between(a, b)
    }

    /// `E_z[inf{t : Z_t not in (a, b)}]`.
    pub fn expected_exit_time(&self, a: f64, b: f64, z: f64) -> Result<f64> {
        if !(a > 0.0 && a < z && z < b && b.is_finite()) {
            return Err(Error::BadInterval { a, z, b });
        }
        let left = self.scale_between(a, z);
        let right = self.scale_between(z, b);
        let total = left + right;
        let two_over_s2 = 2.0 / self.sigma_sq;
        let integrand = |y: f64| {
            let (p, e) = self.density_piece(self.piece(y));
            let m = two_over_s2 / (y * y * p * y.powf(e));
            let g = if y <= z {
                self.scale_between(a, y) * right
            } else {
                left * self.scale_between(y, b)
            };
            g * m / total
        };
        Ok(integrate_split(integrand, a, b, &[self.c, self.switch_point(), z], 1e-10))
    }
}

pub fn expected_exit_time(d: &RatioDiffusion, a: f64, b: f64, z: f64) -> Result<f64> {
    d.expected_exit_time(a, b, z)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig5() -> ModelParams {
        ModelParams::new(0.02, 0.04, 0.05, 0.1, 0.041, 0.28).unwrap()
    }

    #[test]
    fn density_is_continuous_at_switches() {
        let d = RatioDiffusion::new(&fig5(), 0.9).unwrap();
        for z in [d.c, d.switch_point()] {
            let lo = d.scale_density(z * (1.0 - 1e-15)).unwrap();
            let hi = d.scale_density(z).unwrap();
            assert!((lo / hi - 1.0).abs() < 1e-12, "{lo} {hi}");
        }
    }

    #[test]
    fn scale_is_anchored_and_increasing() {
        let d = RatioDiffusion::new(&fig5(), 0.9).unwrap();
        assert_eq!(d.scale(0.9).unwrap(), 0.0);
        let mut prev = f64::NEG_INFINITY;
        for i in 0..60 {
            let z = 0.1 * 1.08f64.powi(i);
            let s = d.scale(z).unwrap();
            assert!(s > prev);
            prev = s;
        }
    }

    #[test]
    fn drifts_are_ordered() {
        let d = RatioDiffusion::new(&fig5(), 0.9).unwrap();
        assert!((d.mu1 - d.mu2 - 2.0 * 0.28 * 0.05).abs() < 1e-15);
        assert!((d.mu2 - d.mu3 - 2.0 * 0.28 * 0.1).abs() < 1e-15);
    }

    #[test]
    fn bad_interval_is_rejected() {
        let d = RatioDiffusion::new(&fig5(), 0.9).unwrap();
        assert!(matches!(d.expected_exit_time(0.5, 2.0, 0.5), Err(Error::BadInterval { .. })));
        assert!(matches!(d.expected_exit_time(2.0, 0.5, 1.0), Err(Error::BadInterval { .. })));
    }
}
