//! Characteristic roots of the regime ODEs and their volatility sensitivities.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::{GeneratorSigns, ModelParams, Regime};

/// Positive/negative root pair of `1/2 Sigma^2 a(a-1) + beta a - gamma = 0`
/// for one regime.
///
/// For `A1` and `A2` feasibility guarantees `psi > 0 > phi`. The `A3` pair
/// only needs `psi > 1 > phi`; `phi` is negative exactly when
/// `r > mu_y + kappa sigma_y` (see [`RegimeRoots::opposite_signs`]).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeRoots {
    pub psi: f64,
    pub phi: f64,
    pub regime: Regime,
}

impl RegimeRoots {
    pub fn opposite_signs(&self) -> bool {
        self.psi > 0.0 && self.phi < 0.0
    }

    /// Relative residual of both roots in their defining quadratic.
    pub fn residual(&self, p: &ModelParams) -> f64 {
        let (beta, gamma) = self.regime.coefficients(p);
        let s2 = p.sigma_sq();
        let q = |a: f64| 0.5 * s2 * a * (a - 1.0) + beta * a - gamma;
        let scale = |a: f64| (0.5 * s2 * a * a).abs() + (0.5 * s2 * a).abs() + (beta * a).abs() + gamma.abs();
        (q(self.psi) / scale(self.psi)).abs().max((q(self.phi) / scale(self.phi)).abs())
    }
}

/// Roots `(larger, smaller)` of `1/2 s2 a^2 + (beta - 1/2 s2) a - gamma = 0`.
///
/// The larger-magnitude root comes from the quadratic formula without
/// cancellation, the other from the product of roots.
pub fn quadratic_roots(sigma_sq: f64, beta: f64, gamma: f64) -> Option<(f64, f64)> {
    let a = 0.5 * sigma_sq;
    let b = beta - 0.5 * sigma_sq;
    let c = -gamma;
    let disc = b * b - 4.0 * a * c;
    if !(disc >= 0.0) || a <= 0.0 {
        return None;
    }
    let sq = disc.sqrt();
    let q = -0.5 * (b + if b >= 0.0 { sq } else { -sq });
    if q == 0.0 {
        return Some((0.0, 0.0));
    }
    let r1 = q / a;
    let r2 = c / q;
    Some(if r1 >= r2 { (r1, r2) } else { (r2, r1) })
}

/// Root pair for an arbitrary constant generator choice.
pub fn generator_roots(p: &ModelParams, g: GeneratorSigns) -> Option<(f64, f64)> {
    quadratic_roots(p.sigma_sq(), p.reduced_drift(g), p.reduced_discount(g))
}

pub fn characteristic_roots(p: &ModelParams, regime: Regime) -> Result<RegimeRoots> {
    p.require_feasible()?;
    let (psi, phi) = generator_roots(p, regime.generators())
        .ok_or_else(|| Error::ComplexRoots(format!("{regime:?}")))?;
    Ok(RegimeRoots { psi, phi, regime })
}

/// Sign of a sensitivity as read off its threshold condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignClass {
    Positive,
    Zero,
    Negative,
}

impl SignClass {
    fn of(x: f64) -> Self {
        if x > 0.0 {
            SignClass::Positive
        } else if x < 0.0 {
            SignClass::Negative
        } else {
            SignClass::Zero
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sensitivity {
    pub value: f64,
    /// Sign predicted by the threshold condition alone.
    pub sign: SignClass,
}

/// Volatility sensitivities of the `A3` positive root and the `A1` negative root.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensitivitySet {
    pub dpsi_dsigma_y: Sensitivity,
    pub dpsi_dsigma_x: Sensitivity,
    pub dphi_dsigma_y: Sensitivity,
    pub dphi_dsigma_x: Sensitivity,
}

pub fn root_sensitivities(p: &ModelParams) -> Result<SensitivitySet> {
    p.require_three_branch()?;
    let a3 = characteristic_roots(p, Regime::A3)?;
    let a1 = characteristic_roots(p, Regime::A1)?;
    let s2 = p.sigma_sq();
    let (k, sx, sy) = (p.kappa, p.sigma_x, p.sigma_y);
    let (psi, phi3) = (a3.psi, a3.phi);
    let (psi1, phi) = (a1.psi, a1.phi);

    // psi > 1 and phi < 0 here, so each sign is the sign of one factor.
    let t_psi_y = k - sy * psi;
    let t_psi_x = k - sx * (psi - 1.0);
    let t_phi_y = sy * phi + k;
    let t_phi_x = k - sx * (1.0 - phi);
    Ok(SensitivitySet {
        dpsi_dsigma_y: Sensitivity {
            value: 2.0 * t_psi_y * (psi - 1.0) / (s2 * (psi - phi3)),
            sign: SignClass::of(t_psi_y),
        },
        dpsi_dsigma_x: Sensitivity {
            value: 2.0 * psi * t_psi_x / (s2 * (psi - phi3)),
            sign: SignClass::of(t_psi_x),
        },
        dphi_dsigma_y: Sensitivity {
            value: 2.0 * (phi - 1.0) * t_phi_y / (s2 * (psi1 - phi)),
            sign: SignClass::of(-t_phi_y),
        },
        dphi_dsigma_x: Sensitivity {
            value: 2.0 * phi * t_phi_x / (s2 * (psi1 - phi)),
            sign: SignClass::of(-t_phi_x),
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig5() -> ModelParams {
        ModelParams::new(0.02, 0.04, 0.05, 0.1, 0.041, 0.28).unwrap()
    }

    #[test]
    fn golden_ratio_case() {
        let sigma: f64 = 0.2;
        let p = ModelParams::new(0.03, 0.03, sigma, sigma, 0.03 + sigma * sigma, 0.0).unwrap();
        // Sigma^2 = 2 sigma^2 and gamma = sigma^2 reduce to a^2 - a - 1 = 0.
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        for regime in Regime::ALL {
            let rr = characteristic_roots(&p, regime).unwrap();
            assert!((rr.psi - golden).abs() < 1e-14);
            assert!((rr.phi - (1.0 - 5f64.sqrt()) / 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn kappa_zero_collapses_regimes() {
        let p = fig5().with_kappa(0.0);
        let a1 = characteristic_roots(&p, Regime::A1).unwrap();
        for regime in [Regime::A2, Regime::A3] {
            let rr = characteristic_roots(&p, regime).unwrap();
            assert_eq!((rr.psi, rr.phi), (a1.psi, a1.phi));
        }
    }

    #[test]
    fn a3_roots_straddle_one_without_opposite_signs() {
        // r < mu_y + kappa sigma_y: the A3 pair is real with phi in (0, 1).
        let rr = characteristic_roots(&fig5(), Regime::A3).unwrap();
        assert!(rr.psi > 1.0 && rr.phi > 0.0 && rr.phi < 1.0);
        assert!(!rr.opposite_signs());
    }

    #[test]
    fn stable_roots_survive_large_discriminant() {
        let (psi, phi) = quadratic_roots(1e-6, 0.5, 1e-3).unwrap();
        let q = |a: f64| 0.5e-6 * a * (a - 1.0) + 0.5 * a - 1e-3;
        assert!(q(psi).abs() < 1e-15);
        assert!((q(phi) / (0.5e-6 * phi * phi)).abs() < 1e-12);
    }

    #[test]
    fn infeasible_discount_is_an_error() {
        let p = ModelParams::new(0.0, 0.1, 0.1, 0.1, 0.05, 0.0).unwrap();
        assert!(matches!(characteristic_roots(&p, Regime::A2), Err(Error::InfeasibleDiscount { .. })));
    }

    #[test]
    fn kappa_zero_sensitivity_is_negative() {
        let p = ModelParams::new(0.025, 0.03, 0.075, 0.1, 0.035, 0.0).unwrap();
        let s = root_sensitivities(&p).unwrap();
        assert_eq!(s.dpsi_dsigma_y.sign, SignClass::Negative);
        assert!(s.dpsi_dsigma_y.value < 0.0);
    }
}
