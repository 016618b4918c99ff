//! Closed-form and semi-closed-form solutions for the built-in payoffs.

use crate::error::{Error, Result};
use crate::extreal::RefPoint;
use crate::harmonic::HarmonicFn;
use crate::params::{ModelParams, Regime};
use crate::payoff::Payoff;
use crate::rootfind::{bisect, bisect_log, safeguarded_newton};
use crate::roots::characteristic_roots;

use super::solution::{Cone, Solution, SolutionKind};

/// `Lambda = psi (1 - phi) / (phi (1 - psi))` from the `A2` roots.
fn lambda(p: &ModelParams) -> Result<(f64, f64, f64)> {
    let r = characteristic_roots(p, Regime::A2)?;
    let (psi, phi) = (r.psi, r.phi);
    Ok((psi, phi, psi * (1.0 - phi) / (phi * (1.0 - psi))))
}

/// Reference point `c*` of the floor option `max(x, y)`.
pub fn floor_reference_point(p: &ModelParams) -> Result<f64> {
    p.require_three_branch()?;
    let (psi, phi, lam) = lambda(p)?;
    Ok(psi / (psi - 1.0) * lam.powf(-(1.0 - phi) / (psi - phi)))
}

/// Stopping interval `[z1, z2]` with `z1 = min(psi/(psi-1) K, L)` and
/// `z2 = max(phi/(phi-1) M, L)`.
pub fn solve_compound(k: f64, m: f64, params: &ModelParams) -> Result<Solution> {
    let payoff = Payoff::compound(k, m)?;
    params.require_three_branch()?;
    let psi = characteristic_roots(params, Regime::A3)?.psi;
    let phi = characteristic_roots(params, Regime::A1)?.phi;
    let l = 0.5 * (k + m);
    let z1 = (psi / (psi - 1.0) * k).min(l);
    let z2 = (phi / (phi - 1.0) * m).max(l);
    let lower = Cone {
        lower: 0.0,
        upper: z1,
        scale: (z1 - k) / z1.powf(psi),
        harmonic: HarmonicFn::with_ref(params, RefPoint::Zero)?,
    };
    let upper = Cone {
        lower: z2,
        upper: f64::INFINITY,
        scale: (m - z2) / z2.powf(phi),
        harmonic: HarmonicFn::with_ref(params, RefPoint::Infinity)?,
    };
    let mut sol = Solution::from_cones(params, &payoff, SolutionKind::TwoSided, vec![lower, upper], &[l]);
    if z1 == l {
        sol.notes.push(format!("lower boundary at the corner L = {l}"));
    }
    if z2 == l {
        sol.notes.push(format!("upper boundary at the corner L = {l}"));
    }
    Ok(sol)
}

fn floor_like(params: &ModelParams, payoff: &Payoff, c: f64) -> Result<Solution> {
    let h = HarmonicFn::new(params, c)?;
    let lc = h.switch_point();
    let scale = payoff.eval_upper(c) / h.value(c);
    let cone = Cone { lower: c, upper: lc, scale, harmonic: h };
    Ok(Solution::from_cones(params, payoff, SolutionKind::TwoSided, vec![cone], &[]))
}

/// Floor option `max(x, y)`: continuation `(c*, l c*)`.
pub fn solve_floor(params: &ModelParams) -> Result<Solution> {
    let c = floor_reference_point(params)?;
    floor_like(params, &Payoff::floor(), c)
}

/// First-order condition `g(z) = h(z) - h'(z) (z - 1)` and its slope.
fn straddle_foc(h: &HarmonicFn, z: f64) -> (f64, f64) {
    let v = h.eval(z).expect("positive z");
    (v.value - v.d1 * (z - 1.0), -v.d2 * (z - 1.0))
}

/// Straddle boundaries `(z1(c), z2(c))` for a fixed reference point.
pub fn straddle_boundaries(h: &HarmonicFn) -> Result<(f64, f64)> {
    let c = h.c().to_f64();
    let lc = h.switch_point();
    let hi_start = 1f64.max(lc);
    let hi_end = crate::rootfind::expand_until(hi_start * 2.0, 2.0, 200, |z| straddle_foc(h, z).0 < 0.0)
        .ok_or_else(|| Error::RootBracketFailure(format!("upper straddle boundary not bracketed for c = {c}")))?;
    let z2 = safeguarded_newton(|z| straddle_foc(h, z), hi_start, hi_end, 1e-15)?;
    let lo_end = 1f64.min(c);
    let lo_start = crate::rootfind::expand_until(lo_end * 0.5, 0.5, 200, |z| straddle_foc(h, z).0 < 0.0)
        .ok_or_else(|| Error::RootBracketFailure(format!("lower straddle boundary not bracketed for c = {c}")))?;
    let z1 = safeguarded_newton(|z| straddle_foc(h, z), lo_start, lo_end, 1e-15)?;
    Ok((z1, z2))
}

/// Straddle `|x - y|`: inner Newton solves for the first-order conditions,
/// outer bisection in `c` equalises `Pi_c(z1)` and `Pi_c(z2)`.
pub fn solve_straddle(params: &ModelParams) -> Result<Solution> {
    params.require_three_branch()?;
    let payoff = Payoff::straddle();
    let balance = |c: f64| -> f64 {
        let Ok(h) = HarmonicFn::new(params, c) else { return f64::NAN };
        match straddle_boundaries(&h) {
            Ok((z1, z2)) => (1.0 - z1) / h.value(z1) - (z2 - 1.0) / h.value(z2),
            Err(_) => f64::NAN,
        }
    };
    let lo = crate::rootfind::expand_until(1.0, 0.5, 200, |c| balance(c) > 0.0)
        .ok_or_else(|| Error::RootBracketFailure("no reference point with Pi(z1) > Pi(z2)".into()))?;
    let hi = crate::rootfind::expand_until(1.0, 2.0, 200, |c| balance(c) < 0.0)
        .ok_or_else(|| Error::RootBracketFailure("no reference point with Pi(z1) < Pi(z2)".into()))?;
    let c = bisect_log(balance, lo, hi, 1e-14)?;
    let h = HarmonicFn::new(params, c)?;
    let (z1, z2) = straddle_boundaries(&h)?;
    let scale = (z2 - 1.0) / h.value(z2);
    let cone = Cone { lower: z1, upper: z2, scale, harmonic: h };
    Ok(Solution::from_cones(params, &payoff, SolutionKind::TwoSided, vec![cone], &[]))
}

/// Digital option: floor solution when `c*_floor <= k`, otherwise `z1 = k`
/// and `c*` solves `1 / h_c(k) = C c`.
pub fn solve_digital(k: f64, params: &ModelParams) -> Result<Solution> {
    let payoff = Payoff::digital(k)?;
    let c_floor = floor_reference_point(params)?;
    if c_floor <= k {
        let mut sol = floor_like(params, &payoff, c_floor)?;
        sol.notes.push(format!("floor branch: c* = {c_floor} <= k"));
        return Ok(sol);
    }
    let (psi, phi, lam) = lambda(params)?;
    let big_c = (psi - 1.0) / psi * lam.powf((1.0 - phi) / (psi - phi));
    let eq = |c: f64| -> f64 {
        match HarmonicFn::new(params, c) {
            Ok(h) => 1.0 / h.value(k) - big_c * c,
            Err(_) => f64::NAN,
        }
    };
    let hi = crate::rootfind::expand_until(2.0 * k, 2.0, 200, |c| eq(c) < 0.0)
        .ok_or_else(|| Error::RootBracketFailure("digital reference point not bracketed".into()))?;
    let c = bisect(eq, k, hi, 1e-15)?;
    let h = HarmonicFn::new(params, c)?;
    let lc = h.switch_point();
    let cone = Cone { lower: k, upper: lc, scale: big_c * c, harmonic: h };
    Ok(Solution::from_cones(params, &payoff, SolutionKind::TwoSided, vec![cone], &[]))
}
