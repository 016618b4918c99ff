//! The general procedure: compare one-sided suprema of `Pi_c` and move `c`
//! until they balance.

use crate::error::{Error, Result};
use crate::extreal::RefPoint;
use crate::harmonic::{Family, HarmonicFn};
use crate::optimize::{side_sup, Side, SideSup};
use crate::params::{GeneratorSigns, ModelParams};
use crate::payoff::{Monotonicity, Payoff};
use crate::rootfind::bisect_log;

use super::solution::{Cone, Solution, SolutionKind};

const C_TOL: f64 = 1e-12;
const C_RANGE: f64 = 1e12;
const STEP_FINE: f64 = 0.02;
const FINE_STEPS: usize = 20;
const STEP_GROWTH: f64 = 1.3;
const MAX_CONES_PER_SIDE: usize = 4;
/// Cones narrower than this (relative) are artefacts of a maximiser sitting on `z`.
const DEGENERATE: f64 = 1e-6;

fn touches(w: f64, z: f64) -> bool {
    (w - z).abs() <= DEGENERATE * z
}

/// Constant worst-case generator signs for monotone payoffs.
pub fn classify_monotone(payoff: &Payoff) -> Option<GeneratorSigns> {
    match payoff.monotonicity() {
        Monotonicity::IncXDecY => Some(GeneratorSigns::new(1, -1)),
        Monotonicity::IncXIncY => Some(GeneratorSigns::new(1, 1)),
        Monotonicity::DecXIncY => Some(GeneratorSigns::new(-1, 1)),
        Monotonicity::DecXDecY => Some(GeneratorSigns::new(-1, -1)),
        Monotonicity::NonMonotone => None,
    }
}

fn harmonic_for(params: &ModelParams, family: Family, c: RefPoint) -> Result<HarmonicFn> {
    match family {
        Family::WorstCase => HarmonicFn::with_ref(params, c),
        Family::Fixed(g) => HarmonicFn::fixed(params, g, c),
    }
}

/// `sup_{w >= z} Pi - sup_{w <= z} Pi` with unbounded suprema mapped to `+-inf`.
fn gap(payoff: &Payoff, h: &HarmonicFn, z: f64) -> Result<(f64, SideSup, SideSup)> {
    let above = side_sup(payoff, h, z, Side::Above);
    let below = side_sup(payoff, h, z, Side::Below);
    let d = match (above, below) {
        (SideSup::Unbounded, SideSup::Unbounded) => return Err(Error::SupremumNotAttained { side: "both sides" }),
        _ => above.value() - below.value(),
    };
    Ok((d, above, below))
}

/// `D(c)` for the worst-case family.
pub fn d_gap(payoff: &Payoff, params: &ModelParams, z: f64, c: RefPoint) -> Result<f64> {
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::NonpositiveZ(z));
    }
    let h = HarmonicFn::with_ref(params, c)?;
    Ok(gap(payoff, &h, z)?.0)
}

enum Probe {
    Cone(Cone),
    Stopping,
}

/// Classifies `z`: either the continuation cone containing it or a point of
/// the stopping set.
fn probe(payoff: &Payoff, params: &ModelParams, family: Family, z: f64) -> Result<Probe> {
    let h0 = harmonic_for(params, family, RefPoint::Zero)?;
    let (d0, above0, _) = gap(payoff, &h0, z)?;
    if d0 >= 0.0 {
        let m = above0.maximum().ok_or(Error::SupremumNotAttained { side: "upper" })?;
        if touches(m.z, z) || m.value <= 0.0 {
            return Ok(Probe::Stopping);
        }
        return Ok(Probe::Cone(Cone { lower: 0.0, upper: m.z, scale: m.value, harmonic: h0 }));
    }
    let hinf = harmonic_for(params, family, RefPoint::Infinity)?;
    let (dinf, _, below_inf) = gap(payoff, &hinf, z)?;
    if dinf <= 0.0 {
        let m = below_inf.maximum().ok_or(Error::SupremumNotAttained { side: "lower" })?;
        if touches(m.z, z) || m.value <= 0.0 {
            return Ok(Probe::Stopping);
        }
        return Ok(Probe::Cone(Cone { lower: m.z, upper: f64::INFINITY, scale: m.value, harmonic: hinf }));
    }
    let d_at = |c: f64| -> f64 {
        match harmonic_for(params, family, RefPoint::Finite(c)).and_then(|h| gap(payoff, &h, z)) {
            Ok((d, _, _)) => d,
            Err(_) => f64::NAN,
        }
    };
    let mut lo = z;
    let mut d_lo = d_at(lo);
    while d_lo >= 0.0 && lo > z / C_RANGE {
        lo *= 0.5;
        d_lo = d_at(lo);
    }
    let mut hi = z;
    let mut d_hi = d_at(hi);
    while d_hi <= 0.0 && hi < z * C_RANGE {
        hi *= 2.0;
        d_hi = d_at(hi);
    }
    if !(d_lo < 0.0 && d_hi > 0.0) {
        return Err(Error::NoRootBracket);
    }
    let c = bisect_log(d_at, lo, hi, C_TOL)?;
    let h = harmonic_for(params, family, RefPoint::Finite(c))?;
    let (_, above, below) = gap(payoff, &h, z)?;
    let (m1, m2) = match (below.maximum(), above.maximum()) {
        (Some(a), Some(b)) => (a, b),
        _ => return Err(Error::SupremumNotAttained { side: "both sides" }),
    };
    if touches(m1.z, z) || touches(m2.z, z) {
        return Ok(Probe::Stopping);
    }
    let scale = 0.5 * (m1.value + m2.value);
    Ok(Probe::Cone(Cone { lower: m1.z, upper: m2.z, scale, harmonic: h }))
}

/// Offsets (in `ln z`) visited when walking away from a stopping point.
fn walk_offsets() -> Vec<f64> {
    let mut out: Vec<f64> = (1..=FINE_STEPS).map(|j| j as f64 * STEP_FINE).collect();
    let limit = crate::optimize::GRID_SPAN.ln();
    let mut t = FINE_STEPS as f64 * STEP_FINE;
    while t < limit {
        t *= STEP_GROWTH;
        out.push(t.min(limit));
    }
    out
}

/// Cones found walking from the stopping point `z` towards `0` (`down`) or `inf`.
fn walk(payoff: &Payoff, params: &ModelParams, family: Family, z: f64, down: bool) -> Result<Vec<Cone>> {
    let offsets = walk_offsets();
    let mut cones = Vec::new();
    let mut origin = z;
    'outer: while cones.len() < MAX_CONES_PER_SIDE {
        for &t in &offsets {
            let w = if down { origin * (-t).exp() } else { origin * t.exp() };
            match probe(payoff, params, family, w) {
                Ok(Probe::Cone(cone)) => {
                    let next = if down { cone.lower } else { cone.upper };
                    cones.push(cone);
                    if next == 0.0 || next.is_infinite() {
                        break 'outer;
                    }
                    origin = next;
                    continue 'outer;
                }
                Ok(Probe::Stopping) => {}
                Err(Error::SupremumNotAttained { .. }) | Err(Error::NoRootBracket) => {}
                Err(e) => return Err(e),
            }
        }
        break;
    }
    Ok(cones)
}

/// General solver. Monotone payoffs use the constant worst-case prior; other
/// payoffs use the switching family `h_c`. `z_eval` picks the cone to
/// start from; if it lies in the stopping set the neighbouring cones on both
/// sides are located instead.
pub fn solve_general(payoff: &Payoff, params: &ModelParams, z_eval: f64) -> Result<Solution> {
    params.require_feasible()?;
    if !(z_eval > 0.0 && z_eval.is_finite()) {
        return Err(Error::NonpositiveZ(z_eval));
    }
    let (family, kind_override) = match classify_monotone(payoff) {
        Some(g) => (Family::Fixed(g), Some(SolutionKind::MonotoneReduced)),
        None => (Family::WorstCase, None),
    };
    match probe(payoff, params, family, z_eval)? {
        Probe::Cone(cone) => {
            let kind = kind_override.unwrap_or(match cone.harmonic.c() {
                RefPoint::Zero => SolutionKind::LowerBoundary,
                RefPoint::Infinity => SolutionKind::UpperBoundary,
                RefPoint::Finite(_) => SolutionKind::TwoSided,
            });
            Ok(Solution::from_cones(params, payoff, kind, vec![cone], &[]))
        }
        Probe::Stopping => {
            let mut cones = walk(payoff, params, family, z_eval, true)?;
            cones.reverse();
            cones.extend(walk(payoff, params, family, z_eval, false)?);
            if cones.is_empty() {
                return Err(Error::NoRootBracket);
            }
            let split = payoff.natural_split();
            let splits: Vec<f64> = cones
                .windows(2)
                .map(|w| {
                    let (a, b) = (w[0].upper, w[1].lower);
                    if split >= a && split <= b {
                        split
                    } else {
                        (a * b).sqrt()
                    }
                })
                .collect();
            let kind = if cones.len() == 1 {
                kind_override.unwrap_or(match cones[0].harmonic.c() {
                    RefPoint::Zero => SolutionKind::LowerBoundary,
                    RefPoint::Infinity => SolutionKind::UpperBoundary,
                    RefPoint::Finite(_) => SolutionKind::TwoSided,
                })
            } else {
                kind_override.unwrap_or(SolutionKind::TwoSided)
            };
            Ok(Solution::from_cones(params, payoff, kind, cones, &splits))
        }
    }
}

/// [`solve_general`] evaluated at the payoff's natural split point.
pub fn solve(payoff: &Payoff, params: &ModelParams) -> Result<Solution> {
    solve_general(payoff, params, payoff.natural_split())
}
