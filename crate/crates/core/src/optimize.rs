//! Maximisation of the payoff-to-harmonic ratio `Pi_c` on log grids.

use crate::error::{Error, Result};
use crate::harmonic::HarmonicFn;
use crate::payoff::Payoff;
use crate::rootfind::bisect;

pub const GRID_POINTS: usize = 2048;
pub const GRID_SPAN: f64 = 1e4;
const FLAT_TOL: f64 = 1e-10;
const SAME_POINT: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub z: f64,
    pub value: f64,
}

/// Supremum of `Pi_c` over a half-line.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SideSup {
    Attained(Maximum),
    Unbounded,
}

impl SideSup {
    pub fn value(&self) -> f64 {
        match self {
            SideSup::Attained(m) => m.value,
            SideSup::Unbounded => f64::INFINITY,
        }
    }

    pub fn maximum(&self) -> Option<Maximum> {
        match self {
            SideSup::Attained(m) => Some(*m),
            SideSup::Unbounded => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `w <= z`
    Below,
    /// `w >= z`
    Above,
}

/// Result of a global scan of `Pi_c`.
#[derive(Debug, Clone, PartialEq)]
pub enum ArgMax {
    /// `Pi_c` is constant to within `1e-10` relative on the scanned range.
    Flat(f64),
    /// Local maximisers sorted by `z`.
    Points(Vec<Maximum>),
}

impl ArgMax {
    /// Maximisers whose value is within `rel` of the largest.
    pub fn global(&self, rel: f64) -> Vec<Maximum> {
        match self {
            ArgMax::Flat(_) => Vec::new(),
            ArgMax::Points(pts) => {
                let best = pts.iter().map(|m| m.value).fold(f64::NEG_INFINITY, f64::max);
                pts.iter().copied().filter(|m| m.value >= best * (1.0 - rel)).collect()
            }
        }
    }
}

fn ratio(payoff: &Payoff, h: &HarmonicFn, z: f64) -> f64 {
    let f = payoff.eval(z);
    if f == 0.0 {
        0.0
    } else {
        f / h.value(z)
    }
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    let step = (b - a) / (n - 1) as f64;
    let mut g: Vec<f64> = (0..n).map(|i| (a + step * i as f64).exp()).collect();
    g[0] = lo;
    g[n - 1] = hi;
    g
}

fn scan_scale(h: &HarmonicFn, fallback: f64) -> f64 {
    h.c().finite().filter(|c| *c > 0.0).unwrap_or(fallback)
}

/// `d/dz log Pi` numerator `f' h - f h'`, when `f` is differentiable.
fn slope_sign(payoff: &Payoff, h: &HarmonicFn, z: f64) -> Option<f64> {
    let df = payoff.derivative(z)?;
    let hv = h.eval(z).ok()?;
    Some(df * hv.value - payoff.eval(z) * hv.d1)
}

/// Refines a maximiser of `Pi` inside `[a, b]`: root of the log-slope when the
/// payoff is smooth there with a sign change, golden section otherwise.
fn refine(payoff: &Payoff, h: &HarmonicFn, a: f64, b: f64) -> Maximum {
    let breaks_inside = payoff.breakpoints().iter().any(|&k| k > a && k < b);
    if !breaks_inside {
        if let (Some(sa), Some(sb)) = (slope_sign(payoff, h, a), slope_sign(payoff, h, b)) {
            if sa > 0.0 && sb < 0.0 {
                if let Ok(z) = bisect(|z| slope_sign(payoff, h, z).unwrap_or(0.0), a, b, 1e-15) {
                    return Maximum { z, value: ratio(payoff, h, z) };
                }
            }
        }
    }
    golden(|z| ratio(payoff, h, z), a, b)
}

fn golden<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> Maximum {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (a.ln(), b.ln());
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1.exp());
    let mut f2 = f(x2.exp());
    while hi - lo > 1e-12 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2.exp());
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1.exp());
        }
    }
    let mut best = Maximum { z: x1.exp(), value: f1 };
    for z in [x2.exp(), a, b] {
        let v = f(z);
        if v > best.value {
            best = Maximum { z, value: v };
        }
    }
    best
}

/// Candidates at payoff breakpoints inside `[lo, hi]`, using left limits only
/// where they are reachable from inside the interval.
fn breakpoint_candidates(payoff: &Payoff, h: &HarmonicFn, lo: f64, hi: f64) -> Vec<Maximum> {
    let mut out = Vec::new();
    for b in payoff.breakpoints() {
        if b < lo || b > hi {
            continue;
        }
        let hv = h.value(b);
        let mut v = payoff.eval(b) / hv;
        if b > lo {
            v = v.max(payoff.eval_left(b) / hv);
        }
        out.push(Maximum { z: b, value: v });
    }
    out
}

/// `sup_{w <= z} Pi_c(w)` or `sup_{w >= z} Pi_c(w)`. The scan is truncated
/// to a factor `1e4` beyond `max(z, c)` (or `min(z, c)`); a profile still
/// increasing at the truncation end is reported as unbounded.
pub fn side_sup(payoff: &Payoff, h: &HarmonicFn, z: f64, side: Side) -> SideSup {
    let s = scan_scale(h, z);
    let (lo, hi) = match side {
        Side::Below => (z.min(s) / GRID_SPAN, z),
        Side::Above => (z, z.max(s) * GRID_SPAN),
    };
    let grid = log_grid(lo, hi, GRID_POINTS);
    let vals: Vec<f64> = grid
        .iter()
        .enumerate()
        .map(|(i, &w)| {
            if side == Side::Below && i == GRID_POINTS - 1 {
                payoff.eval_upper(w) / h.value(w)
            } else {
                ratio(payoff, h, w)
            }
        })
        .collect();
    let (mut imax, mut vmax) = (0, f64::NEG_INFINITY);
    for (i, &v) in vals.iter().enumerate() {
        if v > vmax {
            imax = i;
            vmax = v;
        }
    }
    let outer = match side {
        Side::Below => 0,
        Side::Above => GRID_POINTS - 1,
    };
    let neighbour = match side {
        Side::Below => 1,
        Side::Above => GRID_POINTS - 2,
    };
    if imax == outer && vals[outer] > vals[neighbour] {
        return SideSup::Unbounded;
    }
    if !(vmax > 0.0) {
        return SideSup::Attained(Maximum { z, value: 0.0 });
    }
    let a = grid[imax.saturating_sub(1)];
    let b = grid[(imax + 1).min(GRID_POINTS - 1)];
    let mut best = refine(payoff, h, a, b);
    if vals[imax] > best.value {
        best = Maximum { z: grid[imax], value: vals[imax] };
    }
    for cand in breakpoint_candidates(payoff, h, lo, hi) {
        if cand.value > best.value {
            best = cand;
        }
    }
    SideSup::Attained(best)
}

/// All local maximisers of `Pi_c` over `[s / 1e4, s * 1e4]`, where `s` is the
/// reference point (or the payoff's natural split for `c` in `{0, inf}`).
pub fn argmax_pi(payoff: &Payoff, h: &HarmonicFn) -> Result<ArgMax> {
    let s = scan_scale(h, payoff.natural_split());
    let (lo, hi) = (s / GRID_SPAN, s * GRID_SPAN);
    let grid = log_grid(lo, hi, GRID_POINTS);
    let vals: Vec<f64> = grid.iter().map(|&w| ratio(payoff, h, w)).collect();
    let vmax = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let vmin = vals.iter().copied().fold(f64::INFINITY, f64::min);
    if vmax > 0.0 && vmax - vmin <= FLAT_TOL * vmax {
        return Ok(ArgMax::Flat(vmax));
    }
    let n = GRID_POINTS;
    if vals[0] == vmax && vals[0] > vals[1] {
        return Err(Error::SupremumNotAttained { side: "lower tail" });
    }
    if vals[n - 1] == vmax && vals[n - 1] > vals[n - 2] {
        return Err(Error::SupremumNotAttained { side: "upper tail" });
    }
    let mut found: Vec<Maximum> = Vec::new();
    for i in 1..n - 1 {
        let v = vals[i];
        if v > 0.0 && v >= vals[i - 1] && v >= vals[i + 1] && (v > vals[i - 1] || v > vals[i + 1]) {
            found.push(refine(payoff, h, grid[i - 1], grid[i + 1]));
        }
    }
    for cand in breakpoint_candidates(payoff, h, lo, hi) {
        let eps = cand.z * 1e-7;
        let left = ratio(payoff, h, cand.z - eps);
        let right = ratio(payoff, h, cand.z + eps);
        if cand.value > 0.0 && cand.value >= left && cand.value >= right {
            found.push(cand);
        }
    }
    found.sort_by(|a, b| a.z.total_cmp(&b.z));
    let mut merged: Vec<Maximum> = Vec::new();
    for m in found {
        match merged.last_mut() {
            Some(last) if (m.z - last.z).abs() <= SAME_POINT * m.z.max(last.z) * 1e3 => {
                if m.value > last.value {
                    *last = m;
                }
            }
            _ => merged.push(m),
        }
    }
    Ok(ArgMax::Points(merged))
}

/// True when `w` coincides with `z` up to the solver's resolution.
pub fn same_point(w: f64, z: f64) -> bool {
    (w - z).abs() <= SAME_POINT * z.abs().max(w.abs())
}
