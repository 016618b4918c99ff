//! Scalar root finding used by the boundary solvers.

use crate::error::{Error, Result};

const MAX_ITER: usize = 400;

/// Bisection on `[a, b]` where `f(a)` and `f(b)` have opposite signs.
/// Stops when the bracket is narrower than `rel_tol * max(|a|, |b|)`.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if !(f_lo * f_hi < 0.0) {
        return Err(Error::RootBracketFailure(format!(
            "no sign change on [{lo}, {hi}]: f = ({f_lo}, {f_hi})"
        )));
    }
    for _ in 0..MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= rel_tol * lo.abs().max(hi.abs()) || mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if (fm < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Bisection in `ln x` for a positive variable; `rel_tol` bounds the final
/// bracket ratio `hi / lo - 1`.
pub fn bisect_log<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::RootBracketFailure(format!("log bracket needs positive ends, got [{a}, {b}]")));
    }
    let (mut lo, mut hi) = if a <= b { (a.ln(), b.ln()) } else { (b.ln(), a.ln()) };
    let mut f_lo = f(lo.exp());
    let f_hi = f(hi.exp());
    if f_lo == 0.0 {
        return Ok(lo.exp());
    }
    if f_hi == 0.0 {
        return Ok(hi.exp());
    }
    if !(f_lo * f_hi < 0.0) {
        return Err(Error::RootBracketFailure(format!(
            "no sign change on [{}, {}]: f = ({f_lo}, {f_hi})",
            lo.exp(),
            hi.exp()
        )));
    }
    let tol = rel_tol.max(f64::EPSILON);
    for _ in 0..MAX_ITER {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid.exp());
        if fm == 0.0 {
            return Ok(mid.exp());
        }
        if (fm < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    Ok((0.5 * (lo + hi)).exp())
}

/// Newton's method kept inside a sign-changing bracket; falls back to
/// bisection whenever a step leaves the bracket or fails to shrink it.
pub fn safeguarded_newton<F>(mut fdf: F, a: f64, b: f64, rel_tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> (f64, f64),
{
    let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
    let (f_lo, _) = fdf(lo);
    let (f_hi, _) = fdf(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if !(f_lo * f_hi < 0.0) {
        return Err(Error::RootBracketFailure(format!(
            "no sign change on [{lo}, {hi}]: f = ({f_lo}, {f_hi})"
        )));
    }
    let lo_negative = f_lo < 0.0;
    let mut x = 0.5 * (lo + hi);
    for _ in 0..MAX_ITER {
        let (fx, dfx) = fdf(x);
        if fx == 0.0 {
            return Ok(x);
        }
        if (fx < 0.0) == lo_negative {
            lo = x;
        } else {
            hi = x;
        }
        let width = hi - lo;
        let newton = x - fx / dfx;
        let next = if dfx.is_finite() && dfx != 0.0 && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= rel_tol * x.abs() || width <= rel_tol * lo.abs().max(hi.abs()) {
            return Ok(next);
        }
        x = next;
    }
    Ok(x)
}

/// Expands `x` geometrically by `factor` until `pred(x)` holds.
pub fn expand_until<P: FnMut(f64) -> bool>(start: f64, factor: f64, max_steps: usize, mut pred: P) -> Option<f64> {
    let mut x = start;
    for _ in 0..=max_steps {
        if pred(x) {
            return Some(x);
        }
        x *= factor;
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisection_finds_sqrt_two() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-15).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn newton_matches_bisection() {
        let r = safeguarded_newton(|x| (x.exp() - 3.0, x.exp()), -5.0, 5.0, 1e-15).unwrap();
        assert!((r - 3f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn log_bisection_handles_wide_brackets() {
        let r = bisect_log(|x| x.ln() - 20.0, 1e-3, 1e12, 1e-14).unwrap();
        assert!((r / 20f64.exp() - 1.0).abs() < 1e-13);
    }

    #[test]
    fn missing_sign_change_is_reported() {
        assert!(matches!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12), Err(Error::RootBracketFailure(_))));
    }
}
