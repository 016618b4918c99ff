//! The minimal harmonic family `h_c`, its limits `h_0`, `h_inf`, and the
//! payoff ratio `Pi_c = f / h_c`.
//!
//! For finite `c > 0` the function is normalised by `h_c(c) = 1`,
//! `h_c'(c) = 0`. Below `c` it solves the `A1` ODE, on `[c, l c]` the `A2`
//! ODE and above `l c` the `A3` ODE; the switch `l` is where `z h' = h`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::extreal::{ext_f64, RefPoint};
use crate::params::{GeneratorSigns, ModelParams, Regime, SolvabilityClass};
use crate::payoff::Payoff;
use crate::roots::{characteristic_roots, generator_roots, RegimeRoots};

/// Value and first two derivatives at a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HValue {
    pub value: f64,
    pub d1: f64,
    pub d2: f64,
}

/// `sum_j coef_j (z / scale)^exp_j`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct PowerSum {
    scale: f64,
    terms: [(f64, f64); 2],
}

impl PowerSum {
    fn single(exp: f64) -> Self {
        PowerSum { scale: 1.0, terms: [(1.0, exp), (0.0, 0.0)] }
    }

    /// `psi/(psi-phi) (z/c)^phi - phi/(psi-phi) (z/c)^psi`: unit value and zero slope at `c`.
    fn normalised(psi: f64, phi: f64, c: f64) -> Self {
        let d = psi - phi;
        PowerSum { scale: c, terms: [(psi / d, phi), (-phi / d, psi)] }
    }

    fn value(&self, z: f64) -> f64 {
        let w = z / self.scale;
        self.terms.iter().map(|&(a, e)| if a == 0.0 { 0.0 } else { a * w.powf(e) }).sum()
    }

    fn eval(&self, z: f64) -> HValue {
        let w = z / self.scale;
        let mut out = HValue { value: 0.0, d1: 0.0, d2: 0.0 };
        for &(a, e) in &self.terms {
            if a == 0.0 {
                continue;
            }
            let t = a * w.powf(e);
            out.value += t;
            out.d1 += t * e / z;
            out.d2 += t * e * (e - 1.0) / (z * z);
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Pieces {
    Power(PowerSum),
    Split { lower: PowerSum, middle: PowerSum, upper: Option<PowerSum> },
}

/// Which measure family the harmonic function is built for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    /// Regime-switching worst case `theta^c`.
    WorstCase,
    /// A constant generator pair, used when the payoff is monotone.
    Fixed(GeneratorSigns),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HarmonicFn {
    c: RefPoint,
    #[serde(with = "ext_f64")]
    l: f64,
    branch_case: SolvabilityClass,
    family: Family,
    roots_a1: RegimeRoots,
    roots_a2: RegimeRoots,
    roots_a3: Option<RegimeRoots>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fixed_roots: Option<(f64, f64)>,
    #[serde(skip)]
    pieces: Pieces,
}

/// `l = (psi(1-phi) / (phi(1-psi)))^(1/(psi-phi))` from the `A2` roots.
pub fn switching_ratio(a2: &RegimeRoots) -> f64 {
    let (psi, phi) = (a2.psi, a2.phi);
    (psi * (1.0 - phi) / (phi * (1.0 - psi))).powf(1.0 / (psi - phi))
}

pub fn build_harmonic(p: &ModelParams, c: f64) -> Result<HarmonicFn> {
    HarmonicFn::new(p, c)
}

impl HarmonicFn {
    pub fn new(p: &ModelParams, c: f64) -> Result<Self> {
        if !(c >= 0.0) {
            return Err(Error::NonpositiveC(c));
        }
        Self::with_ref(p, RefPoint::from_f64(c))
    }

    pub fn with_ref(p: &ModelParams, c: RefPoint) -> Result<Self> {
        let class = p.require_feasible()?;
        if let RefPoint::Finite(v) = c {
            if !(v > 0.0) {
                return Err(Error::NonpositiveC(v));
            }
        }
        let a1 = characteristic_roots(p, Regime::A1)?;
        let a2 = characteristic_roots(p, Regime::A2)?;
        let (a3, l) = match class {
            SolvabilityClass::ThreeBranch => (Some(characteristic_roots(p, Regime::A3)?), switching_ratio(&a2)),
            _ => (None, f64::INFINITY),
        };
        let pieces = match c {
            RefPoint::Zero => PowerSum::single(a3.map_or(a2.psi, |r| r.psi)),
            RefPoint::Infinity => PowerSum::single(a1.phi),
            RefPoint::Finite(c) => {
                let lower = PowerSum::normalised(a1.psi, a1.phi, c);
                let middle = PowerSum::normalised(a2.psi, a2.phi, c);
                let upper = a3.map(|r3| {
                    let amp = a2.psi / (a2.psi - 1.0) * l.powf(a2.phi);
                    let d = r3.psi - r3.phi;
                    PowerSum { scale: l * c, terms: [(amp * (1.0 - r3.phi) / d, r3.psi), (amp * (r3.psi - 1.0) / d, r3.phi)] }
                });
                return Ok(HarmonicFn {
                    c: RefPoint::Finite(c),
                    l,
                    branch_case: class,
                    family: Family::WorstCase,
                    roots_a1: a1,
                    roots_a2: a2,
                    roots_a3: a3,
                    fixed_roots: None,
                    pieces: Pieces::Split { lower, middle, upper },
                });
            }
        };
        Ok(HarmonicFn {
            c,
            l,
            branch_case: class,
            family: Family::WorstCase,
            roots_a1: a1,
            roots_a2: a2,
            roots_a3: a3,
            fixed_roots: None,
            pieces: Pieces::Power(pieces),
        })
    }

    /// Harmonic function of the fixed-measure problem under constant generators.
    pub fn fixed(p: &ModelParams, g: GeneratorSigns, c: RefPoint) -> Result<Self> {
        let mut h = Self::with_ref(p, RefPoint::Infinity)?;
        if p.reduced_discount(g) <= 0.0 {
            return Err(Error::InfeasibleDiscount { r: p.r, bound: p.r - p.reduced_discount(g) });
        }
        let (psi, phi) = generator_roots(p, g).ok_or_else(|| Error::ComplexRoots(format!("{g:?}")))?;
        h.pieces = match c {
            RefPoint::Zero => Pieces::Power(PowerSum::single(psi)),
            RefPoint::Infinity => Pieces::Power(PowerSum::single(phi)),
            RefPoint::Finite(v) if v > 0.0 => {
                let s = PowerSum::normalised(psi, phi, v);
                Pieces::Split { lower: s, middle: s, upper: None }
            }
            RefPoint::Finite(v) => return Err(Error::NonpositiveC(v)),
        };
        h.c = c;
        h.l = f64::INFINITY;
        h.family = Family::Fixed(g);
        h.fixed_roots = Some((psi, phi));
        Ok(h)
    }

    /// Same family and parameters, new reference point.
    pub fn rebased(&self, p: &ModelParams, c: RefPoint) -> Result<Self> {
        match self.family {
            Family::WorstCase => Self::with_ref(p, c),
            Family::Fixed(g) => Self::fixed(p, g, c),
        }
    }

    pub fn c(&self) -> RefPoint {
        self.c
    }

    /// Switching ratio `l`; `+inf` in the two-branch case.
    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn branch_case(&self) -> SolvabilityClass {
        self.branch_case
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn roots(&self, regime: Regime) -> Option<RegimeRoots> {
        match regime {
            Regime::A1 => Some(self.roots_a1),
            Regime::A2 => Some(self.roots_a2),
            Regime::A3 => self.roots_a3,
        }
    }

    /// Upper switching state `l c` where the `Y` generator flips.
    pub fn switch_point(&self) -> f64 {
        match (self.family, self.c) {
            (Family::Fixed(_), _) => f64::INFINITY,
            (_, RefPoint::Zero) => {
                if self.l.is_finite() {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
            (_, RefPoint::Finite(c)) => self.l * c,
            (_, RefPoint::Infinity) => f64::INFINITY,
        }
    }

    /// Value, slope and curvature at `z > 0`.
    pub fn eval(&self, z: f64) -> Result<HValue> {
        if !(z > 0.0 && z.is_finite()) {
            return Err(Error::NonpositiveZ(z));
        }
        Ok(self.piece(z).eval(z))
    }

    /// Value only; caller guarantees `z > 0`.
    pub fn value(&self, z: f64) -> f64 {
        self.piece(z).value(z)
    }

    fn piece(&self, z: f64) -> &PowerSum {
        match &self.pieces {
            Pieces::Power(p) => p,
            Pieces::Split { lower, middle, upper } => {
                let c = self.c.to_f64();
                if z < c {
                    lower
                } else if z <= self.l * c {
                    middle
                } else {
                    upper.as_ref().unwrap_or(middle)
                }
            }
        }
    }

    /// Global branch function `H_ic` (not restricted to its own interval).
    pub fn branch(&self, i: u8, z: f64) -> Result<HValue> {
        if !(z > 0.0 && z.is_finite()) {
            return Err(Error::NonpositiveZ(z));
        }
        let piece = match (&self.pieces, i) {
            (Pieces::Split { lower, .. }, 1) => lower,
            (Pieces::Split { middle, .. }, 2) => middle,
            (Pieces::Split { upper: Some(u), .. }, 3) => u,
            _ => return Err(Error::BranchUnavailable(i)),
        };
        Ok(piece.eval(z))
    }

    /// Regime of nature's generator at `z`, with ties at `c` and `l c` sent upward.
    pub fn regime_at(&self, z: f64) -> Regime {
        if z < self.c.to_f64() {
            Regime::A1
        } else if z < self.switch_point() {
            Regime::A2
        } else {
            Regime::A3
        }
    }

    /// Generator signs nature uses at `z` under `theta^c`.
    pub fn generators_at(&self, z: f64) -> GeneratorSigns {
        match self.family {
            Family::Fixed(g) => g,
            Family::WorstCase => self.regime_at(z).generators(),
        }
    }
}

/// `Pi_c(z) = f(z) / h_c(z)`.
pub fn pi_ratio(payoff: &Payoff, h: &HarmonicFn, z: f64) -> Result<f64> {
    if !(z > 0.0 && z.is_finite()) {
        return Err(Error::NonpositiveZ(z));
    }
    let f = payoff.eval(z);
    Ok(if f == 0.0 { 0.0 } else { f / h.value(z) })
}
