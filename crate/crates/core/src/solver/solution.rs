use serde::Serialize;

use crate::error::{Error, Result};
use crate::extreal::{ext_f64, opt_ext_f64, RefPoint};
use crate::harmonic::{Family, HarmonicFn};
use crate::params::{GeneratorPair, GeneratorSigns, ModelParams};
use crate::payoff::Payoff;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolutionKind {
    TwoSided,
    LowerBoundary,
    UpperBoundary,
    MonotoneReduced,
}

/// Shape of the continuation region.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Topology {
    /// A single cone `z1 < z < z2` (either end may be `0` or `inf`).
    Interior,
    /// Several cones; the stopping set contains `[z1, z2]`.
    Exterior,
}

/// One connected component `lower < z < upper` of the continuation region,
/// on which the value is `y * scale * h(z)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Cone {
    #[serde(with = "ext_f64")]
    pub lower: f64,
    #[serde(with = "ext_f64")]
    pub upper: f64,
    pub scale: f64,
    pub harmonic: HarmonicFn,
}

impl Cone {
    pub fn contains(&self, z: f64) -> bool {
        z > self.lower && z < self.upper
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GeneratorInterval {
    #[serde(with = "ext_f64")]
    pub lower: f64,
    #[serde(with = "ext_f64")]
    pub upper: f64,
    /// Whether `upper` itself belongs to this interval.
    pub upper_closed: bool,
    pub theta: GeneratorPair,
}

/// Piecewise-constant worst-case density generators over `(0, inf)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeneratorMap {
    pub intervals: Vec<GeneratorInterval>,
}

impl GeneratorMap {
    pub fn at(&self, z: f64) -> GeneratorPair {
        self.intervals
            .iter()
            .find(|iv| z < iv.upper || (iv.upper_closed && z == iv.upper))
            .or(self.intervals.last())
            .map(|iv| iv.theta)
            .expect("generator map covers (0, inf)")
    }

    /// Map induced by `h` alone: constant for fixed families and the limits,
    /// switching at `c` and `l c` otherwise.
    pub fn from_harmonic(h: &HarmonicFn, kappa: f64) -> Self {
        let mut cuts: Vec<(f64, GeneratorSigns)> = Vec::new();
        match (h.family(), h.c()) {
            (Family::Fixed(g), _) => cuts.push((f64::INFINITY, g)),
            (Family::WorstCase, RefPoint::Finite(c)) => {
                let lc = h.switch_point();
                cuts.push((c, h.generators_at(0.5 * c)));
                cuts.push((lc, h.generators_at(c)));
                if lc.is_finite() {
                    cuts.push((f64::INFINITY, h.generators_at(2.0 * lc)));
                }
            }
            (Family::WorstCase, _) => cuts.push((f64::INFINITY, h.generators_at(1.0))),
        }
        let mut intervals = Vec::new();
        let mut lower = 0.0;
        for (upper, g) in cuts {
            intervals.push(GeneratorInterval { lower, upper, upper_closed: false, theta: g.scaled(kappa) });
            lower = upper;
        }
        GeneratorMap { intervals }.merged()
    }

    /// Restricts to `(lo, hi]` (or `(lo, hi)` when `hi` is infinite).
    fn restricted(&self, lo: f64, hi: f64) -> Vec<GeneratorInterval> {
        let mut out = Vec::new();
        for iv in &self.intervals {
            let a = iv.lower.max(lo);
            let b = iv.upper.min(hi);
            if a < b {
                let upper_closed = if b == hi { hi.is_finite() } else { iv.upper_closed };
                out.push(GeneratorInterval { lower: a, upper: b, upper_closed, theta: iv.theta });
            }
        }
        out
    }

    fn merged(self) -> Self {
        let mut out: Vec<GeneratorInterval> = Vec::new();
        for iv in self.intervals {
            match out.last_mut() {
                Some(last) if last.theta == iv.theta => {
                    last.upper = iv.upper;
                    last.upper_closed = iv.upper_closed;
                }
                _ => out.push(iv),
            }
        }
        GeneratorMap { intervals: out }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Solution {
    pub params: ModelParams,
    pub payoff: Payoff,
    pub kind: SolutionKind,
    pub topology: Topology,
    /// Reference point of the single continuation cone; `None` when the
    /// continuation region has several components.
    pub c_star: Option<RefPoint>,
    #[serde(with = "opt_ext_f64")]
    pub l_c_star: Option<f64>,
    #[serde(with = "ext_f64")]
    pub z1: f64,
    #[serde(with = "ext_f64")]
    pub z2: f64,
    pub value_scale: Option<f64>,
    pub cones: Vec<Cone>,
    pub generator_map: GeneratorMap,
    pub warnings: Vec<String>,
    pub notes: Vec<String>,
}

impl Solution {
    /// Assembles a solution from its continuation cones (sorted, disjoint).
    /// `splits[i]` is the generator switch between cone `i` and `i + 1`.
    pub(crate) fn from_cones(
        params: &ModelParams,
        payoff: &Payoff,
        kind: SolutionKind,
        cones: Vec<Cone>,
        splits: &[f64],
    ) -> Self {
        debug_assert!(!cones.is_empty());
        let kappa = params.kappa;
        let single = cones.len() == 1;
        let generator_map = if single {
            GeneratorMap::from_harmonic(&cones[0].harmonic, kappa)
        } else {
            let mut intervals = Vec::new();
            let mut lo = 0.0;
            for (i, cone) in cones.iter().enumerate() {
                let hi = splits.get(i).copied().unwrap_or(f64::INFINITY);
                intervals.extend(GeneratorMap::from_harmonic(&cone.harmonic, kappa).restricted(lo, hi));
                lo = hi;
            }
            GeneratorMap { intervals }.merged()
        };
        let (z1, z2) = if single {
            (cones[0].lower, cones[0].upper)
        } else {
            (cones[0].upper, cones[cones.len() - 1].lower)
        };
        let mut warnings = Vec::new();
        for cone in &cones {
            if !single || cone.harmonic.family() != Family::WorstCase {
                continue;
            }
            let p = params;
            let drift = p.mu_x - p.mu_y;
            let spread = kappa * (p.sigma_x + p.sigma_y);
            let half = 0.5 * p.sigma_sq();
            match cone.harmonic.c() {
                RefPoint::Zero if !(drift > spread + half) => warnings.push(format!(
                    "lower-boundary drift condition mu_x - mu_y > kappa (sigma_x + sigma_y) + sigma^2/2 fails \
                     ({drift} <= {}); the exit time to z = {} need not be finite almost surely",
                    spread + half,
                    cone.upper
                )),
                RefPoint::Infinity if !(drift < half - spread) => warnings.push(format!(
                    "upper-boundary drift condition mu_x - mu_y < sigma^2/2 - kappa (sigma_x + sigma_y) fails \
                     ({drift} >= {}); the exit time to z = {} need not be finite almost surely",
                    half - spread,
                    cone.lower
                )),
                _ => {}
            }
        }
        let (c_star, l_c_star, value_scale) = if single {
            let h = &cones[0].harmonic;
            (Some(h.c()), Some(h.switch_point()), Some(cones[0].scale))
        } else {
            (None, None, None)
        };
        Solution {
            params: *params,
            payoff: payoff.clone(),
            kind,
            topology: if single { Topology::Interior } else { Topology::Exterior },
            c_star,
            l_c_star,
            z1,
            z2,
            value_scale,
            cones,
            generator_map,
            warnings,
            notes: Vec::new(),
        }
    }

    pub fn harmonic(&self) -> Option<&HarmonicFn> {
        match self.topology {
            Topology::Interior => self.cones.first().map(|c| &c.harmonic),
            Topology::Exterior => None,
        }
    }

    /// Continuation cone containing `z`, if any.
    pub fn cone_at(&self, z: f64) -> Option<&Cone> {
        self.cones.iter().find(|c| c.contains(z))
    }

    pub fn in_continuation(&self, z: f64) -> bool {
        self.cone_at(z).is_some()
    }

    /// Reduced value `v(z) = V(z, 1)`.
    pub fn value_z(&self, z: f64) -> Result<f64> {
        if !(z > 0.0 && z.is_finite()) {
            return Err(Error::NonpositiveZ(z));
        }
        Ok(match self.cone_at(z) {
            Some(cone) => cone.scale * cone.harmonic.value(z),
            None => self.payoff.eval_upper(z),
        })
    }

    /// `V(x, y)`.
    pub fn value(&self, x: f64, y: f64) -> Result<f64> {
        check_state(x, y)?;
        Ok(y * self.value_z(x / y)?)
    }

    pub fn worst_case_generator(&self, x: f64, y: f64) -> Result<GeneratorPair> {
        check_state(x, y)?;
        Ok(self.generator_map.at(x / y))
    }

    /// Reference point `c*` as a float (`0` or `inf` for the limits).
    pub fn c_value(&self) -> Option<f64> {
        self.c_star.map(RefPoint::to_f64)
    }
}

fn check_state(x: f64, y: f64) -> Result<()> {
    if x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite() {
        Ok(())
    } else {
        Err(Error::NonpositiveState { x, y })
    }
}

pub fn value(sol: &Solution, x: f64, y: f64) -> Result<f64> {
    sol.value(x, y)
}

pub fn worst_case_generator(sol: &Solution, x: f64, y: f64) -> Result<GeneratorPair> {
    sol.worst_case_generator(x, y)
}
