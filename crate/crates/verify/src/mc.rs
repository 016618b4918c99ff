//! Monte Carlo simulation of `(X, Y)` under density generators that switch
//! with the ratio `Z = X / Y`.
//!
//! Every antithetic pair (or single path) draws from its own ChaCha8 stream
//! keyed by `(seed, index)`, so results do not depend on thread scheduling.
//! Per-pair results are collected in index order and reduced by pairwise
//! summation.

use ambistop_core::{GeneratorPair, HarmonicFn, ModelParams, RatioDiffusion, Solution};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, VerifyError};

/// Largest fraction of horizon-truncated paths tolerated by the stopping checks.
pub const MAX_TRUNCATION: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub dt: f64,
    pub horizon: f64,
    pub n_paths: usize,
    pub seed: u64,
    pub antithetic: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig { dt: 1e-3, horizon: 100.0, n_paths: 10_000, seed: 20_240_601, antithetic: true }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(VerifyError::InvalidConfig(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(VerifyError::InvalidConfig(format!("horizon must be positive, got {}", self.horizon)));
        }
        if self.n_paths < 2 {
            return Err(VerifyError::InvalidConfig(format!("need at least 2 paths, got {}", self.n_paths)));
        }
        if self.antithetic && self.n_paths % 2 != 0 {
            return Err(VerifyError::InvalidConfig(format!("antithetic sampling needs an even path count, got {}", self.n_paths)));
        }
        Ok(())
    }

    fn steps(&self, horizon: f64) -> usize {
        (horizon / self.dt).round().max(1.0) as usize
    }

    fn groups(&self) -> usize {
        if self.antithetic {
            self.n_paths / 2
        } else {
            self.n_paths
        }
    }

    fn signs(&self) -> &'static [f64] {
        if self.antithetic {
            &[1.0, -1.0]
        } else {
            &[1.0]
        }
    }

    fn rng(&self, group: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(group as u64);
        rng
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub estimate: f64,
    pub std_error: f64,
    /// Number of independent samples (antithetic pairs count once).
    pub n_effective: usize,
    pub truncated_fraction: f64,
    pub config: SimConfig,
}

impl SimResult {
    /// `|estimate - target|` in units of the standard error.
    pub fn z_score(&self, target: f64) -> f64 {
        let d = (self.estimate - target).abs();
        if self.std_error > 0.0 {
            d / self.std_error
        } else if d == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    }
}

/// Terminal states of a simulated ensemble, antithetic partners adjacent.
#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub t: f64,
}

/// Generators nature uses under the worst-case measure for reference point `c`.
pub fn worst_case_policy(params: &ModelParams, c: f64) -> Result<impl Fn(f64) -> GeneratorPair + Sync> {
    let kappa = params.kappa;
    let lc = if kappa == 0.0 { f64::INFINITY } else { HarmonicFn::new(params, c)?.switch_point() };
    Ok(move |z: f64| GeneratorPair {
        theta1: if z < c { -kappa } else { kappa },
        theta2: if z < lc { kappa } else { -kappa },
    })
}

#[derive(Debug, Clone, Copy)]
struct LogStepper {
    mu_x: f64,
    mu_y: f64,
    sigma_x: f64,
    sigma_y: f64,
    dt: f64,
    sqrt_dt: f64,
}

impl LogStepper {
    fn new(p: &ModelParams, dt: f64) -> Self {
        LogStepper { mu_x: p.mu_x, mu_y: p.mu_y, sigma_x: p.sigma_x, sigma_y: p.sigma_y, dt, sqrt_dt: dt.sqrt() }
    }

    /// Advances `(log x, log y)` with the generators frozen at the step start.
    #[inline]
    fn step(&self, lx: &mut f64, ly: &mut f64, theta: GeneratorPair, e1: f64, e2: f64) {
        let sx = self.sigma_x;
        let sy = self.sigma_y;
        *lx += (self.mu_x - sx * theta.theta1 - 0.5 * sx * sx) * self.dt + sx * self.sqrt_dt * e1;
        *ly += (self.mu_y - sy * theta.theta2 - 0.5 * sy * sy) * self.dt + sy * self.sqrt_dt * e2;
    }
}

fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 32 {
        return v.iter().sum();
    }
    let (a, b) = v.split_at(v.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

fn summarise(samples: &[f64], truncated: usize, cfg: &SimConfig) -> SimResult {
    let m = samples.len();
    let mean = pairwise_sum(samples) / m as f64;
    let dev: Vec<f64> = samples.iter().map(|s| (s - mean) * (s - mean)).collect();
    let var = pairwise_sum(&dev) / (m - 1).max(1) as f64;
    SimResult {
        estimate: mean,
        std_error: (var / m as f64).sqrt(),
        n_effective: m,
        truncated_fraction: truncated as f64 / cfg.n_paths as f64,
        config: *cfg,
    }
}

fn check_start(x0: f64, y0: f64) -> Result<()> {
    if x0 > 0.0 && y0 > 0.0 && x0.is_finite() && y0.is_finite() {
        Ok(())
    } else {
        Err(ambistop_core::Error::NonpositiveState { x: x0, y: y0 }.into())
    }
}

/// Simulates the ensemble to `cfg.horizon` under the worst-case generators for `c`.
pub fn simulate_worst_case(params: &ModelParams, c: f64, x0: f64, y0: f64, cfg: &SimConfig) -> Result<Ensemble> {
    cfg.validate()?;
    check_start(x0, y0)?;
    let policy = worst_case_policy(params, c)?;
    let stepper = LogStepper::new(params, cfg.dt);
    let steps = cfg.steps(cfg.horizon);
    let signs = cfg.signs();
    let groups: Vec<Vec<(f64, f64)>> = (0..cfg.groups())
        .into_par_iter()
        .map(|g| {
            let mut rng = cfg.rng(g);
            let mut state: Vec<(f64, f64)> = signs.iter().map(|_| (x0.ln(), y0.ln())).collect();
            for _ in 0..steps {
                let e1: f64 = rng.sample(StandardNormal);
                let e2: f64 = rng.sample(StandardNormal);
                for (s, (lx, ly)) in signs.iter().zip(state.iter_mut()) {
                    let theta = policy((*lx - *ly).exp());
                    stepper.step(lx, ly, theta, s * e1, s * e2);
                }
            }
            state.into_iter().map(|(lx, ly)| (lx.exp(), ly.exp())).collect()
        })
        .collect();
    let (x, y) = groups.into_iter().flatten().unzip();
    Ok(Ensemble { x, y, t: steps as f64 * cfg.dt })
}

/// Estimates `E[exp(-r t) Y_t h_c(X_t / Y_t)]` under the worst-case measure for `c`;
/// the martingale property predicts `y0 h_c(x0 / y0)`.
pub fn mc_martingale_check(params: &ModelParams, c: f64, x0: f64, y0: f64, t: f64, cfg: &SimConfig) -> Result<SimResult> {
    let policy = worst_case_policy(params, c)?;
    mc_martingale_check_with(params, c, x0, y0, t, cfg, policy)
}

/// [`mc_martingale_check`] with nature's generators given by `policy(z)`.
pub fn mc_martingale_check_with(
    params: &ModelParams,
    c: f64,
    x0: f64,
    y0: f64,
    t: f64,
    cfg: &SimConfig,
    policy: impl Fn(f64) -> GeneratorPair + Sync,
) -> Result<SimResult> {
    cfg.validate()?;
    check_start(x0, y0)?;
    params.require_three_branch()?;
    let h = HarmonicFn::new(params, c)?;
    if !(t >= 0.0 && t.is_finite()) {
        return Err(VerifyError::InvalidConfig(format!("time must be non-negative, got {t}")));
    }
    if t == 0.0 {
        let v = y0 * h.value(x0 / y0);
        return Ok(SimResult { estimate: v, std_error: 0.0, n_effective: cfg.groups(), truncated_fraction: 0.0, config: *cfg });
    }
    let stepper = LogStepper::new(params, cfg.dt);
    let steps = cfg.steps(t);
    let discount = (-params.r * steps as f64 * cfg.dt).exp();
    let signs = cfg.signs();
    let samples: Vec<f64> = (0..cfg.groups())
        .into_par_iter()
        .map(|g| {
            let mut rng = cfg.rng(g);
            let mut state = [(x0.ln(), y0.ln()); 2];
            for _ in 0..steps {
                let e1: f64 = rng.sample(StandardNormal);
                let e2: f64 = rng.sample(StandardNormal);
                for (s, (lx, ly)) in signs.iter().zip(state.iter_mut()) {
                    let theta = policy((*lx - *ly).exp());
                    stepper.step(lx, ly, theta, s * e1, s * e2);
                }
            }
            let total: f64 = state[..signs.len()].iter().map(|&(lx, ly)| ly.exp() * h.value((lx - ly).exp())).sum();
            discount * total / signs.len() as f64
        })
        .collect();
    Ok(summarise(&samples, 0, cfg))
}

/// Probability that a Brownian bridge in log space between `a` and `b` touches `barrier`.
#[inline]
fn bridge_hit(a: f64, b: f64, barrier: f64, var: f64) -> f64 {
    let (da, db) = (barrier - a, barrier - b);
    if da * db <= 0.0 {
        1.0
    } else {
        (-2.0 * da * db / var).exp()
    }
}

/// Interval `(lo, hi)` in log space, either end possibly infinite.
#[derive(Debug, Clone, Copy)]
struct LogInterval {
    lo: f64,
    hi: f64,
}

impl LogInterval {
    fn new(a: f64, b: f64) -> Self {
        LogInterval { lo: a.ln(), hi: b.ln() }
    }

    /// End crossed during the step (`false` lower, `true` upper) and the
    /// estimated fraction of the step elapsed at the crossing.
    fn exit(&self, from: f64, to: f64, var: f64, u: f64) -> Option<(bool, f64)> {
        if to <= self.lo {
            return Some((false, (self.lo - from) / (to - from)));
        }
        if to >= self.hi {
            return Some((true, (self.hi - from) / (to - from)));
        }
        let p_lo = if self.lo.is_finite() { bridge_hit(from, to, self.lo, var) } else { 0.0 };
        let p_hi = if self.hi.is_finite() { bridge_hit(from, to, self.hi, var) } else { 0.0 };
        if u < p_lo {
            Some((false, 0.5))
        } else if u < p_lo + (1.0 - p_lo) * p_hi {
            Some((true, 0.5))
        } else {
            None
        }
    }
}

/// Estimates `E[exp(-r tau) F(X_tau, Y_tau)]` for the solution's stopping rule
/// under the solution's generator map; the equilibrium predicts `value(sol, x0, y0)`.
pub fn mc_value_check(sol: &Solution, x0: f64, y0: f64, cfg: &SimConfig) -> Result<SimResult> {
    cfg.validate()?;
    check_start(x0, y0)?;
    let z0 = x0 / y0;
    let Some(cone) = sol.cone_at(z0) else {
        if sol.cones.iter().any(|c| c.lower == z0 || c.upper == z0) {
            let v = y0 * sol.payoff.eval_upper(z0);
            return Ok(SimResult { estimate: v, std_error: 0.0, n_effective: cfg.groups(), truncated_fraction: 0.0, config: *cfg });
        }
        return Err(VerifyError::StartInStoppingRegion { z: z0 });
    };
    let region = LogInterval::new(cone.lower, cone.upper);
    let stop_at = [cone.lower, cone.upper].map(|b| if b > 0.0 && b.is_finite() { sol.payoff.eval_upper(b) } else { 0.0 });
    let params = sol.params;
    let stepper = LogStepper::new(&params, cfg.dt);
    let var = params.sigma_sq() * cfg.dt;
    let steps = cfg.steps(cfg.horizon);
    let signs = cfg.signs();
    let map = &sol.generator_map;

    let results: Vec<(f64, usize)> = (0..cfg.groups())
        .into_par_iter()
        .map(|g| {
            let mut rng = cfg.rng(g);
            let mut state = [(x0.ln(), y0.ln()); 2];
            let mut payout: [Option<f64>; 2] = [None; 2];
            for k in 0..steps {
                if payout[..signs.len()].iter().all(Option::is_some) {
                    break;
                }
                let e1: f64 = rng.sample(StandardNormal);
                let e2: f64 = rng.sample(StandardNormal);
                let u: f64 = rng.gen();
                for (j, s) in signs.iter().enumerate() {
                    if payout[j].is_some() {
                        continue;
                    }
                    let (lx, ly) = &mut state[j];
                    let (from, ly0) = (*lx - *ly, *ly);
                    stepper.step(lx, ly, map.at(from.exp()), s * e1, s * e2);
                    if let Some((upper, frac)) = region.exit(from, *lx - *ly, var, u) {
                        let tau = (k as f64 + frac) * cfg.dt;
                        let y_tau = (ly0 + frac * (*ly - ly0)).exp();
                        payout[j] = Some((-params.r * tau).exp() * y_tau * stop_at[upper as usize]);
                    }
                }
            }
            let truncated = payout[..signs.len()].iter().filter(|p| p.is_none()).count();
            let mean = payout[..signs.len()].iter().map(|p| p.unwrap_or(0.0)).sum::<f64>() / signs.len() as f64;
            (mean, truncated)
        })
        .collect();
    finish(results, cfg)
}

/// Mean exit time of `Z` from `(a, b)` started at `z0`, simulated as a
/// one-dimensional regime-switching Brownian motion in `log z`.
pub fn mc_exit_time(d: &RatioDiffusion, a: f64, b: f64, z0: f64, cfg: &SimConfig) -> Result<SimResult> {
    cfg.validate()?;
    if !(a > 0.0 && a < z0 && z0 < b && b.is_finite()) {
        return Err(ambistop_core::Error::BadInterval { a, z: z0, b }.into());
    }
    let region = LogInterval::new(a, b);
    let var = d.sigma_sq * cfg.dt;
    let sd = var.sqrt();
    let (lc, ll) = (d.c.ln(), d.switch_point().ln());
    let drift = [d.mu1, d.mu2, d.mu3].map(|m| (m - 0.5 * d.sigma_sq) * cfg.dt);
    let steps = cfg.steps(cfg.horizon);
    let signs = cfg.signs();

    let results: Vec<(f64, usize)> = (0..cfg.groups())
        .into_par_iter()
        .map(|g| {
            let mut rng = cfg.rng(g);
            let mut state = [z0.ln(); 2];
            let mut exit: [Option<f64>; 2] = [None; 2];
            for k in 0..steps {
                if exit[..signs.len()].iter().all(Option::is_some) {
                    break;
                }
                let e: f64 = rng.sample(StandardNormal);
                let u: f64 = rng.gen();
                for (j, s) in signs.iter().enumerate() {
                    if exit[j].is_some() {
                        continue;
                    }
                    let from = state[j];
                    let piece = if from < lc { 0 } else if from < ll { 1 } else { 2 };
                    state[j] = from + drift[piece] + sd * s * e;
                    if let Some((_, frac)) = region.exit(from, state[j], var, u) {
                        exit[j] = Some((k as f64 + frac) * cfg.dt);
                    }
                }
            }
            let truncated = exit[..signs.len()].iter().filter(|p| p.is_none()).count();
            let mean = exit[..signs.len()].iter().map(|p| p.unwrap_or(cfg.horizon)).sum::<f64>() / signs.len() as f64;
            (mean, truncated)
        })
        .collect();
    finish(results, cfg)
}

fn finish(results: Vec<(f64, usize)>, cfg: &SimConfig) -> Result<SimResult> {
    let truncated = results.iter().map(|r| r.1).sum();
    let samples: Vec<f64> = results.into_iter().map(|r| r.0).collect();
    let res = summarise(&samples, truncated, cfg);
    if res.truncated_fraction > MAX_TRUNCATION {
        return Err(VerifyError::ExcessTruncation { fraction: res.truncated_fraction, limit: MAX_TRUNCATION });
    }
    Ok(res)
}
