//! Finite-difference oracle for the robust obstacle problem in the ratio
//! state. The oracle works with the two-dimensional generator directly and
//! takes the pointwise worst case over all four corners of the generator
//! box, so it does not rely on any regime analysis.

use ambistop_core::{GeneratorSigns, ModelParams, Payoff};
use serde::Serialize;

use crate::error::{Result, VerifyError};

/// Log-uniform grid on `[z_min, z_max]` plus iteration limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PdeConfig {
    pub z_min: f64,
    pub z_max: f64,
    pub n: usize,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for PdeConfig {
    fn default() -> Self {
        PdeConfig { z_min: 0.1, z_max: 10.0, n: 4001, max_iter: 10_000, tol: 1e-10 }
    }
}

impl PdeConfig {
    pub fn new(z_min: f64, z_max: f64, n: usize) -> Self {
        PdeConfig { z_min, z_max, n, ..Default::default() }
    }

    fn validate(&self) -> Result<()> {
        if !(self.z_min > 0.0 && self.z_max > self.z_min && self.z_max.is_finite()) {
            return Err(VerifyError::InvalidConfig(format!("bad domain [{}, {}]", self.z_min, self.z_max)));
        }
        if self.n < 5 {
            return Err(VerifyError::InvalidConfig(format!("grid needs at least 5 nodes, got {}", self.n)));
        }
        if !(self.tol > 0.0) || self.max_iter == 0 {
            return Err(VerifyError::InvalidConfig("tolerance and iteration cap must be positive".into()));
        }
        Ok(())
    }

    fn step(&self) -> f64 {
        (self.z_max / self.z_min).ln() / (self.n - 1) as f64
    }
}

/// Nodal solution of the obstacle problem.
#[derive(Debug, Clone, Serialize)]
pub struct PdeGrid {
    pub z_min: f64,
    pub z_max: f64,
    pub n: usize,
    pub z: Vec<f64>,
    pub values: Vec<f64>,
    pub obstacle: Vec<f64>,
    /// Contact set; the two end nodes carry the Dirichlet condition and count as stopped.
    pub stopping: Vec<bool>,
    /// Generator signs attaining the worst case at each node.
    pub policy: Vec<GeneratorSigns>,
    /// Contact nodes adjacent to a continuation node.
    pub boundaries_detected: Vec<f64>,
    pub iterations: usize,
}

impl PdeGrid {
    /// Linear interpolation in `log z`; `None` outside the grid.
    pub fn value_at(&self, z: f64) -> Option<f64> {
        if !(z >= self.z_min && z <= self.z_max) {
            return None;
        }
        let h = (self.z_max / self.z_min).ln() / (self.n - 1) as f64;
        let s = (z / self.z_min).ln() / h;
        let i = (s.floor() as usize).min(self.n - 2);
        let w = s - i as f64;
        Some((1.0 - w) * self.values[i] + w * self.values[i + 1])
    }

    /// Width of the grid cell starting at `z`.
    pub fn cell_width(&self, z: f64) -> f64 {
        let h = (self.z_max / self.z_min).ln() / (self.n - 1) as f64;
        z * h.exp_m1()
    }

    pub fn in_continuation(&self, z: f64) -> bool {
        let h = (self.z_max / self.z_min).ln() / (self.n - 1) as f64;
        let i = ((z / self.z_min).ln() / h).round();
        i >= 0.0 && (i as usize) < self.n && !self.stopping[i as usize]
    }
}

/// Row of `-L_theta` in log coordinates: `diag u_i - lower u_{i-1} - upper u_{i+1}`.
#[derive(Debug, Clone, Copy)]
struct Stencil {
    lower: f64,
    diag: f64,
    upper: f64,
}

impl Stencil {
    fn new(p: &ModelParams, g: GeneratorSigns, h: f64) -> Self {
        let a = 0.5 * p.sigma_sq();
        let theta1 = p.kappa * g.x as f64;
        let theta2 = p.kappa * g.y as f64;
        // y v(x/y) with dX/X = (mu_x - sigma_x theta1) dt + ..., dY/Y = (mu_y - sigma_y theta2) dt + ...
        let drift = p.mu_x - p.mu_y - p.sigma_x * theta1 + p.sigma_y * theta2 - a;
        let discount = p.r - p.mu_y + p.sigma_y * theta2;
        let d = a / (h * h);
        let (lower, upper) = if drift.abs() * h <= 2.0 * a {
            (d - 0.5 * drift / h, d + 0.5 * drift / h)
        } else if drift > 0.0 {
            (d, d + drift / h)
        } else {
            (d - drift / h, d)
        };
        Stencil { lower, diag: lower + upper + discount, upper }
    }

    fn apply(&self, u: &[f64], i: usize) -> f64 {
        self.diag * u[i] - self.lower * u[i - 1] - self.upper * u[i + 1]
    }
}

enum Policy {
    Worst,
    Fixed(Vec<usize>),
}

/// Robust value on a log grid: nature picks the generator pair that minimises
/// the value at every node, the agent stops where the payoff dominates.
pub fn pde_oracle(payoff: &Payoff, params: &ModelParams, cfg: &PdeConfig) -> Result<PdeGrid> {
    solve(payoff, params, cfg, Policy::Worst)
}

/// Same obstacle problem with nature's generator pinned to `policy(z)`.
pub fn pde_fixed_policy(
    payoff: &Payoff,
    params: &ModelParams,
    cfg: &PdeConfig,
    policy: impl Fn(f64) -> GeneratorSigns,
) -> Result<PdeGrid> {
    cfg.validate()?;
    let idx = grid(cfg)
        .iter()
        .map(|&z| {
            let g = policy(z);
            GeneratorSigns::ALL.iter().position(|&s| s == g).expect("generator signs are +-1")
        })
        .collect();
    solve(payoff, params, cfg, Policy::Fixed(idx))
}

fn grid(cfg: &PdeConfig) -> Vec<f64> {
    let h = cfg.step();
    let mut z: Vec<f64> = (0..cfg.n).map(|i| cfg.z_min * (h * i as f64).exp()).collect();
    z[cfg.n - 1] = cfg.z_max;
    z
}

fn solve(payoff: &Payoff, params: &ModelParams, cfg: &PdeConfig, policy: Policy) -> Result<PdeGrid> {
    cfg.validate()?;
    params.check()?;
    let n = cfg.n;
    let h = cfg.step();
    let z = grid(cfg);
    let f: Vec<f64> = z.iter().map(|&z| payoff.eval(z)).collect();
    let stencils = GeneratorSigns::ALL.map(|g| Stencil::new(params, g, h));
    let diag_scale = stencils.iter().map(|s| s.diag.abs()).fold(0.0, f64::max);
    let slack = |u: f64| 1e-13 * diag_scale * u.abs();

    let (mut choice, optimise) = match policy {
        Policy::Fixed(c) => (c, false),
        Policy::Worst => {
            let start = (0..4).max_by(|&a, &b| stencils[a].diag.total_cmp(&stencils[b].diag)).unwrap();
            (vec![start; n], true)
        }
    };
    let mut stop = vec![false; n];
    stop[0] = true;
    stop[n - 1] = true;
    let mut u;
    let mut iterations = 0;

    let best = |u: &[f64], i: usize| -> (usize, f64) {
        (0..4).map(|g| (g, stencils[g].apply(u, i))).max_by(|a, b| a.1.total_cmp(&b.1)).unwrap()
    };

    loop {
        loop {
            iterations += 1;
            if iterations > cfg.max_iter {
                return Err(VerifyError::NoConvergence { iterations, residual: f64::NAN });
            }
            u = tridiagonal(&stencils, &choice, &stop, &f);
            if !optimise {
                break;
            }
            let mut changed = false;
            for i in 1..n - 1 {
                if stop[i] {
                    continue;
                }
                let current = stencils[choice[i]].apply(&u, i);
                let (g, val) = best(&u, i);
                if val > current + slack(u[i]) {
                    choice[i] = g;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }

        let mut changed = false;
        for i in 1..n - 1 {
            let cont = if optimise { best(&u, i).1 } else { stencils[choice[i]].apply(&u, i) };
            let gap = (u[i] - f[i]) * stencils[choice[i]].diag;
            let want = if gap < cont - slack(u[i]) {
                true
            } else if cont < gap - slack(u[i]) {
                false
            } else {
                stop[i]
            };
            if want != stop[i] {
                stop[i] = want;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    if optimise {
        for i in 1..n - 1 {
            choice[i] = best(&u, i).0;
        }
    }
    let residual = (1..n - 1)
        .map(|i| {
            let st = &stencils[choice[i]];
            let cont = if optimise { best(&u, i).1 } else { st.apply(&u, i) };
            (u[i] - f[i]).min(cont / st.diag).abs() / (u[i].abs() + 1.0)
        })
        .fold(0.0, f64::max);
    if residual > cfg.tol {
        return Err(VerifyError::NoConvergence { iterations, residual });
    }

    let boundaries_detected = (1..n - 2)
        .filter(|&i| stop[i] != stop[i + 1])
        .map(|i| if stop[i] { z[i] } else { z[i + 1] })
        .collect();
    Ok(PdeGrid {
        z_min: cfg.z_min,
        z_max: cfg.z_max,
        n,
        policy: choice.iter().map(|&g| GeneratorSigns::ALL[g]).collect(),
        z,
        values: u,
        obstacle: f,
        stopping: stop,
        boundaries_detected,
        iterations,
    })
}

/// Thomas solve of the linear system for a fixed contact set and policy.
fn tridiagonal(stencils: &[Stencil; 4], choice: &[usize], stop: &[bool], f: &[f64]) -> Vec<f64> {
    let n = f.len();
    let mut c_prime = vec![0.0; n];
    let mut d_prime = vec![0.0; n];
    for i in 0..n {
        let (a, b, c, d) = if i == 0 || i == n - 1 || stop[i] {
            (0.0, 1.0, 0.0, f[i])
        } else {
            let s = &stencils[choice[i]];
            (-s.lower, s.diag, -s.upper, 0.0)
        };
        let (cp, dp) = if i == 0 { (0.0, 0.0) } else { (c_prime[i - 1], d_prime[i - 1]) };
        let m = b - a * cp;
        c_prime[i] = c / m;
        d_prime[i] = (d - a * dp) / m;
    }
    let mut u = vec![0.0; n];
    u[n - 1] = d_prime[n - 1];
    for i in (0..n - 1).rev() {
        u[i] = d_prime[i] - c_prime[i] * u[i + 1];
    }
    u
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_config() {
        let p = ModelParams::new(0.02, 0.04, 0.05, 0.1, 0.05, 0.1).unwrap();
        let bad = PdeConfig::new(1.0, 0.5, 100);
        assert!(matches!(pde_oracle(&Payoff::floor(), &p, &bad), Err(VerifyError::InvalidConfig(_))));
        let tiny = PdeConfig::new(0.5, 2.0, 3);
        assert!(pde_oracle(&Payoff::floor(), &p, &tiny).is_err());
    }

    #[test]
    fn stencil_is_an_m_matrix_row() {
        let p = ModelParams::new(0.5, -0.3, 0.05, 0.05, 0.6, 0.4).unwrap();
        for g in GeneratorSigns::ALL {
            for h in [1e-4, 1e-2, 1.0] {
                let s = Stencil::new(&p, g, h);
                assert!(s.lower >= 0.0 && s.upper >= 0.0);
            }
        }
    }

    #[test]
    fn interpolation_hits_nodes() {
        let p = ModelParams::new(0.02, 0.04, 0.05, 0.1, 0.05, 0.1).unwrap();
        let g = pde_oracle(&Payoff::floor(), &p, &PdeConfig::new(0.1, 10.0, 201)).unwrap();
        for i in [0, 17, 100, 200] {
            assert!((g.value_at(g.z[i]).unwrap() - g.values[i]).abs() < 1e-9 * g.values[i]);
        }
        assert!(g.value_at(0.05).is_none());
    }
}
