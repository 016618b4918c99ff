//! Model parameterization and solvability classification.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Drifts, volatilities, discount rate and ambiguity level of the two-factor
/// model `dX = mu_x X dt + sigma_x X dW1`, `dY = mu_y Y dt + sigma_y Y dW2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    pub mu_x: f64,
    pub mu_y: f64,
    pub sigma_x: f64,
    pub sigma_y: f64,
    pub r: f64,
    pub kappa: f64,
}

/// Which harmonic construction the parameters admit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolvabilityClass {
    /// `mu_y - kappa sigma_y < r <= mu_x - kappa sigma_x`: two-piece `h_c`, no upper switch.
    TwoBranch,
    /// `r > max(mu_x - kappa sigma_x, mu_y - kappa sigma_y)`: three-piece `h_c`.
    ThreeBranch,
    /// `r <= mu_y - kappa sigma_y`: no harmonic construction exists.
    Infeasible,
}

impl ModelParams {
    pub fn new(mu_x: f64, mu_y: f64, sigma_x: f64, sigma_y: f64, r: f64, kappa: f64) -> Result<Self> {
        let p = ModelParams { mu_x, mu_y, sigma_x, sigma_y, r, kappa };
        p.check()?;
        Ok(p)
    }

    /// Checks the structural invariants (finite values, positive volatilities,
    /// non-negative ambiguity). Solvability is a separate question, see
    /// [`ModelParams::validate`].
    pub fn check(&self) -> Result<()> {
        let all = [self.mu_x, self.mu_y, self.sigma_x, self.sigma_y, self.r, self.kappa];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("all parameters must be finite".into()));
        }
        if self.sigma_x <= 0.0 || self.sigma_y <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "volatilities must be positive (sigma_x = {}, sigma_y = {})",
                self.sigma_x, self.sigma_y
            )));
        }
        if self.kappa < 0.0 {
            return Err(Error::InvalidParams(format!("kappa must be non-negative, got {}", self.kappa)));
        }
        Ok(())
    }

    pub fn with_kappa(self, kappa: f64) -> Self {
        ModelParams { kappa, ..self }
    }

    /// `sigma_x^2 + sigma_y^2`, the variance rate of `log(X/Y)`.
    pub fn sigma_sq(&self) -> f64 {
        self.sigma_x * self.sigma_x + self.sigma_y * self.sigma_y
    }

    /// `mu_y - kappa sigma_y`; `r` must exceed it for any harmonic function to exist.
    pub fn y_bound(&self) -> f64 {
        self.mu_y - self.kappa * self.sigma_y
    }

    /// `mu_x - kappa sigma_x`; `r` above it selects the three-branch construction.
    pub fn x_bound(&self) -> f64 {
        self.mu_x - self.kappa * self.sigma_x
    }

    pub fn validate(&self) -> SolvabilityClass {
        if self.r <= self.y_bound() {
            SolvabilityClass::Infeasible
        } else if self.r <= self.x_bound() {
            SolvabilityClass::TwoBranch
        } else {
            SolvabilityClass::ThreeBranch
        }
    }

    /// Structural check plus feasibility; returns the class when usable.
    pub fn require_feasible(&self) -> Result<SolvabilityClass> {
        self.check()?;
        match self.validate() {
            SolvabilityClass::Infeasible => Err(Error::InfeasibleDiscount { r: self.r, bound: self.y_bound() }),
            class => Ok(class),
        }
    }

    /// Requires `r > max(mu_x - kappa sigma_x, mu_y - kappa sigma_y)`.
    pub fn require_three_branch(&self) -> Result<()> {
        match self.require_feasible()? {
            SolvabilityClass::ThreeBranch => Ok(()),
            _ => Err(Error::InfeasibleDiscount { r: self.r, bound: self.x_bound() }),
        }
    }

    /// Drift of the homogeneous reduction under constant generators:
    /// coefficient of `z v'` in `1/2 Sigma^2 z^2 v'' + beta z v' - gamma v`.
    pub fn reduced_drift(&self, g: GeneratorSigns) -> f64 {
        self.mu_x - self.mu_y - self.kappa * (self.sigma_x * g.x as f64 - self.sigma_y * g.y as f64)
    }

    /// Effective discount rate of the homogeneous reduction under constant generators.
    pub fn reduced_discount(&self, g: GeneratorSigns) -> f64 {
        self.r - self.mu_y + self.kappa * self.sigma_y * g.y as f64
    }
}

/// Signs of the density generators `(theta_1, theta_2) = kappa (x, y)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GeneratorSigns {
    pub x: i8,
    pub y: i8,
}

impl GeneratorSigns {
    pub const fn new(x: i8, y: i8) -> Self {
        GeneratorSigns { x, y }
    }

    pub fn scaled(self, kappa: f64) -> GeneratorPair {
        GeneratorPair { theta1: kappa * self.x as f64, theta2: kappa * self.y as f64 }
    }

    /// All four corner choices of the generator box.
    pub const ALL: [GeneratorSigns; 4] = [
        GeneratorSigns::new(-1, 1),
        GeneratorSigns::new(1, 1),
        GeneratorSigns::new(1, -1),
        GeneratorSigns::new(-1, -1),
    ];
}

/// Density generator values `(theta_1, theta_2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorPair {
    pub theta1: f64,
    pub theta2: f64,
}

/// The three worst-case regimes of the ratio state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    /// `h' <= 0`: nature plays `(-kappa, +kappa)`.
    A1,
    /// `0 < z h' <= h`: nature plays `(+kappa, +kappa)`.
    A2,
    /// `z h' > h`: nature plays `(+kappa, -kappa)`.
    A3,
}

impl Regime {
    pub const ALL: [Regime; 3] = [Regime::A1, Regime::A2, Regime::A3];

    pub fn generators(self) -> GeneratorSigns {
        match self {
            Regime::A1 => GeneratorSigns::new(-1, 1),
            Regime::A2 => GeneratorSigns::new(1, 1),
            Regime::A3 => GeneratorSigns::new(1, -1),
        }
    }

    /// `(beta, gamma)` of the regime ODE `1/2 Sigma^2 z^2 h'' + beta z h' - gamma h = 0`.
    pub fn coefficients(self, p: &ModelParams) -> (f64, f64) {
        let g = self.generators();
        (p.reduced_drift(g), p.reduced_discount(g))
    }
}
