//! Positively homogeneous exercise payoffs `F(x, y) = y f(x / y)`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PayoffKind {
    /// `min((x - K y)^+, (M y - x)^+)`.
    Compound { k: f64, m: f64 },
    /// `max(x, y)`.
    Floor,
    /// `|x - y|`.
    Straddle,
    /// `x` if `x >= k y`, else `y`.
    Digital { k: f64 },
    /// `(x - K y)^+`.
    ExchangeCall { k: f64 },
    /// `(K y - x)^+`.
    ExchangePut { k: f64 },
    Custom { name: String },
}

/// Monotonicity of `F` in `(x, y)`; selects a constant worst-case prior when monotone.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Monotonicity {
    IncXDecY,
    IncXIncY,
    DecXIncY,
    DecXDecY,
    NonMonotone,
}

type ReducedFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Exercise payoff with its reduced form `f(z) = F(z, 1)`.
#[derive(Clone)]
pub struct Payoff {
    kind: PayoffKind,
    monotonicity: Monotonicity,
    custom: Option<ReducedFn>,
    custom_breaks: Vec<f64>,
}

impl fmt::Debug for Payoff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Payoff")
            .field("kind", &self.kind)
            .field("monotonicity", &self.monotonicity)
            .finish()
    }
}

impl PartialEq for Payoff {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.monotonicity == other.monotonicity && self.custom.is_none() && other.custom.is_none()
    }
}

impl Payoff {
    pub fn compound(k: f64, m: f64) -> Result<Self> {
        if !(k > 0.0 && m > k && m.is_finite()) {
            return Err(Error::BadStrikes { k, m });
        }
        Ok(Self::builtin(PayoffKind::Compound { k, m }, Monotonicity::NonMonotone))
    }

    pub fn floor() -> Self {
        Self::builtin(PayoffKind::Floor, Monotonicity::IncXIncY)
    }

    pub fn straddle() -> Self {
        Self::builtin(PayoffKind::Straddle, Monotonicity::NonMonotone)
    }

    pub fn digital(k: f64) -> Result<Self> {
        if !(k > 0.0 && k < 1.0) {
            return Err(Error::BadDigitalStrike(k));
        }
        Ok(Self::builtin(PayoffKind::Digital { k }, Monotonicity::NonMonotone))
    }

    pub fn exchange_call(k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::BadExchangeStrike(k));
        }
        Ok(Self::builtin(PayoffKind::ExchangeCall { k }, Monotonicity::IncXDecY))
    }

    pub fn exchange_put(k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::BadExchangeStrike(k));
        }
        Ok(Self::builtin(PayoffKind::ExchangePut { k }, Monotonicity::DecXIncY))
    }

    /// A user-supplied reduced payoff. Monotonicity must be stated, never inferred.
    pub fn custom<F>(name: impl Into<String>, f: F, monotonicity: Monotonicity) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Payoff {
            kind: PayoffKind::Custom { name: name.into() },
            monotonicity,
            custom: Some(Arc::new(f)),
            custom_breaks: Vec::new(),
        }
    }

    /// Declares kinks of a custom payoff so maximization checks them exactly.
    pub fn with_breakpoints(mut self, mut breaks: Vec<f64>) -> Self {
        breaks.retain(|b| *b > 0.0 && b.is_finite());
        breaks.sort_by(f64::total_cmp);
        self.custom_breaks = breaks;
        self
    }

    fn builtin(kind: PayoffKind, monotonicity: Monotonicity) -> Self {
        Payoff { kind, monotonicity, custom: None, custom_breaks: Vec::new() }
    }

    pub fn kind(&self) -> &PayoffKind {
        &self.kind
    }

    pub fn monotonicity(&self) -> Monotonicity {
        self.monotonicity
    }

    pub fn name(&self) -> String {
        match &self.kind {
            PayoffKind::Compound { .. } => "compound".into(),
            PayoffKind::Floor => "floor".into(),
            PayoffKind::Straddle => "straddle".into(),
            PayoffKind::Digital { .. } => "digital".into(),
            PayoffKind::ExchangeCall { .. } => "exchange_call".into(),
            PayoffKind::ExchangePut { .. } => "exchange_put".into(),
            PayoffKind::Custom { name } => name.clone(),
        }
    }

    /// Reduced payoff `f(z) = F(z, 1)`. Built-ins are right-continuous.
    pub fn eval(&self, z: f64) -> f64 {
        match &self.kind {
            PayoffKind::Compound { k, m } => (z - k).max(0.0).min((m - z).max(0.0)),
            PayoffKind::Floor => z.max(1.0),
            PayoffKind::Straddle => (z - 1.0).abs(),
            PayoffKind::Digital { k } => {
                if z >= *k {
                    z
                } else {
                    1.0
                }
            }
            PayoffKind::ExchangeCall { k } => (z - k).max(0.0),
            PayoffKind::ExchangePut { k } => (k - z).max(0.0),
            PayoffKind::Custom { .. } => self.custom.as_ref().map_or(f64::NAN, |f| f(z)),
        }
    }

    /// Left limit `f(z-)`; differs from [`Payoff::eval`] only at jumps.
    pub fn eval_left(&self, z: f64) -> f64 {
        match &self.kind {
            PayoffKind::Digital { k } if z == *k => 1.0,
            _ => self.eval(z),
        }
    }

    /// Upper semicontinuous envelope `max(f(z-), f(z))`: the value on the stopping set.
    pub fn eval_upper(&self, z: f64) -> f64 {
        self.eval(z).max(self.eval_left(z))
    }

    /// Two-dimensional payoff `F(x, y)` written directly, not through `f`.
    pub fn eval_xy(&self, x: f64, y: f64) -> f64 {
        match &self.kind {
            PayoffKind::Compound { k, m } => (x - k * y).max(0.0).min((m * y - x).max(0.0)),
            PayoffKind::Floor => x.max(y),
            PayoffKind::Straddle => (x - y).abs(),
            PayoffKind::Digital { k } => {
                if x >= k * y {
                    x
                } else {
                    y
                }
            }
            PayoffKind::ExchangeCall { k } => (x - k * y).max(0.0),
            PayoffKind::ExchangePut { k } => (k * y - x).max(0.0),
            PayoffKind::Custom { .. } => y * self.eval(x / y),
        }
    }

    /// `f'(z)` where the reduced payoff is differentiable; `None` at kinks,
    /// jumps and for custom payoffs.
    pub fn derivative(&self, z: f64) -> Option<f64> {
        if self.breakpoints().iter().any(|b| (b - z).abs() <= 1e-12 * b.max(1.0)) {
            return None;
        }
        match &self.kind {
            PayoffKind::Compound { k, m } => {
                let l = 0.5 * (k + m);
                Some(if z < *k || z > *m {
                    0.0
                } else if z < l {
                    1.0
                } else {
                    -1.0
                })
            }
            PayoffKind::Floor => Some(if z > 1.0 { 1.0 } else { 0.0 }),
            PayoffKind::Straddle => Some(if z > 1.0 { 1.0 } else { -1.0 }),
            PayoffKind::Digital { k } => Some(if z > *k { 1.0 } else { 0.0 }),
            PayoffKind::ExchangeCall { k } => Some(if z > *k { 1.0 } else { 0.0 }),
            PayoffKind::ExchangePut { k } => Some(if z < *k { -1.0 } else { 0.0 }),
            PayoffKind::Custom { .. } => None,
        }
    }

    /// Points where `f` has a kink or a jump.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.kind {
            PayoffKind::Compound { k, m } => vec![*k, 0.5 * (k + m), *m],
            PayoffKind::Floor | PayoffKind::Straddle => vec![1.0],
            PayoffKind::Digital { k } => vec![*k],
            PayoffKind::ExchangeCall { k } | PayoffKind::ExchangePut { k } => vec![*k],
            PayoffKind::Custom { .. } => self.custom_breaks.clone(),
        }
    }

    /// Default evaluation point for the one-sided suprema comparison.
    pub fn natural_split(&self) -> f64 {
        match &self.kind {
            PayoffKind::Compound { k, m } => 0.5 * (k + m),
            PayoffKind::Floor | PayoffKind::Straddle => 1.0,
            PayoffKind::Digital { k } => *k,
            PayoffKind::ExchangeCall { k } | PayoffKind::ExchangePut { k } => *k,
            PayoffKind::Custom { .. } => 1.0,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct PayoffDoc {
    #[serde(flatten)]
    kind: PayoffKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    monotonicity: Option<Monotonicity>,
}

impl TryFrom<PayoffKind> for Payoff {
    type Error = Error;

    fn try_from(kind: PayoffKind) -> Result<Self> {
        match kind {
            PayoffKind::Compound { k, m } => Payoff::compound(k, m),
            PayoffKind::Floor => Ok(Payoff::floor()),
            PayoffKind::Straddle => Ok(Payoff::straddle()),
            PayoffKind::Digital { k } => Payoff::digital(k),
            PayoffKind::ExchangeCall { k } => Payoff::exchange_call(k),
            PayoffKind::ExchangePut { k } => Payoff::exchange_put(k),
            PayoffKind::Custom { name } => Err(Error::UnsupportedPayoff(name)),
        }
    }
}

impl Serialize for Payoff {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PayoffDoc { kind: self.kind.clone(), monotonicity: Some(self.monotonicity) }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Payoff {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let doc = PayoffDoc::deserialize(d)?;
        Payoff::try_from(doc.kind).map_err(serde::de::Error::custom)
    }
}
