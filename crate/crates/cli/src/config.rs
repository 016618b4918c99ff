//! Configuration files and flag/file/default precedence.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use ambistop_core::{ModelParams, Payoff};
use serde::{Deserialize, Deserializer};
use serde_json::{Map, Value};

use crate::args::{ModelFlags, PayoffFlags, SimFlags, StrikeFlags};
use crate::csv::num;
use crate::error::{io_err, CliError, Result};

/// Evenly spaced grid of `points` values from `start` to `stop` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

impl GridSpec {
    pub const fn new(start: f64, stop: f64, points: usize) -> Self {
        GridSpec { start, stop, points }
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        if self.points == 0 || !self.start.is_finite() || !self.stop.is_finite() {
            return Err(CliError::Usage(format!("empty or invalid grid {self}")));
        }
        if self.points == 1 {
            return Ok(vec![self.start]);
        }
        let span = self.stop - self.start;
        let last = (self.points - 1) as f64;
        Ok((0..self.points).map(|i| self.start + span * i as f64 / last).collect())
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", num(self.start), num(self.stop), self.points)
    }
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let parts: Vec<&str> = s.split([',', ':']).map(str::trim).collect();
        let bad = || format!("expected `start,stop,points`, got `{s}`");
        let [a, b, n] = parts[..] else { return Err(bad()) };
        Ok(GridSpec {
            start: a.parse().map_err(|_| bad())?,
            stop: b.parse().map_err(|_| bad())?,
            points: n.parse().map_err(|_| bad())?,
        })
    }
}

impl<'de> Deserialize<'de> for GridSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Triple(f64, f64, usize),
            Text(String),
        }
        match Raw::deserialize(d)? {
            Raw::Triple(start, stop, points) => Ok(GridSpec { start, stop, points }),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Keys accepted in a configuration file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub command: Option<String>,
    pub mu_x: Option<f64>,
    pub mu_y: Option<f64>,
    pub sigma_x: Option<f64>,
    pub sigma_y: Option<f64>,
    pub r: Option<f64>,
    pub kappa: Option<f64>,
    pub payoff: Option<String>,
    pub k: Option<f64>,
    pub strike_k: Option<f64>,
    pub strike_m: Option<f64>,
    pub output: Option<PathBuf>,
    pub format: Option<String>,
    pub table: Option<PathBuf>,
    pub figure: Option<String>,
    pub kappa_grid: Option<GridSpec>,
    pub sigma_y_grid: Option<GridSpec>,
    pub z_grid: Option<GridSpec>,
    pub seed: Option<u64>,
    pub n_paths: Option<usize>,
    pub dt: Option<f64>,
    pub horizon: Option<f64>,
    pub pde_points: Option<usize>,
    pub override_c: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub z0: Option<f64>,
    pub c: Option<f64>,
    pub mc: Option<bool>,
}

impl FileConfig {
    pub fn load(path: Option<&Path>, command: &str) -> Result<Self> {
        let Some(path) = path else { return Ok(FileConfig::default()) };
        let text = std::fs::read_to_string(path).map_err(io_err(path))?;
        let cfg = Self::parse(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        if let Some(c) = &cfg.command {
            if c != command {
                return Err(CliError::Config(format!("config is for `{c}`, not `{command}`")));
            }
        }
        Ok(cfg)
    }

    /// Parses JSON when the document starts with `{`, `key = value` lines otherwise.
    pub fn parse(text: &str) -> std::result::Result<Self, String> {
        if text.trim_start().starts_with('{') {
            return serde_json::from_str(text).map_err(|e| e.to_string());
        }
        let mut map = Map::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| format!("line {}: expected `key = value`", i + 1))?;
            let (key, value) = (key.trim(), value.trim());
            let parsed = serde_json::from_str(value).unwrap_or_else(|_| Value::String(value.trim_matches('"').to_string()));
            if map.insert(key.to_string(), parsed).is_some() {
                return Err(format!("line {}: duplicate key `{key}`", i + 1));
            }
        }
        serde_json::from_value(Value::Object(map)).map_err(|e| e.to_string())
    }

    /// Rejects a `format` key that the command cannot produce.
    pub fn check_format(&self, allowed: &str) -> Result<()> {
        match &self.format {
            Some(f) if f != allowed => Err(CliError::Config(format!("format `{f}` is not available here; use `{allowed}`"))),
            _ => Ok(()),
        }
    }
}

/// Flag, then file, then default.
pub fn pick<T>(flag: Option<T>, file: Option<T>) -> Option<T> {
    flag.or(file)
}

fn require<T>(v: Option<T>, flag: &str) -> Result<T> {
    v.ok_or_else(|| CliError::Usage(format!("missing required value `--{flag}` (or `{}` in the config file)", flag.replace('-', "_"))))
}

/// Resolves model parameters, falling back to `defaults` for any missing field.
pub fn model_params(flags: &ModelFlags, file: &FileConfig, defaults: Option<&ModelParams>) -> Result<ModelParams> {
    let get = |flag: Option<f64>, file: Option<f64>, def: Option<f64>, name: &str| require(pick(flag, file).or(def), name);
    let d = defaults.copied();
    Ok(ModelParams::new(
        get(flags.mu_x, file.mu_x, d.map(|p| p.mu_x), "mu-x")?,
        get(flags.mu_y, file.mu_y, d.map(|p| p.mu_y), "mu-y")?,
        get(flags.sigma_x, file.sigma_x, d.map(|p| p.sigma_x), "sigma-x")?,
        get(flags.sigma_y, file.sigma_y, d.map(|p| p.sigma_y), "sigma-y")?,
        get(flags.r, file.r, d.map(|p| p.r), "r")?,
        get(flags.kappa, file.kappa, d.map(|p| p.kappa), "kappa")?,
    )?)
}

/// Strike values after precedence.
#[derive(Debug, Clone, Copy, Default)]
pub struct Strikes {
    pub k: Option<f64>,
    pub strike_k: Option<f64>,
    pub strike_m: Option<f64>,
}

impl Strikes {
    pub fn resolve(flags: &StrikeFlags, file: &FileConfig) -> Self {
        Strikes {
            k: pick(flags.k, file.k),
            strike_k: pick(flags.strike_k, file.strike_k),
            strike_m: pick(flags.strike_m, file.strike_m),
        }
    }
}

pub fn payoff(flags: &PayoffFlags, file: &FileConfig) -> Result<Option<Payoff>> {
    let Some(name) = pick(flags.payoff.clone(), file.payoff.clone()) else { return Ok(None) };
    let s = Strikes::resolve(&flags.strikes, file);
    let p = match name.as_str() {
        "compound" => Payoff::compound(require(s.strike_k, "strike-k")?, require(s.strike_m, "strike-m")?)?,
        "floor" => Payoff::floor(),
        "straddle" => Payoff::straddle(),
        "digital" => Payoff::digital(require(s.k, "k")?)?,
        "exchange-call" => Payoff::exchange_call(require(s.k, "k")?)?,
        "exchange-put" => Payoff::exchange_put(require(s.k, "k")?)?,
        other => return Err(CliError::Usage(format!("unknown payoff `{other}`"))),
    };
    Ok(Some(p))
}

pub fn required_payoff(flags: &PayoffFlags, file: &FileConfig) -> Result<Payoff> {
    require(payoff(flags, file)?, "payoff")
}

/// Monte Carlo settings after precedence; the seed flag already folds in the environment.
pub fn sim(flags: &SimFlags, file: &FileConfig, dt: f64, horizon: f64, n_paths: usize) -> ambistop_verify::SimConfig {
    let base = ambistop_verify::SimConfig::default();
    ambistop_verify::SimConfig {
        dt: pick(flags.dt, file.dt).unwrap_or(dt),
        horizon: pick(flags.horizon, file.horizon).unwrap_or(horizon),
        n_paths: pick(flags.n_paths, file.n_paths).unwrap_or(n_paths),
        seed: pick(flags.seed, file.seed).unwrap_or(base.seed),
        antithetic: true,
    }
}

pub fn required<T>(flag: Option<T>, file: Option<T>, name: &str) -> Result<T> {
    require(pick(flag, file), name)
}
