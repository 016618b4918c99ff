use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::GridSpec;

#[derive(Debug, Parser)]
#[command(name = "ambistop", version, about = "Optimal stopping of homogeneous two-asset payoffs under ambiguity")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one stopping problem and write the solution as JSON.
    Solve(SolveArgs),
    /// Reproduce a figure's curves as CSV.
    Figure(FigureArgs),
    /// Cross-check a solution against the PDE oracle and Monte Carlo.
    Verify(VerifyArgs),
    /// Expected exit time of the worst-case ratio from an interval.
    ExitTime(ExitTimeArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Solve(_) => "solve",
            Command::Figure(_) => "figure",
            Command::Verify(_) => "verify",
            Command::ExitTime(_) => "exit-time",
        }
    }
}

#[derive(Debug, Clone, Default, Args)]
pub struct ModelFlags {
    /// Configuration file (JSON, or `key = value` lines).
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub mu_x: Option<f64>,
    #[arg(long)]
    pub mu_y: Option<f64>,
    #[arg(long)]
    pub sigma_x: Option<f64>,
    #[arg(long)]
    pub sigma_y: Option<f64>,
    #[arg(long)]
    pub r: Option<f64>,
    #[arg(long)]
    pub kappa: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct StrikeFlags {
    /// Strike of the digital or exchange payoff.
    #[arg(long)]
    pub k: Option<f64>,
    /// Lower strike K of the compound payoff.
    #[arg(long)]
    pub strike_k: Option<f64>,
    /// Upper strike M of the compound payoff.
    #[arg(long)]
    pub strike_m: Option<f64>,
}

#[derive(Debug, Clone, Default, Args)]
pub struct PayoffFlags {
    /// compound, floor, straddle, digital, exchange-call or exchange-put.
    #[arg(long)]
    pub payoff: Option<String>,
    #[command(flatten)]
    pub strikes: StrikeFlags,
}

#[derive(Debug, Clone, Default, Args)]
pub struct SimFlags {
    #[arg(long, env = "AMBIG_STOP_SEED")]
    pub seed: Option<u64>,
    #[arg(long)]
    pub n_paths: Option<usize>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub horizon: Option<f64>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SolveArgs {
    #[command(flatten)]
    pub model: ModelFlags,
    #[command(flatten)]
    pub payoff: PayoffFlags,
    /// Solution JSON path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Also write a value-function table as CSV.
    #[arg(long)]
    pub table: Option<PathBuf>,
    /// Grid of the value table as `start,stop,points`.
    #[arg(long)]
    pub z_grid: Option<GridSpec>,
    /// Write the harmonic function's parameters as JSON.
    #[arg(long)]
    pub dump_harmonic: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct FigureArgs {
    /// fig1, fig2, fig3-floor, fig3-straddle, fig5 or fig6.
    pub id: Option<String>,
    #[command(flatten)]
    pub model: ModelFlags,
    #[command(flatten)]
    pub strikes: StrikeFlags,
    /// Ambiguity grid as `start,stop,points`.
    #[arg(long)]
    pub kappa_grid: Option<GridSpec>,
    /// Volatility grid for fig2 as `start,stop,points`.
    #[arg(long)]
    pub sigma_y_grid: Option<GridSpec>,
    /// Ratio grid for fig5 as `start,stop,points`.
    #[arg(long)]
    pub z_grid: Option<GridSpec>,
    /// CSV path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub model: ModelFlags,
    #[command(flatten)]
    pub payoff: PayoffFlags,
    #[command(flatten)]
    pub sim: SimFlags,
    /// Replace the optimal reference point by this value before checking.
    #[arg(long)]
    pub override_c: Option<f64>,
    /// Nodes of the PDE grid.
    #[arg(long)]
    pub pde_points: Option<usize>,
    /// Report JSON path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct ExitTimeArgs {
    #[command(flatten)]
    pub model: ModelFlags,
    /// Payoff whose optimal reference point is used when `--c` is absent.
    #[command(flatten)]
    pub payoff: PayoffFlags,
    #[command(flatten)]
    pub sim: SimFlags,
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub b: Option<f64>,
    #[arg(long)]
    pub z0: Option<f64>,
    /// Reference point of the worst-case generators.
    #[arg(long)]
    pub c: Option<f64>,
    /// Also estimate by Monte Carlo.
    #[arg(long)]
    pub mc: bool,
    /// Report JSON path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}
