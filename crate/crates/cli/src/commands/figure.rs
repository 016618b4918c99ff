use ambistop_core::{solve_compound, solve_digital, solve_floor, solve_straddle, ModelParams, Solution};
use rayon::prelude::*;

use super::{emit, params_line, run_header};
use crate::args::FigureArgs;
use crate::config::{model_params, pick, FileConfig, GridSpec, Strikes};
use crate::csv::{num, opt, Table};
use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Figure {
    Compound,
    CompoundVolatility,
    Floor,
    Straddle,
    DigitalValue,
    DigitalBounds,
}

impl Figure {
    fn parse(id: &str) -> Result<Self> {
        Ok(match id {
            "fig1" => Figure::Compound,
            "fig2" => Figure::CompoundVolatility,
            "fig3-floor" => Figure::Floor,
            "fig3-straddle" => Figure::Straddle,
            "fig5" => Figure::DigitalValue,
            "fig6" => Figure::DigitalBounds,
            other => {
                return Err(CliError::Usage(format!(
                    "unknown figure `{other}` (expected fig1, fig2, fig3-floor, fig3-straddle, fig5 or fig6)"
                )))
            }
        })
    }

    /// Parameters quoted with each figure; `kappa` is a placeholder for swept figures.
    fn defaults(self) -> ModelParams {
        let (mx, my, sx, sy, r, k) = match self {
            Figure::Compound => (0.035, 0.035, 0.1, 0.1, 0.0351, 0.0),
            Figure::CompoundVolatility => (0.035, 0.035, 0.05, 0.1, 0.0351, 0.0),
            Figure::Floor => (0.02, 0.04, 0.05, 0.1, 0.05, 0.0),
            Figure::Straddle => (0.025, 0.03, 0.075, 0.1, 0.035, 0.0),
            Figure::DigitalValue => (0.02, 0.04, 0.05, 0.1, 0.041, 0.28),
            Figure::DigitalBounds => (0.02, 0.04, 0.05, 0.1, 0.041, 0.0),
        };
        ModelParams { mu_x: mx, mu_y: my, sigma_x: sx, sigma_y: sy, r, kappa: k }
    }
}

pub fn run(args: &FigureArgs) -> Result<()> {
    let file = FileConfig::load(args.model.config.as_deref(), "figure")?;
    file.check_format("csv")?;
    let id = pick(args.id.clone(), file.figure.clone())
        .ok_or_else(|| CliError::Usage("missing figure id (fig1, fig2, fig3-floor, fig3-straddle, fig5 or fig6)".into()))?;
    let fig = Figure::parse(&id)?;
    let strikes = Strikes::resolve(&args.strikes, &file);
    let base = fig.defaults();
    // Swept figures take kappa from the grid; a lone --kappa means a one-point grid.
    let kappa_flag = pick(args.model.kappa, file.kappa);
    let kappa_grid = pick(args.kappa_grid, file.kappa_grid).or(kappa_flag.map(|k| GridSpec::new(k, k, 1)));
    let mut flags = args.model.clone();
    flags.kappa = None;
    let mut file_params = file;
    file_params.kappa = None;
    let params = model_params(&flags, &file_params, Some(&base))?;
    let file = file_params;

    let table = match fig {
        Figure::Compound | Figure::Floor | Figure::Straddle | Figure::DigitalBounds => {
            let grid = kappa_grid.unwrap_or(GridSpec::new(0.0, 0.5, 51));
            let solver = boundary_solver(fig, strikes)?;
            let kappas = grid.values()?;
            let sols = sweep(&kappas, |k| solver(&params.with_kappa(*k)))?;
            let with_c = fig != Figure::Compound;
            let header: &[&str] = if with_c { &["kappa", "z1", "z2", "c_star", "l_c_star"] } else { &["kappa", "z1", "z2"] };
            let mut t = Table::new(header);
            t.comment(run_header(&format!("figure={id} {} kappa_grid={grid}{}", sweep_params(&params), strike_note(fig, strikes))));
            for (k, s) in kappas.iter().zip(&sols) {
                let mut row = vec![num(*k), num(s.z1), num(s.z2)];
                if with_c {
                    row.extend([opt(s.c_value()), opt(s.l_c_star)]);
                }
                t.row(row);
            }
            t
        }
        Figure::CompoundVolatility => {
            let grid = kappa_grid.ok_or_else(|| {
                CliError::Usage("fig2 needs an ambiguity level: pass --kappa or --kappa-grid".into())
            })?;
            let sig = pick(args.sigma_y_grid, file.sigma_y_grid).unwrap_or(GridSpec::new(0.02, 0.3, 57));
            let (km, mm) = compound_strikes(strikes);
            let pairs: Vec<(f64, f64)> =
                grid.values()?.into_iter().flat_map(|k| sig.values().unwrap_or_default().into_iter().map(move |s| (k, s))).collect();
            if pairs.is_empty() {
                return Err(CliError::Usage(format!("empty grid {sig}")));
            }
            let sols = sweep(&pairs, |&(k, s)| solve_compound(km, mm, &ModelParams { sigma_y: s, kappa: k, ..params }).map_err(Into::into))?;
            let mut t = Table::new(&["kappa", "sigma_y", "z1", "z2"]);
            t.comment(run_header(&format!(
                "figure={id} mu_x={} mu_y={} sigma_x={} r={} kappa_grid={grid} sigma_y_grid={sig}{}",
                num(params.mu_x),
                num(params.mu_y),
                num(params.sigma_x),
                num(params.r),
                strike_note(fig, strikes)
            )));
            for ((k, s), sol) in pairs.iter().zip(&sols) {
                t.row(vec![num(*k), num(*s), num(sol.z1), num(sol.z2)]);
            }
            t
        }
        Figure::DigitalValue => {
            let kappa = kappa_flag.unwrap_or(base.kappa);
            let p = params.with_kappa(kappa);
            let k = strikes.k.unwrap_or(0.85);
            let sol = solve_digital(k, &p)?;
            let grid = pick(args.z_grid, file.z_grid).unwrap_or(GridSpec::new(0.5, 1.5, 201));
            let mut t = Table::new(&["z", "value", "payoff"]);
            t.comment(run_header(&format!("figure={id} {} k={} z_grid={grid}", params_line(&p), num(k))));
            t.comment(format!("z1={} c_star={} z2={}", num(sol.z1), opt(sol.c_value()), num(sol.z2)));
            for z in grid.values()? {
                if z > 0.0 {
                    t.row(vec![num(z), num(sol.value_z(z)?), num(sol.payoff.eval(z))]);
                }
            }
            t
        }
    };
    emit(pick(args.out.as_deref(), file.output.as_deref()), &table.render())
}

type Solver = Box<dyn Fn(&ModelParams) -> Result<Solution> + Sync>;

fn compound_strikes(s: Strikes) -> (f64, f64) {
    (s.strike_k.unwrap_or(1.0), s.strike_m.unwrap_or(2.0))
}

fn boundary_solver(fig: Figure, strikes: Strikes) -> Result<Solver> {
    Ok(match fig {
        Figure::Compound => {
            let (k, m) = compound_strikes(strikes);
            Box::new(move |p| Ok(solve_compound(k, m, p)?))
        }
        Figure::Floor => Box::new(|p| Ok(solve_floor(p)?)),
        Figure::Straddle => Box::new(|p| Ok(solve_straddle(p)?)),
        _ => {
            let k = strikes.k.unwrap_or(0.85);
            Box::new(move |p| Ok(solve_digital(k, p)?))
        }
    })
}

/// Solves every grid point concurrently; rows come back in grid order.
fn sweep<T: Sync>(points: &[T], f: impl Fn(&T) -> Result<Solution> + Sync + Send) -> Result<Vec<Solution>> {
    points.par_iter().map(f).collect()
}

fn sweep_params(p: &ModelParams) -> String {
    format!("mu_x={} mu_y={} sigma_x={} sigma_y={} r={}", num(p.mu_x), num(p.mu_y), num(p.sigma_x), num(p.sigma_y), num(p.r))
}

fn strike_note(fig: Figure, s: Strikes) -> String {
    match fig {
        Figure::Compound | Figure::CompoundVolatility => {
            let (k, m) = compound_strikes(s);
            format!(" K={} M={}", num(k), num(m))
        }
        Figure::DigitalBounds | Figure::DigitalValue => format!(" k={}", num(s.k.unwrap_or(0.85))),
        _ => String::new(),
    }
}
