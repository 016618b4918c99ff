use ambistop_core::{GeneratorPair, Solution};

use super::{emit, json, params_line, payoff_label, run_header, solve_payoff};
use crate::args::SolveArgs;
use crate::config::{model_params, pick, required_payoff, FileConfig, GridSpec};
use crate::csv::{num, Table};
use crate::error::Result;

pub fn run(args: &SolveArgs) -> Result<()> {
    let file = FileConfig::load(args.model.config.as_deref(), "solve")?;
    file.check_format("json")?;
    let params = model_params(&args.model, &file, None)?;
    let payoff = required_payoff(&args.payoff, &file)?;
    let sol = solve_payoff(&payoff, &params)?;
    for w in &sol.warnings {
        eprintln!("warning: {w}");
    }
    for n in &sol.notes {
        eprintln!("note: {n}");
    }
    emit(pick(args.out.as_deref(), file.output.as_deref()), &json(&sol))?;

    if let Some(path) = pick(args.table.as_deref(), file.table.as_deref()) {
        let grid = pick(args.z_grid, file.z_grid).unwrap_or_else(|| default_grid(&sol));
        emit(Some(path), &value_table(&sol, &grid)?.render())?;
    }
    if let Some(path) = &args.dump_harmonic {
        let harmonics: Vec<_> = sol.cones.iter().map(|c| &c.harmonic).collect();
        emit(Some(path), &json(&harmonics))?;
    }
    Ok(())
}

fn default_grid(sol: &Solution) -> GridSpec {
    let (lo, hi) = (sol.z1 / 2.0, sol.z2 * 2.0);
    if lo > 0.0 && hi.is_finite() {
        GridSpec::new(lo, hi, 201)
    } else {
        GridSpec::new(0.1, 10.0, 201)
    }
}

/// Names the worst-case regime from the generator signs.
fn regime_label(g: GeneratorPair) -> &'static str {
    match (g.theta1.signum() as i8, g.theta2.signum() as i8) {
        _ if g.theta1 == 0.0 && g.theta2 == 0.0 => "-",
        (-1, 1) => "A1",
        (1, 1) => "A2",
        (1, -1) => "A3",
        _ => "(-,-)",
    }
}

fn value_table(sol: &Solution, grid: &GridSpec) -> Result<Table> {
    let mut t = Table::new(&["z", "value", "payoff", "theta1", "theta2", "regime"]);
    t.comment(run_header(&format!("solve payoff={} {}", payoff_label(&sol.payoff), params_line(&sol.params))));
    for z in grid.values()? {
        if !(z > 0.0) {
            continue;
        }
        let g = sol.generator_map.at(z);
        t.row(vec![
            num(z),
            num(sol.value_z(z)?),
            num(sol.payoff.eval(z)),
            num(g.theta1),
            num(g.theta2),
            regime_label(g).into(),
        ]);
    }
    Ok(t)
}
