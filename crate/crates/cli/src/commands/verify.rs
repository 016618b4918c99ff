use ambistop_core::optimize::{side_sup, Side};
use ambistop_core::{Cone, GeneratorMap, HarmonicFn, ModelParams, RatioDiffusion, RefPoint, Solution, Topology};
use ambistop_verify::{mc_exit_time, mc_martingale_check, mc_value_check, pde_oracle, PdeConfig, SimConfig, SimResult};
use serde::Serialize;

use super::{emit, json, payoff_label, solve_payoff};
use crate::args::VerifyArgs;
use crate::config::{model_params, pick, required_payoff, sim, FileConfig};
use crate::error::{CliError, Result};

const Z_LIMIT: f64 = 3.0;
const PDE_REL: f64 = 1e-2;

#[derive(Debug, Serialize)]
struct CheckReport {
    name: &'static str,
    passed: bool,
    estimate: f64,
    target: f64,
    std_error: Option<f64>,
    tolerance: f64,
    detail: String,
}

#[derive(Debug, Serialize)]
struct Report {
    payoff: String,
    params: ModelParams,
    override_c: Option<f64>,
    z0: f64,
    seed: u64,
    checks: Vec<CheckReport>,
    passed: bool,
}

/// Returns whether every check passed.
pub fn run(args: &VerifyArgs) -> Result<bool> {
    let file = FileConfig::load(args.model.config.as_deref(), "verify")?;
    file.check_format("json")?;
    let params = model_params(&args.model, &file, None)?;
    let payoff = required_payoff(&args.payoff, &file)?;
    let mut sol = solve_payoff(&payoff, &params)?;
    let override_c = pick(args.override_c, file.override_c);
    if let Some(c) = override_c {
        sol = with_reference_point(&sol, c)?;
    }

    let z0 = start_point(&sol);
    let mut checks = vec![];
    let points = pick(args.pde_points, file.pde_points).unwrap_or(4001);
    checks.extend(oracle_checks(&sol, z0, points)?);

    let c = sol
        .cone_at(z0)
        .and_then(|cone| cone.harmonic.c().finite())
        .unwrap_or(z0);
    let mart_cfg = sim(&args.sim, &file, 1e-3, 1.0, 20_000);
    let mart = mc_martingale_check(&params, c, z0, 1.0, 1.0, &mart_cfg)?;
    let target = ambistop_core::HarmonicFn::new(&params, c)?.value(z0);
    checks.push(mc_check("martingale", &mart, target, format!("h_c at t = 1 with c = {c}")));

    let value_cfg = sim(&args.sim, &file, 1e-3, 500.0, 20_000);
    let value = mc_value_check(&sol, z0, 1.0, &value_cfg)?;
    checks.push(mc_check(
        "equilibrium_value",
        &value,
        sol.value_z(z0)?,
        format!("truncated fraction {}", value.truncated_fraction),
    ));

    let (a, b) = if sol.topology == Topology::Interior && sol.z1 > 0.0 && sol.z2.is_finite() {
        (sol.z1, sol.z2)
    } else {
        (z0 / 1.5, z0 * 1.5)
    };
    let d = RatioDiffusion::new(&params, c)?;
    let exit_cfg = SimConfig { dt: value_cfg.dt.max(1e-3), horizon: value_cfg.horizon.max(2000.0), ..value_cfg };
    let exit = mc_exit_time(&d, a, b, z0, &SimConfig { n_paths: exit_cfg.n_paths.min(10_000), ..exit_cfg })?;
    let quad = ambistop_core::expected_exit_time(&d, a, b, z0)?;
    checks.push(mc_check("exit_time", &exit, quad, format!("interval ({a}, {b})")));

    let passed = checks.iter().all(|c| c.passed);
    let report = Report {
        payoff: payoff_label(&sol.payoff),
        params,
        override_c,
        z0,
        seed: mart_cfg.seed,
        checks,
        passed,
    };
    emit(pick(args.out.as_deref(), file.output.as_deref()), &json(&report))?;
    Ok(passed)
}

/// A continuation point well inside the first cone that contains reachable stopping boundaries.
fn start_point(sol: &Solution) -> f64 {
    match sol.topology {
        Topology::Interior if sol.z1 > 0.0 && sol.z2.is_finite() => (sol.z1 * sol.z2).sqrt(),
        Topology::Interior if sol.z2.is_finite() => sol.z2 / 1.25,
        Topology::Interior => sol.z1 * 1.25,
        Topology::Exterior => sol.z1 / 1.25,
    }
}

fn mc_check(name: &'static str, res: &SimResult, target: f64, detail: String) -> CheckReport {
    let z = res.z_score(target);
    CheckReport {
        name,
        passed: z.abs() < Z_LIMIT,
        estimate: res.estimate,
        target,
        std_error: Some(res.std_error),
        tolerance: Z_LIMIT,
        detail: format!("z-score {z:.3}; {detail}"),
    }
}

fn oracle_checks(sol: &Solution, z0: f64, n: usize) -> Result<Vec<CheckReport>> {
    let s = (sol.z1 * sol.z2).sqrt().max(1e-3);
    let cfg = PdeConfig::new(s / 100.0, s * 100.0, n);
    let grid = pde_oracle(&sol.payoff, &sol.params, &cfg)?;
    let want: Vec<f64> = [sol.z1, sol.z2].into_iter().filter(|z| *z > 0.0 && z.is_finite()).collect();
    let found = &grid.boundaries_detected;
    let mut worst = 0.0f64;
    let mut ok = found.len() == want.len();
    for (f, w) in found.iter().zip(&want) {
        let tol = (2.0 * grid.cell_width(*w)).max(PDE_REL * w);
        ok &= (f - w).abs() <= tol;
        worst = worst.max((f - w).abs() / w);
    }
    let boundaries = CheckReport {
        name: "oracle_boundaries",
        passed: ok,
        estimate: worst,
        target: 0.0,
        std_error: None,
        tolerance: PDE_REL,
        detail: format!("oracle {found:?} vs solver {want:?}; tolerance max(2 cells, 1e-2 relative)"),
    };

    let mut max_err = 0.0f64;
    for (i, &z) in grid.z.iter().enumerate() {
        if z < s / 10.0 || z > s * 10.0 || !sol.in_continuation(z) {
            continue;
        }
        let v = sol.value_z(z)?;
        max_err = max_err.max((grid.values[i] - v).abs() / v.abs().max(1e-300));
    }
    let values = CheckReport {
        name: "oracle_values",
        passed: max_err <= PDE_REL,
        estimate: max_err,
        target: 0.0,
        std_error: None,
        tolerance: PDE_REL,
        detail: format!("max relative error on continuation nodes; oracle value at z0 = {:?}", grid.value_at(z0)),
    };
    Ok(vec![boundaries, values])
}

/// Rebuilds a single-cone solution around reference point `c`: boundaries at
/// the maximisers of the payoff-to-harmonic ratio on each side, value matched
/// at the lower one.
fn with_reference_point(sol: &Solution, c: f64) -> Result<Solution> {
    if sol.topology != Topology::Interior || sol.c_value().is_none() {
        return Err(CliError::Usage("--override-c needs a solution with a single two-sided continuation region".into()));
    }
    let h = HarmonicFn::new(&sol.params, c)?;
    let below = side_sup(&sol.payoff, &h, c, Side::Below).maximum();
    let above = side_sup(&sol.payoff, &h, c, Side::Above).maximum();
    let (Some(lo), Some(hi)) = (below, above) else {
        return Err(CliError::Numeric(format!("payoff-to-harmonic ratio is unbounded for c = {c}")));
    };
    let mut out = sol.clone();
    out.generator_map = GeneratorMap::from_harmonic(&h, sol.params.kappa);
    out.c_star = Some(RefPoint::Finite(c));
    out.l_c_star = Some(h.switch_point());
    out.value_scale = Some(lo.value);
    out.z1 = lo.z;
    out.z2 = hi.z;
    out.cones = vec![Cone { lower: lo.z, upper: hi.z, scale: lo.value, harmonic: h }];
    out.notes.push(format!("reference point overridden to c = {c}"));
    Ok(out)
}
