use ambistop_core::{expected_exit_time, RatioDiffusion};
use ambistop_verify::{mc_exit_time, SimResult};
use serde::Serialize;

use super::{emit, json, solve_payoff};
use crate::args::ExitTimeArgs;
use crate::config::{model_params, payoff, pick, required, sim, FileConfig};
use crate::error::{CliError, Result};

#[derive(Debug, Serialize)]
struct Report {
    a: f64,
    b: f64,
    z0: f64,
    c: f64,
    quadrature: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    mc: Option<SimResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    z_score: Option<f64>,
}

pub fn run(args: &ExitTimeArgs) -> Result<()> {
    let file = FileConfig::load(args.model.config.as_deref(), "exit-time")?;
    file.check_format("json")?;
    let params = model_params(&args.model, &file, None)?;
    let a = required(args.a, file.a, "a")?;
    let b = required(args.b, file.b, "b")?;
    let z0 = required(args.z0, file.z0, "z0")?;
    let c = match (pick(args.c, file.c), payoff(&args.payoff, &file)?) {
        (Some(c), _) => c,
        (None, Some(p)) => solve_payoff(&p, &params)?
            .c_value()
            .ok_or_else(|| CliError::Usage("the payoff's solution has no single reference point; pass --c".into()))?,
        (None, None) => return Err(CliError::Usage("missing required value `--c` (or a `--payoff` to take it from)".into())),
    };
    let d = RatioDiffusion::new(&params, c)?;
    let quadrature = expected_exit_time(&d, a, b, z0)?;
    let mc = if args.mc || file.mc.unwrap_or(false) {
        Some(mc_exit_time(&d, a, b, z0, &sim(&args.sim, &file, 1e-2, 2000.0, 10_000))?)
    } else {
        None
    };
    let z_score = mc.as_ref().map(|m| m.z_score(quadrature));
    let report = Report { a, b, z0, c, quadrature, mc, z_score };
    emit(pick(args.out.as_deref(), file.output.as_deref()), &json(&report))
}
