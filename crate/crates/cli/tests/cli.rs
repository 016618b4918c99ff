use std::path::Path;
use std::process::{Command, Output};

use ambistop_core::{solve_digital, ModelParams};
use serde_json::Value;

const FIG5: [&str; 10] = ["--mu-x", "0.02", "--mu-y", "0.04", "--sigma-x", "0.05", "--sigma-y", "0.1", "--r", "0.041"];
const FIG1: [&str; 10] = ["--mu-x", "0.035", "--mu-y", "0.035", "--sigma-x", "0.1", "--sigma-y", "0.1", "--r", "0.0351"];

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ambistop")).args(args).env_remove("AMBIG_STOP_SEED").output().unwrap()
}

fn run_env(args: &[&str], seed: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ambistop")).args(args).env("AMBIG_STOP_SEED", seed).output().unwrap()
}

fn with<'a>(base: &[&'a str], extra: &[&'a str]) -> Vec<&'a str> {
    base.iter().chain(extra).copied().collect()
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn csv_rows(text: &str) -> (Vec<String>, Vec<String>, Vec<Vec<f64>>) {
    let comments = text.lines().filter(|l| l.starts_with('#')).map(String::from).collect();
    let mut body = text.lines().filter(|l| !l.starts_with('#'));
    let header = body.next().unwrap().split(',').map(String::from).collect();
    let rows = body.map(|l| l.split(',').map(|c| c.parse().unwrap_or(f64::NAN)).collect()).collect();
    (comments, header, rows)
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn solve_digital_reproduces_reference_numbers() {
    let v = stdout_json(&run(&with(&["solve", "--payoff", "digital", "--k", "0.85", "--kappa", "0.28"], &FIG5)));
    assert!((v["z1"].as_f64().unwrap() - 0.85).abs() < 5e-4);
    assert!((v["c_star"].as_f64().unwrap() - 0.899722).abs() < 5e-4);
    assert!((v["z2"].as_f64().unwrap() - 1.0877).abs() < 5e-4);
}

#[test]
fn solve_compound_flags_corner() {
    let out = run(&with(&["solve", "--payoff", "compound", "--strike-k", "1", "--strike-m", "2", "--kappa", "0.05"], &FIG1));
    let v = stdout_json(&out);
    assert_eq!(v["z1"].as_f64(), Some(1.5));
    assert_eq!(v["z2"].as_f64(), Some(1.5));
    assert_eq!(v["notes"].as_array().unwrap().len(), 2);
    assert!(stderr(&out).contains("corner"));
}

#[test]
fn missing_flag_prints_usage() {
    let out = run(&["solve", "--payoff", "digital", "--k", "0.85"]);
    assert_eq!(code(&out), 2);
    let err = stderr(&out);
    assert!(err.contains("--mu-x") && err.contains("Usage: ambistop solve"), "{err}");
    assert_eq!(code(&run(&["solve", "--no-such-flag"])), 2);
    assert_eq!(code(&run(&with(&["solve", "--kappa", "0.1"], &FIG5))), 2);
}

#[test]
fn infeasible_discount_is_a_user_error() {
    let args = ["solve", "--payoff", "floor", "--mu-x", "0.02", "--mu-y", "0.04", "--sigma-x", "0.05", "--sigma-y", "0.1"];
    let out = run(&with(&args, &["--r", "0.01", "--kappa", "0.1"]));
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("does not exceed"));
}

#[test]
fn config_files_and_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let kv = write(
        dir.path(),
        "digital.cfg",
        "# reference digital\ncommand = solve\nmu_x = 0.02\nmu_y = 0.04\nsigma_x = 0.05\nsigma_y = 0.1\nr = 0.041\nkappa = 0.1\npayoff = digital\nk = 0.85\n",
    );
    let js = write(
        dir.path(),
        "digital.json",
        r#"{"mu_x": 0.02, "mu_y": 0.04, "sigma_x": 0.05, "sigma_y": 0.1, "r": 0.041, "kappa": 0.1, "payoff": "digital", "k": 0.85}"#,
    );
    let a = stdout_json(&run(&["solve", "--config", &kv]));
    let b = stdout_json(&run(&["solve", "--config", &js]));
    assert_eq!(a, b);
    assert_eq!(a["params"]["kappa"].as_f64(), Some(0.1));
    // The flag wins over the file.
    let c = stdout_json(&run(&["solve", "--config", &kv, "--kappa", "0.28"]));
    assert!((c["c_star"].as_f64().unwrap() - 0.899722).abs() < 5e-4);

    let wrong = write(dir.path(), "wrong.cfg", "command = verify\n");
    assert_eq!(code(&run(&["solve", "--config", &wrong])), 2);
    let typo = write(dir.path(), "typo.cfg", "sigmax = 0.1\n");
    assert_eq!(code(&run(&["solve", "--config", &typo])), 2);
    assert_eq!(code(&run(&["solve", "--config", "/nonexistent/file.cfg"])), 2);
    let csv_fmt = write(dir.path(), "fmt.cfg", "format = csv\n");
    assert_eq!(code(&run(&with(&["solve", "--config", &csv_fmt, "--payoff", "floor", "--kappa", "0.1"], &FIG5))), 2);
}

#[test]
fn value_table_and_harmonic_dump() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("value.csv");
    let dump = dir.path().join("h.json");
    let out_json = dir.path().join("sol.json");
    let args = [
        "solve", "--payoff", "straddle", "--mu-x", "0.025", "--mu-y", "0.03", "--sigma-x", "0.075", "--sigma-y", "0.1",
        "--r", "0.035", "--kappa", "0.05", "--z-grid", "0.2,3,57",
    ];
    let paths = ["--table", table.to_str().unwrap(), "--dump-harmonic", dump.to_str().unwrap(), "--out", out_json.to_str().unwrap()];
    let out = run(&with(&args, &paths));
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(out.stdout.is_empty());

    let text = std::fs::read_to_string(&table).unwrap();
    let (comments, header, rows) = csv_rows(&text);
    assert!(comments[0].contains("kappa=0.05") && comments[0].contains("straddle"));
    assert_eq!(header, ["z", "value", "payoff", "theta1", "theta2", "regime"]);
    assert_eq!(rows.len(), 57);
    for r in &rows {
        assert!(r[1] >= r[2] - 1e-12, "value below payoff: {r:?}");
    }
    for cell in text.lines().skip(2).flat_map(|l| l.split(',').take(3)) {
        let digits = cell.split('e').next().unwrap().chars().filter(char::is_ascii_digit).count();
        assert!(digits <= 13, "{cell}");
    }
    let regimes: Vec<&str> = text.lines().skip(2).map(|l| l.rsplit(',').next().unwrap()).collect();
    for r in ["A1", "A2", "A3"] {
        assert!(regimes.contains(&r));
    }

    let h: Value = serde_json::from_str(&std::fs::read_to_string(&dump).unwrap()).unwrap();
    let h = &h[0];
    assert!(h["c"].is_number() && h["l"].is_number());
    assert!(h["roots_a1"]["psi"].is_number() && h["roots_a3"]["phi"].is_number());
    let sol: Value = serde_json::from_str(&std::fs::read_to_string(&out_json).unwrap()).unwrap();
    assert_eq!(sol["c_star"], h["c"]);
}

#[test]
fn fig1_corner_then_decreasing() {
    let out = run(&["figure", "fig1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let (comments, header, rows) = csv_rows(&text);
    assert!(comments[0].contains("r=0.0351") && comments[0].contains("K=1 M=2"));
    assert_eq!(header, ["kappa", "z1", "z2"]);
    assert_eq!(rows.len(), 51);
    for w in rows.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if b[0] <= 0.1198 {
            assert_eq!(b[1], 1.5);
        } else if a[0] >= 0.1198 {
            assert!(b[1] < a[1], "{a:?} {b:?}");
        }
    }
}

#[test]
fn fig6_matches_library_sweep() {
    let out = run(&["figure", "fig6", "--kappa-grid", "0,0.4,9"]);
    let (_, header, rows) = csv_rows(std::str::from_utf8(&out.stdout).unwrap());
    assert_eq!(header, ["kappa", "z1", "z2", "c_star", "l_c_star"]);
    let mut floor_branch = false;
    for r in rows {
        let p = ModelParams::new(0.02, 0.04, 0.05, 0.1, 0.041, r[0]).unwrap();
        let s = solve_digital(0.85, &p).unwrap();
        assert!((r[1] - s.z1).abs() <= 1e-11 * s.z1 && (r[2] - s.z2).abs() <= 1e-11 * s.z2);
        floor_branch |= r[1] == 0.85;
    }
    assert!(floor_branch);
}

#[test]
fn figure_errors() {
    let fig2 = run(&["figure", "fig2"]);
    assert_eq!(code(&fig2), 2);
    assert!(stderr(&fig2).contains("--kappa"));
    assert_eq!(code(&run(&["figure", "fig7"])), 2);
    assert_eq!(code(&run(&["figure"])), 2);
    assert_eq!(code(&run(&["figure", "fig1", "--kappa-grid", "0,0.5,0"])), 2);
    assert_eq!(code(&run(&["figure", "fig1", "--kappa-grid", "0,0.5"])), 2);
}

#[test]
fn figures_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for id in ["fig1", "fig3-floor", "fig3-straddle", "fig5", "fig6"] {
        let a = dir.path().join(format!("{id}-a.csv"));
        let b = dir.path().join(format!("{id}-b.csv"));
        for p in [&a, &b] {
            assert!(run(&["figure", id, "--out", p.to_str().unwrap()]).status.success(), "{id}");
        }
        let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
        assert_eq!(ta, tb, "{id}");
        assert!(ta.starts_with(b"# ambistop"));
    }
    let fig2 = run(&["figure", "fig2", "--kappa", "0.2", "--sigma-y-grid", "0.05,0.2,4"]);
    let (comments, header, rows) = csv_rows(std::str::from_utf8(&fig2.stdout).unwrap());
    assert!(comments[0].contains("sigma_x=0.05"));
    assert_eq!(header, ["kappa", "sigma_y", "z1", "z2"]);
    assert_eq!(rows.len(), 4);
}

#[test]
fn fig5_value_curve() {
    let out = run(&["figure", "fig5"]);
    let (comments, header, rows) = csv_rows(std::str::from_utf8(&out.stdout).unwrap());
    assert_eq!(header, ["z", "value", "payoff"]);
    assert!(comments.iter().any(|c| c.contains("c_star=0.8997")));
    for r in &rows {
        assert!(r[1] >= r[2] - 1e-12);
        if r[0] > 1.0878 {
            assert!((r[1] - r[2]).abs() < 1e-12);
        }
    }
}

#[test]
fn verify_passes_on_reference_digital() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let out = run(&with(&["verify", "--payoff", "digital", "--k", "0.85", "--kappa", "0.28", "--out", report.to_str().unwrap()], &FIG5));
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["passed"], true);
    let names: Vec<&str> = v["checks"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["oracle_boundaries", "oracle_values", "martingale", "equilibrium_value", "exit_time"]);
    for c in v["checks"].as_array().unwrap() {
        assert!(c["tolerance"].is_number() && c["estimate"].is_number());
    }
}

#[test]
fn verify_detects_wrong_reference_point() {
    let c = format!("{}", 0.899722 * 1.1);
    let out = run(&with(&["verify", "--payoff", "digital", "--k", "0.85", "--kappa", "0.28", "--override-c", &c], &FIG5));
    assert_eq!(code(&out), 1);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let eq = v["checks"].as_array().unwrap().iter().find(|c| c["name"] == "equilibrium_value").unwrap();
    assert_eq!(eq["passed"], false);
}

#[test]
fn verify_without_ambiguity() {
    let out = run(&with(&["verify", "--payoff", "digital", "--k", "0.85", "--kappa", "0"], &FIG5));
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn exit_time_agrees_and_is_reproducible() {
    let args = with(&["exit-time", "--payoff", "digital", "--k", "0.85", "--kappa", "0.28", "--a", "0.5", "--b", "2", "--z0", "1", "--mc"], &FIG5);
    let seeded = with(&args, &["--seed", "9", "--n-paths", "4000"]);
    let a = run(&seeded);
    let v = stdout_json(&a);
    assert!(v["z_score"].as_f64().unwrap().abs() < 3.0, "{v}");
    assert_eq!(v["mc"]["config"]["seed"], 9);
    assert_eq!(a.stdout, run(&seeded).stdout);

    // The environment sets the seed unless the flag is given.
    let short = with(&args, &["--n-paths", "200"]);
    let env = stdout_json(&run_env(&short, "9"));
    assert_eq!(env["mc"]["config"]["seed"], 9);
    let flag = stdout_json(&run_env(&with(&short, &["--seed", "4"]), "9"));
    assert_eq!(flag["mc"]["config"]["seed"], 4);

    let quad = stdout_json(&run(&with(&["exit-time", "--kappa", "0.28", "--c", "0.9", "--a", "0.5", "--b", "2", "--z0", "1"], &FIG5)));
    assert!(quad.get("mc").is_none());
    assert!(quad["quadrature"].as_f64().unwrap() > 0.0);
}

#[test]
fn exit_time_rejects_start_on_boundary() {
    let out = run(&with(&["exit-time", "--kappa", "0.28", "--c", "0.9", "--a", "0.5", "--b", "2", "--z0", "0.5"], &FIG5));
    assert_eq!(code(&out), 2);
    let out = run(&with(&["exit-time", "--kappa", "0.28", "--a", "0.5", "--b", "2", "--z0", "1"], &FIG5));
    assert_eq!(code(&out), 2);
}
