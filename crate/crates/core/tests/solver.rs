mod common;

use ambistop_core::rootfind::bisect;
use ambistop_core::*;
use common::*;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

fn compound() -> Payoff {
    Payoff::compound(1.0, 2.0).unwrap()
}

fn pi_at(sol: &Solution, z: f64) -> f64 {
    let h = sol.harmonic().unwrap();
    sol.payoff.eval_upper(z) / h.value(z)
}

fn psi_kappa(kappa: f64) -> f64 {
    characteristic_roots(&fig1(kappa), Regime::A3).unwrap().psi
}

fn phi_kappa(kappa: f64) -> f64 {
    characteristic_roots(&fig1(kappa), Regime::A1).unwrap().phi
}

#[test]
fn digital_reference_numbers() {
    let t = std::time::Instant::now();
    let s = solve_digital(0.85, &fig5(0.28)).unwrap();
    assert!(t.elapsed().as_secs_f64() < 1.0);
    assert!((s.z1 - 0.85).abs() <= 5e-4);
    assert!((s.c_value().unwrap() - 0.899722).abs() <= 5e-4);
    assert!((s.z2 - 1.0877).abs() <= 5e-4);
    assert_eq!(s.topology, Topology::Interior);
}

#[test]
fn compound_corner_thresholds() {
    let k1 = bisect(|k| psi_kappa(k) - 3.0, 0.0, 1.0, 1e-14).unwrap();
    let k2 = bisect(|k| phi_kappa(k) + 3.0, 0.0, 1.0, 1e-14).unwrap();
    assert!((k1 - 0.1198).abs() <= 1e-3, "{k1}");
    assert!((k2 - 0.171286).abs() <= 1e-3, "{k2}");
    let below = solve_compound(1.0, 2.0, &fig1(0.5 * k1)).unwrap();
    assert_eq!((below.z1, below.z2), (1.5, 1.5));
    assert_eq!(below.notes.len(), 2);
    let between = solve_compound(1.0, 2.0, &fig1(0.5 * (k1 + k2))).unwrap();
    assert!(between.z1 < 1.5 && between.z2 == 1.5);
}

#[test]
fn compound_corner_at_psi_two() {
    let k = bisect(|k| psi_kappa(k) - 2.0, 0.0, 1.0, 1e-14).unwrap();
    let s = solve_compound(1.0, 2.0, &fig1(k)).unwrap();
    assert_eq!(s.z1, 1.5);
}

#[test]
fn compound_large_ambiguity_limit() {
    let s = solve_compound(1.0, 2.0, &fig1(50.0)).unwrap();
    assert!((s.z1 - 1.0).abs() < 1e-2 && (s.z2 - 2.0).abs() < 1e-2, "{} {}", s.z1, s.z2);
}

#[test]
fn compound_rejects_bad_strikes() {
    assert!(matches!(solve_compound(2.0, 1.0, &fig1(0.1)), Err(Error::BadStrikes { .. })));
    assert!(matches!(solve_digital(1.0, &fig5(0.1)), Err(Error::BadDigitalStrike(_))));
}

#[test]
fn general_matches_compound() {
    let p = fig1(0.3);
    let exact = solve_compound(1.0, 2.0, &p).unwrap();
    let general = solve_general(&compound(), &p, 1.5).unwrap();
    assert!(rel(exact.z1, general.z1) < 1e-9);
    assert!(rel(exact.z2, general.z2) < 1e-9);
    assert_eq!(general.topology, Topology::Exterior);
    for z in [0.5, 1.1, 1.6, 3.0] {
        assert!(rel(exact.value_z(z).unwrap(), general.value_z(z).unwrap()) < 1e-6);
    }
}

#[test]
fn general_matches_floor() {
    let p = fig3_floor(0.1);
    let exact = solve_floor(&p).unwrap();
    let general = solve_general(&Payoff::floor(), &p, 1.0).unwrap();
    assert!(rel(exact.c_value().unwrap(), general.c_value().unwrap()) < 1e-9);
    assert!(rel(exact.z2, general.z2) < 1e-6);
    for z in [0.5, 0.9, 1.0, 1.1, 2.0] {
        assert!(rel(exact.value_z(z).unwrap(), general.value_z(z).unwrap()) < 1e-6);
    }
}

#[test]
fn general_matches_straddle_and_digital() {
    let p = fig3_straddle(0.05);
    let exact = solve_straddle(&p).unwrap();
    let general = solve(&Payoff::straddle(), &p).unwrap();
    assert!(rel(exact.z1, general.z1) < 1e-6 && rel(exact.z2, general.z2) < 1e-6);
    assert!(rel(exact.c_value().unwrap(), general.c_value().unwrap()) < 1e-6);
    for z in [0.2, 0.5, 1.0, 2.0, 3.0] {
        assert!(rel(exact.value_z(z).unwrap(), general.value_z(z).unwrap()) < 1e-6);
    }

    let p = fig5(0.28);
    let exact = solve_digital(0.85, &p).unwrap();
    let general = solve_general(&Payoff::digital(0.85).unwrap(), &p, 0.85).unwrap();
    assert!(rel(exact.z1, general.z1) < 1e-6 && rel(exact.z2, general.z2) < 1e-6);
    assert!(rel(exact.c_value().unwrap(), general.c_value().unwrap()) < 1e-6);
    for z in [0.5, 0.86, 1.0, 1.5] {
        assert!(rel(exact.value_z(z).unwrap(), general.value_z(z).unwrap()) < 1e-6);
    }
}

#[test]
fn monotone_classification() {
    assert_eq!(classify_monotone(&Payoff::floor()), Some(GeneratorSigns::new(1, 1)));
    assert_eq!(classify_monotone(&Payoff::straddle()), None);
    assert_eq!(classify_monotone(&compound()), None);
}

fn continuation_grid(sol: &Solution) -> Vec<bool> {
    (0..400).map(|i| sol.in_continuation(0.05 * 1.01f64.powi(i))).collect()
}

fn check_shrinking(solver: impl Fn(f64) -> Solution) {
    let kappas: Vec<f64> = (0..10).map(|i| 0.03 * i as f64).collect();
    let sols: Vec<Solution> = kappas.iter().map(|&k| solver(k)).collect();
    for w in sols.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        for (i, (ca, cb)) in continuation_grid(a).into_iter().zip(continuation_grid(b)).enumerate() {
            assert!(ca || !cb, "{} grew at grid point {i} between kappa {} and {}", a.payoff.name(), a.params.kappa, b.params.kappa);
        }
        for i in 0..200 {
            let z = 0.05 * 1.02f64.powi(i);
            let (va, vb) = (a.value_z(z).unwrap(), b.value_z(z).unwrap());
            assert!(vb <= va + 1e-10 * va.max(1.0), "{} z {z}: {va} -> {vb}", a.payoff.name());
        }
    }
}

#[test]
fn ambiguity_shrinks_continuation() {
    check_shrinking(|k| solve_compound(1.0, 2.0, &fig1(k)).unwrap());
    check_shrinking(|k| solve_floor(&fig3_floor(k)).unwrap());
    check_shrinking(|k| solve_straddle(&fig3_straddle(k)).unwrap());
    check_shrinking(|k| solve_digital(0.85, &fig5(k)).unwrap());
}

fn reference_solutions() -> Vec<Solution> {
    vec![
        solve_compound(1.0, 2.0, &fig1(0.3)).unwrap(),
        solve_floor(&fig3_floor(0.1)).unwrap(),
        solve_straddle(&fig3_straddle(0.05)).unwrap(),
        solve_digital(0.85, &fig5(0.28)).unwrap(),
    ]
}

#[test]
fn equal_maxima_for_interior_solutions() {
    for sol in reference_solutions().iter().filter(|s| s.topology == Topology::Interior) {
        let (a, b) = (pi_at(sol, sol.z1), pi_at(sol, sol.z2));
        assert!((a - b).abs() <= 1e-8 * a, "{}: {a} {b}", sol.payoff.name());
        assert!(rel(sol.value_scale.unwrap(), a) < 1e-8);
    }
}

#[test]
fn smooth_pasting() {
    for sol in reference_solutions() {
        for (i, z) in [sol.z1, sol.z2].into_iter().enumerate() {
            let Some(df) = sol.payoff.derivative(z) else { continue };
            let cone = &sol.cones[if sol.cones.len() == 1 { 0 } else { i }];
            let slope = cone.scale * cone.harmonic.eval(z).unwrap().d1;
            assert!((slope - df).abs() <= 1e-6 * df.abs().max(1.0), "{} at {z}: {slope} vs {df}", sol.payoff.name());
        }
    }
}

#[test]
fn value_matches_payoff_at_boundaries() {
    for sol in reference_solutions() {
        for z in [sol.z1, sol.z2] {
            for zz in [z * (1.0 - 1e-10), z * (1.0 + 1e-10)] {
                let v = sol.value_z(zz).unwrap();
                assert!((v - sol.payoff.eval_upper(z)).abs() < 1e-8 * v.max(1.0), "{} {zz}", sol.payoff.name());
            }
        }
    }
    let floor = solve_floor(&fig3_floor(0.1)).unwrap();
    assert_eq!(floor.value_z(floor.z1).unwrap(), 1.0);
    assert_eq!(floor.value_z(floor.z2).unwrap(), floor.z2);
    assert!(rel(floor.z2 / floor.z1, floor.harmonic().unwrap().l()) < 1e-14);
}

#[test]
fn value_dominates_payoff() {
    for sol in reference_solutions() {
        for i in 0..300 {
            let z = 0.05 * 1.02f64.powi(i);
            assert!(sol.value_z(z).unwrap() >= sol.payoff.eval(z) * (1.0 - 1e-12));
        }
    }
}

#[test]
fn maximisers_lie_in_stopping_set() {
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    for sol in reference_solutions() {
        for _ in 0..20 {
            let c: f64 = 10f64.powf(rng.gen_range(-1.5..1.5));
            let h = build_harmonic(&sol.params, c).unwrap();
            let maxima = argmax_pi(&sol.payoff, &h).unwrap().global(1e-9);
            assert!(!maxima.is_empty());
            for m in maxima {
                let v = sol.value(m.z * 2.0, 2.0).unwrap();
                let f = 2.0 * sol.payoff.eval_upper(m.z);
                assert!(rel(v, f) < 1e-8, "{} c {c} z {}: {v} vs {f}", sol.payoff.name(), m.z);
            }
        }
    }
}

#[test]
fn generator_examples() {
    let floor = solve_floor(&fig3_floor(0.1)).unwrap();
    let g = floor.worst_case_generator(0.5 * floor.z1, 1.0).unwrap();
    assert_eq!((g.theta1, g.theta2), (-0.1, 0.1));
    let g = floor.worst_case_generator(3.0 * floor.z2, 1.0).unwrap();
    assert_eq!((g.theta1, g.theta2), (0.1, -0.1));

    let straddle = solve_straddle(&fig3_straddle(0.05)).unwrap();
    let c = straddle.c_value().unwrap();
    let lc = straddle.l_c_star.unwrap();
    for z in [c, 0.5 * (c + lc), lc * (1.0 - 1e-9)] {
        let g = straddle.worst_case_generator(z, 1.0).unwrap();
        assert_eq!((g.theta1, g.theta2), (0.05, 0.05), "z {z}");
    }

    let comp = solve_compound(1.0, 2.0, &fig1(0.3)).unwrap();
    let at_l = comp.worst_case_generator(1.5, 1.0).unwrap();
    let below = comp.worst_case_generator(1.2, 1.0).unwrap();
    let above = comp.worst_case_generator(1.8, 1.0).unwrap();
    assert_eq!(at_l, below);
    assert_ne!(at_l, above);
    assert!(comp.worst_case_generator(0.0, 1.0).is_err());
}

#[test]
fn digital_reuses_floor_above_floor_reference() {
    let p = fig5(0.28);
    let c_floor = floor_reference_point(&p).unwrap();
    assert!(c_floor < 0.99);
    let d = solve_digital(0.99, &p).unwrap();
    let f = solve_floor(&p).unwrap();
    assert!(rel(d.z1, f.z1) < 1e-12 && rel(d.z2, f.z2) < 1e-12);
    assert!(d.notes.iter().any(|n| n.contains("floor")));
}

#[test]
fn gap_examples() {
    let p = fig1(0.3);
    assert!(d_gap(&compound(), &p, 0.5, RefPoint::Zero).unwrap() >= 0.0);

    let p = fig5(0.28);
    let d = solve_digital(0.85, &p).unwrap();
    let gap = d_gap(&Payoff::digital(0.85).unwrap(), &p, 1.0, d.c_star.unwrap()).unwrap();
    assert!(gap.abs() < 1e-6, "{gap}");

    let p = fig3_straddle(0.05);
    let signs: Vec<bool> = (-20..=20)
        .map(|i| d_gap(&Payoff::straddle(), &p, 1.0, RefPoint::Finite(10f64.powf(0.1 * i as f64))).unwrap() > 0.0)
        .collect();
    assert!(signs.windows(2).any(|w| w[0] != w[1]));
}

#[test]
fn argmax_examples() {
    let p = fig3_floor(0.1);
    let sol = solve_floor(&p).unwrap();
    let h = sol.harmonic().unwrap().clone();
    let pts = argmax_pi(&Payoff::floor(), &h).unwrap().global(1e-9);
    assert_eq!(pts.len(), 2);
    assert!(rel(pts[0].z, sol.z1) < 1e-6 && rel(pts[1].z, sol.z2) < 1e-6);

    let hh = h.clone();
    let flat = Payoff::custom("h", move |z| hh.value(z), Monotonicity::NonMonotone);
    assert!(matches!(argmax_pi(&flat, &h).unwrap(), ArgMax::Flat(_)));

    let hc = build_harmonic(&fig1(0.3), 0.0).unwrap();
    let pts = argmax_pi(&compound(), &hc).unwrap().global(1e-9);
    let psi = psi_kappa(0.3);
    assert!(rel(pts[0].z, psi / (psi - 1.0)) < 1e-8);
}

#[test]
fn straddle_boundary_limits() {
    let p = fig3_straddle(0.05);
    let psi = characteristic_roots(&p, Regime::A3).unwrap().psi;
    let phi = characteristic_roots(&p, Regime::A1).unwrap().phi;
    let (_, z2) = straddle_boundaries(&build_harmonic(&p, 1e-8).unwrap()).unwrap();
    assert!(rel(z2, psi / (psi - 1.0)) < 1e-4, "{z2}");
    let (z1, _) = straddle_boundaries(&build_harmonic(&p, 1e8).unwrap()).unwrap();
    assert!(rel(z1, phi / (phi - 1.0)) < 1e-4, "{z1}");
    let s = solve_straddle(&p).unwrap();
    assert!(s.z2 > s.l_c_star.unwrap() && s.l_c_star.unwrap() > s.c_value().unwrap() && s.c_value().unwrap() > s.z1);
}

#[test]
fn infeasible_parameters_are_rejected() {
    let p = ModelParams::new(0.05, 0.05, 0.1, 0.1, 0.01, 0.0).unwrap();
    assert!(matches!(solve_floor(&p), Err(Error::InfeasibleDiscount { .. })));
    assert!(matches!(solve(&Payoff::straddle(), &p), Err(Error::InfeasibleDiscount { .. })));
}

#[test]
fn solution_serialises() {
    let s = solve_digital(0.85, &fig5(0.28)).unwrap();
    let json = serde_json::to_value(&s).unwrap();
    assert!(json["z1"].as_f64().is_some());
    assert!(json.get("cones").is_some());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn value_is_homogeneous(p in three_branch(), x in 0.05f64..5.0, y in 0.05f64..5.0) {
        let lambdas = [0.5, 2.0, 10.0];
        for sol in [solve_floor(&p).unwrap(), solve_straddle(&p).unwrap(), solve_compound(1.0, 2.0, &p).unwrap()] {
            let v = sol.value(x, y).unwrap();
            for l in lambdas {
                prop_assert!(rel(sol.value(l * x, l * y).unwrap(), l * v) < 1e-12);
            }
        }
    }

    #[test]
    fn floor_equal_maxima_and_pasting(p in three_branch()) {
        let sol = solve_floor(&p).unwrap();
        let h = sol.harmonic().unwrap();
        let (a, b) = (pi_at(&sol, sol.z1), pi_at(&sol, sol.z2));
        prop_assert!((a - b).abs() <= 1e-8 * a);
        let slope = sol.value_scale.unwrap() * h.eval(sol.z2).unwrap().d1;
        prop_assert!((slope - 1.0).abs() < 1e-6);
    }

    #[test]
    fn straddle_ordering(p in three_branch()) {
        let s = solve_straddle(&p).unwrap();
        let c = s.c_value().unwrap();
        prop_assert!(s.z1 < c && c < s.l_c_star.unwrap() && s.l_c_star.unwrap() < s.z2);
        prop_assert!(s.z1 < 1.0 && s.z2 > 1.0);
        let (a, b) = (pi_at(&s, s.z1), pi_at(&s, s.z2));
        prop_assert!((a - b).abs() <= 1e-8 * a);
    }
}
