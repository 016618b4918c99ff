//! Robust perpetual optimal stopping of positively homogeneous payoffs on two
//! geometric Brownian motions when nature may distort both drifts by up to
//! `kappa` volatility units.
//!
//! The problem reduces to the ratio `z = x / y`. The solver builds the
//! minimal harmonic family `h_c`, locates the worst-case reference point `c*`
//! and reads boundaries and values off the ratio `Pi_c = f / h_c`.

pub mod diffusion;
pub mod error;
pub mod extreal;
pub mod harmonic;
pub mod optimize;
pub mod params;
pub mod payoff;
pub mod quadrature;
pub mod rootfind;
pub mod roots;
pub mod solver;

pub use diffusion::{expected_exit_time, RatioDiffusion};
pub use error::{Error, Result};
pub use extreal::RefPoint;
pub use harmonic::{build_harmonic, pi_ratio, switching_ratio, Family, HValue, HarmonicFn};
pub use optimize::{argmax_pi, ArgMax, Maximum};
pub use params::{GeneratorPair, GeneratorSigns, ModelParams, Regime, SolvabilityClass};
pub use payoff::{Monotonicity, Payoff, PayoffKind};
pub use roots::{characteristic_roots, root_sensitivities, RegimeRoots, SensitivitySet, SignClass};
pub use solver::{
    classify_monotone, d_gap, floor_reference_point, solve, solve_compound, solve_digital, solve_floor,
    solve_general, solve_straddle, straddle_boundaries, value, worst_case_generator, Cone, GeneratorInterval,
    GeneratorMap, Solution, SolutionKind,
    Topology,
};
