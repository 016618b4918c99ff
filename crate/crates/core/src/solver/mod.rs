mod closed_form;
mod general;
mod solution;

pub use closed_form::{
    floor_reference_point, solve_compound, solve_digital, solve_floor, solve_straddle, straddle_boundaries,
};
pub use general::{classify_monotone, d_gap, solve, solve_general};
pub use solution::{value, worst_case_generator, Cone, GeneratorInterval, GeneratorMap, Solution, SolutionKind, Topology};
