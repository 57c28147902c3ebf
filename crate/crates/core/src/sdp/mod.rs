//! Semidefinite lower bounds on four times the convex roof of the variance.
//!
//! [`ConicProblem`] is the solver-facing form: real coordinates `y`, Hermitian PSD
//! blocks that depend linearly on `y`, and real equality constraints. [`InteriorPoint`]
//! is the built-in [`ConicSolver`]; any other implementation of the trait can be used
//! through [`bound_with`].

pub mod params;
mod problem;
mod programs;
mod solver;

pub use problem::{BlockDump, ConicProblem, Image, ProblemDump, PsdBlock, SparseMatrix};
pub use programs::{
    bound_se, bound_sppt, bound_with, build_se_problem, build_sppt_problem, cost_operator,
    BoundResult, ExtensionTemplate, SIZE_LIMIT,
};
pub use solver::{ConicSolver, InteriorPoint, SdpSolution, SolveStatus};

/// Default solver tolerance on the duality gap and on both residuals.
pub const DEFAULT_TOLERANCE: f64 = 1e-8;
