//! Generalized equations and the decision procedure for quadratic systems.

pub mod entire;
pub mod et;
pub mod geneq;
pub mod solver;

pub use solver::{solve_quadratic, SolveOptions, SolveResult, Verdict};
