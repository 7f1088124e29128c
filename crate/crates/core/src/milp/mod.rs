//! Solver-independent 0-1 linear models, the built-in branch-and-bound
//! engine, and LP-format export.

mod engine;
mod lp;
mod model;

pub use engine::{solve, SolveLimits, SolveOutcome, SolveStats, SolveStatus};
pub use lp::export_lp;
pub use model::{LinearConstraint, Model, Objective, VarId};
