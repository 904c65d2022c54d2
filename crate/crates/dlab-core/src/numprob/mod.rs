//! Shared probability and optimization substrate.

pub mod design;
pub mod dist;
pub mod divergence;
pub mod linalg;
pub mod lp;
pub mod rng;

pub use design::{g_optimal_design, Design};
pub use dist::{FiniteDist, RewardDist};
pub use divergence::{divergence, hellinger_sq_gaussian, Divergence};
pub use lp::{solve_lp, LpError, LpProblem, LpSolution, Sense};
