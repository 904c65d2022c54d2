//! Complexity-measure laboratory: offset and constrained DEC, closed-form
//! DEC strategies, eluder dimension, generalized UCB and E2D.

mod constrained;
mod e2d;
mod eluder;
mod solver;
mod strategies;

pub use constrained::{dec_constrained, ConstrainedDec, MAX_GRID_DECISIONS};
pub use e2d::{e2d_run, generalized_ucb_act, generalized_ucb_run, E2dConfig, E2dEstimator, E2dReport, GeneralizedUcbReport};
pub use eluder::{eluder_dimension, eluder_dimension_class, EluderResult, MAX_DECISIONS, MAX_FUNCTIONS};
pub use solver::{dec_offset, with_mean_mixtures, DecDivergence, DecProblem, DecSolver, GridClass, ModelOracle, SaddleCertificate};
pub use strategies::{
    cheating_dec_strategy, greedy_cover, linear_dec_strategy, lipschitz_dec_strategy, structured_payoff, CheatingStrategy,
    LinearDecStrategy, LipschitzDecStrategy,
};
