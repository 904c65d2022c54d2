//! Episodic reinforcement learning on finite-horizon MDPs.

mod bilin;
mod lsvi;
mod pcigw;
mod planning;
mod rank;
mod ucbvi;

pub use bilin::{bilinucb_beta, bilinucb_run, linear_q_class, BilinReport, QFunction};
pub use lsvi::{lsvi_ucb_run, LsviConfig, LsviReport, LsviState};
pub use pcigw::{cover_objective, cover_policy, pcigw_distribution, pcigw_payoff_audit, trajectory_hellinger_sq, PcIgw};
pub use planning::{
    bellman_backup, greedy_policy, identity_checks, initial_value, on_policy_residual, value_iteration, IdentityReport,
    ValueFunctions,
};
pub use rank::{bellman_rank, bellman_residual, BellmanFactorization, RANK_THRESHOLD};
pub use ucbvi::{eps_greedy_rl_run, optimistic_q, ucbvi_analysis_bonus, ucbvi_bonus, ucbvi_run, UcbviReport};
