//! Environments: bandits, contextual bandits, structured bandits and
//! episodic MDPs, with exact evaluators alongside the samplers.

mod bandit;
mod lock;
mod lowrank;
mod tabular;

pub use bandit::{cheating_code, BanditEnv, BanditModel, CheatingCode, ContextualEnv, LinearEnv, Noise};
pub use lock::{combination_lock, combination_lock_with_code, default_lock_code};
pub use lowrank::{random_low_rank, LowRankMDP};
pub use tabular::{random_tabular, Policy, TabularMDP, Trajectory};

/// Reward normalization an environment follows.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// Each round's mean reward lies in [0, 1] (bandit chapters).
    PerStep,
    /// Rewards summed over an episode lie in [0, 1] (RL chapters).
    Cumulative,
}
