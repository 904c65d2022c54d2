//! Interactive decision making on finite problems: bandits, contextual
//! bandits, structured bandits with the decision-estimation coefficient,
//! and episodic reinforcement learning.
//!
//! Everything here is `no_std` and only needs an allocator. Randomness is
//! drawn from explicitly keyed streams (see [`numprob::rng`]) so every run is
//! reproducible from `(seed, experiment, round)`.
#![no_std]
#![forbid(unsafe_code)]
extern crate alloc;
#[cfg(test)]
extern crate std;

mod math;

pub mod bandits;
pub mod contextual;
pub mod dec_lab;
pub mod envs;
pub mod error;
pub mod estimators;
pub mod ledger;
pub mod numprob;
pub mod rl;

pub use error::Error;
pub use ledger::RegretLedger;
pub use numprob::dist::{FiniteDist, RewardDist};
pub use numprob::rng::{Seed, Stream, StreamKey};
