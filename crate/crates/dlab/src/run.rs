//! Multi-seed execution of one experiment config.

use anyhow::{Context, Result};
use rayon::prelude::*;

use dlab_core::RegretLedger;

use crate::config::ExperimentConfig;
use crate::registry::{prepare, run_seed, seed_offset};

/// All seeds of `cfg`, in config order. Seeds run in parallel; each owns its
/// state and random stream, so the result does not depend on scheduling.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<RegretLedger>> {
    let env = prepare(cfg).with_context(|| format!("config {:?}", cfg.name))?;
    let offset = seed_offset()?;
    cfg.seeds
        .par_iter()
        .map(|&s| {
            let seed = s.wrapping_add(offset);
            run_seed(cfg, &env, seed).with_context(|| format!("config {:?}, seed {seed}", cfg.name))
        })
        .collect()
}
