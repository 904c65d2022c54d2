//! Registered environment and algorithm ids, and the per-seed runner.

use anyhow::{anyhow, bail, Context, Result};

use dlab_core::bandits::{eps_greedy_schedule, run_bandit, BanditAlgorithm, EpsGreedy, Exp3, ExploreThenCommit, Oracle, Ucb};
use dlab_core::contextual::{linucb_beta, linucb_run};
use dlab_core::dec_lab::{e2d_run, generalized_ucb_run, E2dConfig};
use dlab_core::envs::{cheating_code, combination_lock, random_low_rank, random_tabular, BanditModel, CheatingCode, LinearEnv, LowRankMDP, Noise, Policy, TabularMDP};
use dlab_core::estimators::{confidence_beta, FiniteClass};
use dlab_core::rl::{eps_greedy_rl_run, initial_value, lsvi_ucb_run, ucbvi_run, value_iteration, LsviConfig};
use dlab_core::{RegretLedger, RewardDist, Seed, Stream, StreamKey};

use crate::config::{ExperimentConfig, NormalizationTag, Params, Spec};

pub const ENV_IDS: &[&str] = &[
    "gaussian_mab",
    "bernoulli_mab",
    "cheating_code",
    "linear_bandit",
    "combination_lock",
    "random_tabular",
    "random_low_rank",
];

pub const ALGO_IDS: &[&str] = &[
    "optimal",
    "ucb",
    "eps_greedy",
    "etc",
    "exp3",
    "e2d",
    "generalized_ucb",
    "linucb",
    "ucbvi",
    "eps_greedy_rl",
    "lsvi_ucb",
];

/// A built environment instance.
pub enum Env {
    Bandit(BanditModel),
    Cheating { code: CheatingCode, truth: usize },
    Linear(LinearEnv),
    Tabular(TabularMDP),
    LowRank(LowRankMDP),
}

impl Env {
    pub fn normalization(&self) -> NormalizationTag {
        match self {
            Env::Bandit(_) | Env::Cheating { .. } | Env::Linear(_) => NormalizationTag::PerStep,
            Env::Tabular(_) | Env::LowRank(_) => NormalizationTag::Cumulative,
        }
    }
}

fn unit(v: Vec<f64>) -> Vec<f64> {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / n).collect()
}

/// Unit-norm features and `θ* = scale·u` for a uniform direction `u`.
pub fn random_linear(d: usize, arms: usize, scale: f64, rng: &mut Stream) -> Result<LinearEnv> {
    let features: Vec<Vec<f64>> = (0..arms).map(|_| unit((0..d).map(|_| rng.normal()).collect())).collect();
    let theta: Vec<f64> = unit((0..d).map(|_| rng.normal()).collect()).into_iter().map(|x| scale * x).collect();
    LinearEnv::new(features, theta, Noise::Gaussian).map_err(|e| anyhow!("{e}"))
}

pub fn build_env(spec: &Spec) -> Result<Env> {
    let mut p = Params::new(&spec.id, &spec.params);
    let env = match spec.id.as_str() {
        "gaussian_mab" => Env::Bandit(BanditModel::gaussian(&p.f64_vec("means")?)),
        "bernoulli_mab" => {
            let laws = p.f64_vec("means")?.into_iter().map(RewardDist::bernoulli).collect::<Result<Vec<_>, _>>().map_err(|e| anyhow!("{e}"))?;
            Env::Bandit(BanditModel::new(laws))
        }
        "cheating_code" => {
            let (code, _) = cheating_code(p.usize("arms")?).map_err(|e| anyhow!("{e}"))?;
            let truth = p.usize_or("truth", 0)?;
            if truth >= code.models.len() {
                bail!("cheating_code: truth must be below arms");
            }
            Env::Cheating { code, truth }
        }
        "linear_bandit" => {
            let (d, arms) = (p.usize("d")?, p.usize("arms")?);
            let scale = p.f64_or("theta_norm", 0.9)?;
            let mut rng = Stream::from_seed(p.usize_or("instance_seed", 0)? as u64);
            Env::Linear(random_linear(d, arms, scale, &mut rng)?)
        }
        "combination_lock" => Env::Tabular(combination_lock(p.usize("h")?)),
        "random_tabular" => {
            let (s, a, h) = (p.usize("s")?, p.usize("a")?, p.usize("h")?);
            let mut rng = Stream::from_seed(p.usize_or("instance_seed", 0)? as u64);
            Env::Tabular(random_tabular(s, a, h, &mut rng))
        }
        "random_low_rank" => {
            let (s, a, h, d) = (p.usize("s")?, p.usize("a")?, p.usize("h")?, p.usize("d")?);
            let mut rng = Stream::from_seed(p.usize_or("instance_seed", 0)? as u64);
            Env::LowRank(random_low_rank(s, a, h, d, &mut rng))
        }
        other => bail!("unknown env id {other:?}; registered env ids: {}", ENV_IDS.join(", ")),
    };
    p.finish()?;
    Ok(env)
}

/// `DLAB_SEED_OFFSET`, default 0.
pub fn seed_offset() -> Result<u64> {
    match std::env::var("DLAB_SEED_OFFSET") {
        Err(std::env::VarError::NotPresent) => Ok(0),
        Err(e) => Err(anyhow!("DLAB_SEED_OFFSET: {e}")),
        Ok(s) if s.trim().is_empty() => Ok(0),
        Ok(s) => s.trim().parse::<u64>().with_context(|| format!("DLAB_SEED_OFFSET must be a nonnegative integer, got {s:?}")),
    }
}

fn core(e: dlab_core::Error) -> anyhow::Error {
    anyhow!("{e}")
}

fn mismatch(algo: &str, env: &str) -> anyhow::Error {
    anyhow!("algorithm {algo:?} does not apply to env {env:?}")
}

fn bandit_algo(algo: &Spec, a: usize, horizon: usize) -> Result<Box<dyn BanditAlgorithm>, anyhow::Error> {
    let mut p = Params::new(&algo.id, &algo.params);
    let out: Box<dyn BanditAlgorithm> = match algo.id.as_str() {
        "ucb" => Box::new(Ucb::new(a, horizon, p.f64_or("delta", 0.1)?)),
        "eps_greedy" => {
            let delta = p.f64_or("delta", 0.1)?;
            let eps = p.opt_f64("eps")?.unwrap_or_else(|| eps_greedy_schedule(a, horizon, delta));
            if !(0.0..=1.0).contains(&eps) {
                bail!("eps_greedy: eps must lie in [0, 1]");
            }
            Box::new(EpsGreedy::new(a, eps))
        }
        "etc" => Box::new(ExploreThenCommit::new(a, p.usize("n_explore")?).map_err(core)?),
        "exp3" => Box::new(Exp3::new(a, horizon)),
        _ => unreachable!(),
    };
    p.finish()?;
    Ok(out)
}

/// Optimal policy replayed for `horizon` episodes; regret is exactly zero.
fn optimal_mdp(mdp: &TabularMDP, horizon: usize, key: StreamKey, seed: u64, env: &str) -> Result<RegretLedger> {
    let (vf, pi): (_, Policy) = value_iteration(mdp);
    let opt = initial_value(mdp, &vf.v[0]);
    let value = mdp.policy_value(&pi);
    let mut ledger = RegretLedger::new(seed, "optimal", env);
    for t in 1..=horizon {
        let tau = mdp.rollout(&pi, &mut key.round(t as u64)).map_err(core)?;
        ledger.push((opt - value).max(0.0), tau.total_reward());
    }
    Ok(ledger)
}

/// Run one seed. `seed` is the effective seed (offset already applied).
pub fn run_seed(cfg: &ExperimentConfig, env: &Env, seed: u64) -> Result<RegretLedger> {
    let key = StreamKey::new(Seed(seed), cfg.experiment_tag());
    let (t, id, env_id) = (cfg.horizon, cfg.algo.id.as_str(), cfg.env.id.as_str());
    if !ALGO_IDS.contains(&id) {
        bail!("unknown algorithm id {id:?}; registered algorithm ids: {}", ALGO_IDS.join(", "));
    }
    let empty = serde_json::Map::new();
    let mut p = Params::new(id, &cfg.algo.params);
    let mut ledger = match (env, id) {
        (Env::Bandit(m), "optimal") | (Env::Linear(LinearEnv { model: m, .. }), "optimal") => {
            let mut o = Oracle { arm: m.best(), arms: m.len() };
            run_bandit(m, &mut o, t, key, seed, env_id, |_, _, _, _| {}).map_err(core)?
        }
        (Env::Cheating { code, truth }, "optimal") => {
            let m = &code.models[*truth];
            let mut o = Oracle { arm: m.best(), arms: m.len() };
            run_bandit(m, &mut o, t, key, seed, env_id, |_, _, _, _| {}).map_err(core)?
        }
        (Env::Bandit(m), "ucb" | "eps_greedy" | "etc" | "exp3") | (Env::Linear(LinearEnv { model: m, .. }), "ucb" | "eps_greedy" | "etc" | "exp3") => {
            // Parameters are checked by the builder.
            p = Params::new(id, &empty);
            let mut algo = bandit_algo(&cfg.algo, m.len(), t)?;
            run_bandit(m, algo.as_mut(), t, key, seed, env_id, |_, _, _, _| {}).map_err(core)?
        }
        (Env::Cheating { code, truth }, "e2d") => {
            let gamma = p.f64_or("gamma", code.arms as f64)?;
            e2d_run(&code.models, *truth, &E2dConfig::new(gamma, t), key, seed, env_id).map_err(core)?.ledger
        }
        (Env::Cheating { code, truth }, "generalized_ucb") => {
            let class = FiniteClass::new(code.models.iter().map(|m| m.means()).collect()).map_err(core)?;
            let beta = p.f64_or("beta", confidence_beta(code.models.len(), 0.1))?;
            generalized_ucb_run(&class, *truth, &code.models[*truth], beta, t, key, seed, env_id, |pi| code.is_cheat(pi)).map_err(core)?.ledger
        }
        (Env::Linear(lin), "linucb") => {
            let beta = linucb_beta(lin.theta.len(), t, p.f64_or("delta", 0.1)?);
            linucb_run(lin, t, beta, key, seed, env_id).map_err(core)?.ledger
        }
        (Env::Tabular(m), "optimal") => optimal_mdp(m, t, key, seed, env_id)?,
        (Env::LowRank(m), "optimal") => optimal_mdp(m.tabular(), t, key, seed, env_id)?,
        (Env::Tabular(m), "ucbvi") => ucbvi_run(m, t, p.f64_or("delta", 0.1)?, key, seed, env_id).map_err(core)?.ledger,
        (Env::LowRank(m), "ucbvi") => ucbvi_run(m.tabular(), t, p.f64_or("delta", 0.1)?, key, seed, env_id).map_err(core)?.ledger,
        (Env::Tabular(m), "eps_greedy_rl") => eps_greedy_rl_run(m, t, p.f64_or("eps", 0.1)?, key, seed, env_id).map_err(core)?,
        (Env::LowRank(m), "eps_greedy_rl") => eps_greedy_rl_run(m.tabular(), t, p.f64_or("eps", 0.1)?, key, seed, env_id).map_err(core)?,
        (Env::LowRank(m), "lsvi_ucb") => {
            let mut c = LsviConfig::new(t, p.f64_or("delta", 0.1)?);
            c.c = p.f64_or("c", 1.0)?;
            lsvi_ucb_run(m, &c, key, seed, env_id).map_err(core)?.ledger
        }
        _ => return Err(mismatch(id, env_id)),
    };
    p.finish()?;
    ledger.algo = id.to_string();
    ledger.env = env_id.to_string();
    Ok(ledger)
}

/// Build the environment and check the convention tag against it.
pub fn prepare(cfg: &ExperimentConfig) -> Result<Env> {
    let env = build_env(&cfg.env)?;
    if env.normalization() != cfg.normalization {
        bail!("env {:?} follows {:?} reward normalization but the config says {:?}", cfg.env.id, env.normalization(), cfg.normalization);
    }
    if !ALGO_IDS.contains(&cfg.algo.id.as_str()) {
        bail!("unknown algorithm id {:?}; registered algorithm ids: {}", cfg.algo.id, ALGO_IDS.join(", "));
    }
    Ok(env)
}
