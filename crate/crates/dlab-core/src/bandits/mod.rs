//! Multi-armed bandit algorithms as round-based state machines.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::envs::BanditModel;
use crate::error::Error;
use crate::estimators::{ExpWeights, LogLossPosterior};
use crate::ledger::RegretLedger;
use crate::math;
use crate::numprob::dist::FiniteDist;
use crate::numprob::rng::StreamKey;

/// Shared interface consumed by the harness.
pub trait BanditAlgorithm {
    fn name(&self) -> String;
    /// Decision distribution for round `t` (1-based).
    fn act(&mut self, t: usize) -> FiniteDist;
    fn observe(&mut self, arm: usize, reward: f64, p: &FiniteDist) -> Result<(), Error>;
}

/// Per-arm counts and running means; unpulled arms report mean 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmStats {
    pub n: Vec<f64>,
    pub sum: Vec<f64>,
}

impl ArmStats {
    pub fn new(a: usize) -> Self {
        ArmStats { n: vec![0.0; a], sum: vec![0.0; a] }
    }

    pub fn arms(&self) -> usize {
        self.n.len()
    }

    pub fn mean(&self, i: usize) -> f64 {
        if self.n[i] == 0.0 {
            0.0
        } else {
            self.sum[i] / self.n[i]
        }
    }

    pub fn means(&self) -> Vec<f64> {
        (0..self.arms()).map(|i| self.mean(i)).collect()
    }

    pub fn record(&mut self, arm: usize, r: f64) {
        self.n[arm] += 1.0;
        self.sum[arm] += r;
    }
}

/// `(1−ε)` on the greedy arm plus `ε` spread uniformly.
pub fn eps_greedy_act(stats: &ArmStats, eps: f64, a: usize) -> FiniteDist {
    let greedy = math::argmax(&stats.means());
    let mut p = vec![eps / a as f64; a];
    p[greedy] += 1.0 - eps;
    FiniteDist::from_weights(&p).expect("valid mixture")
}

/// `ε = (A ln(AT/δ) / T)^{1/3}`, clipped to 1.
pub fn eps_greedy_schedule(a: usize, horizon: usize, delta: f64) -> f64 {
    let (a, t) = (a as f64, horizon as f64);
    math::powf(a * math::ln(a * t / delta) / t, 1.0 / 3.0).min(1.0)
}

/// `√(2 ln(2T²A/δ) / n)`; `+inf` for an unpulled arm.
pub fn ucb_bonus(n: f64, horizon: usize, a: usize, delta: f64) -> f64 {
    if n == 0.0 {
        return f64::INFINITY;
    }
    let t = horizon as f64;
    math::sqrt(2.0 * math::ln(2.0 * t * t * a as f64 / delta) / n)
}

/// Lower and upper confidence bounds for every arm.
pub fn ucb_intervals(stats: &ArmStats, horizon: usize, delta: f64) -> Vec<(f64, f64)> {
    let a = stats.arms();
    (0..a)
        .map(|i| {
            let b = ucb_bonus(stats.n[i], horizon, a, delta);
            (stats.mean(i) - b, stats.mean(i) + b)
        })
        .collect()
}

pub fn ucb_act(stats: &ArmStats, horizon: usize, a: usize, delta: f64) -> FiniteDist {
    let upper: Vec<f64> = ucb_intervals(stats, horizon, delta).iter().map(|x| x.1).collect();
    FiniteDist::point(a, math::argmax(&upper))
}

/// Round-robin for `t ≤ N`, then the empirical best forever.
pub fn etc_act(stats: &ArmStats, n_explore: usize, a: usize, t: usize) -> FiniteDist {
    if t <= n_explore {
        FiniteDist::point(a, (t - 1) % a)
    } else {
        FiniteDist::point(a, math::argmax(&stats.means()))
    }
}

/// `p(π) = Σ_{M: π_M = π} q(M)`, exactly.
pub fn posterior_sampling_act(q: &FiniteDist, class: &[BanditModel]) -> FiniteDist {
    let a = class[0].len();
    let mut p = vec![0.0; a];
    for (m, &w) in class.iter().zip(q.probs()) {
        p[m.best()] += w;
    }
    FiniteDist::from_weights(&p).expect("posterior has mass")
}

pub fn exp3_act(state: &ExpWeights) -> FiniteDist {
    state.dist()
}

/// Importance-weighted loss `ℓ(π)/p(π)·1{π = played}`.
pub fn exp3_loss_estimate(a: usize, arm: usize, loss: f64, p: &FiniteDist) -> Result<Vec<f64>, Error> {
    if p[arm] < 1e-12 {
        return Err(Error::InvalidInput("played arm has vanishing probability"));
    }
    let mut v = vec![0.0; a];
    v[arm] = loss / p[arm];
    Ok(v)
}

pub fn exp3_observe(state: &mut ExpWeights, arm: usize, loss: f64, p: &FiniteDist) -> Result<(), Error> {
    let est = exp3_loss_estimate(state.len(), arm, loss, p)?;
    state.update(&est)
}

/// `η = √(ln A / (A T))`.
pub fn exp3_eta(a: usize, horizon: usize) -> f64 {
    math::sqrt(math::ln(a as f64) / (a as f64 * horizon as f64))
}

#[derive(Debug, Clone)]
pub struct EpsGreedy {
    pub stats: ArmStats,
    pub eps: f64,
}

impl EpsGreedy {
    pub fn new(a: usize, eps: f64) -> Self {
        EpsGreedy { stats: ArmStats::new(a), eps }
    }
}

impl BanditAlgorithm for EpsGreedy {
    fn name(&self) -> String {
        "eps_greedy".into()
    }
    fn act(&mut self, _t: usize) -> FiniteDist {
        eps_greedy_act(&self.stats, self.eps, self.stats.arms())
    }
    fn observe(&mut self, arm: usize, reward: f64, _p: &FiniteDist) -> Result<(), Error> {
        self.stats.record(arm, reward);
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Ucb {
    pub stats: ArmStats,
    pub horizon: usize,
    pub delta: f64,
}

impl Ucb {
    pub fn new(a: usize, horizon: usize, delta: f64) -> Self {
        Ucb { stats: ArmStats::new(a), horizon, delta }
    }
}

impl BanditAlgorithm for Ucb {
    fn name(&self) -> String {
        "ucb".into()
    }
    fn act(&mut self, _t: usize) -> FiniteDist {
        ucb_act(&self.stats, self.horizon, self.stats.arms(), self.delta)
    }
    fn observe(&mut self, arm: usize, reward: f64, _p: &FiniteDist) -> Result<(), Error> {
        self.stats.record(arm, reward);
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ExploreThenCommit {
    pub stats: ArmStats,
    pub n_explore: usize,
}

impl ExploreThenCommit {
    pub fn new(a: usize, n_explore: usize) -> Result<Self, Error> {
        if !n_explore.is_multiple_of(a) {
            return Err(Error::InvalidInput("exploration length must be a multiple of A"));
        }
        Ok(ExploreThenCommit { stats: ArmStats::new(a), n_explore })
    }
}

impl BanditAlgorithm for ExploreThenCommit {
    fn name(&self) -> String {
        "etc".into()
    }
    fn act(&mut self, t: usize) -> FiniteDist {
        etc_act(&self.stats, self.n_explore, self.stats.arms(), t)
    }
    fn observe(&mut self, arm: usize, reward: f64, _p: &FiniteDist) -> Result<(), Error> {
        // Statistics freeze at commit time so the committed arm never moves.
        if self.stats.n.iter().sum::<f64>() < self.n_explore as f64 {
            self.stats.record(arm, reward);
        }
        Ok(())
    }
}

/// Posterior sampling with an exact posterior over a finite class.
#[derive(Debug, Clone)]
pub struct PosteriorSampling {
    pub class: Vec<BanditModel>,
    pub posterior: LogLossPosterior,
}

impl PosteriorSampling {
    pub fn new(class: Vec<BanditModel>) -> Self {
        let n = class.len();
        PosteriorSampling { class, posterior: LogLossPosterior::uniform(n) }
    }
}

impl BanditAlgorithm for PosteriorSampling {
    fn name(&self) -> String {
        "posterior_sampling".into()
    }
    fn act(&mut self, _t: usize) -> FiniteDist {
        let q = self.posterior.dist().expect("truth keeps positive density");
        posterior_sampling_act(&q, &self.class)
    }
    fn observe(&mut self, arm: usize, reward: f64, _p: &FiniteDist) -> Result<(), Error> {
        let ld: Vec<f64> = self.class.iter().map(|m| m.laws[arm].log_density(reward)).collect();
        self.posterior.update(&ld)
    }
}

/// Exp3 on losses `1 − r`.
#[derive(Debug, Clone)]
pub struct Exp3 {
    pub weights: ExpWeights,
}

impl Exp3 {
    pub fn new(a: usize, horizon: usize) -> Self {
        Exp3 { weights: ExpWeights::new(a, exp3_eta(a, horizon)).expect("a ≥ 1") }
    }
}

impl BanditAlgorithm for Exp3 {
    fn name(&self) -> String {
        "exp3".into()
    }
    fn act(&mut self, _t: usize) -> FiniteDist {
        exp3_act(&self.weights)
    }
    fn observe(&mut self, arm: usize, reward: f64, p: &FiniteDist) -> Result<(), Error> {
        exp3_observe(&mut self.weights, arm, 1.0 - reward, p)
    }
}

/// Plays the optimal arm every round.
#[derive(Debug, Clone)]
pub struct Oracle {
    pub arm: usize,
    pub arms: usize,
}

impl BanditAlgorithm for Oracle {
    fn name(&self) -> String {
        "optimal".into()
    }
    fn act(&mut self, _t: usize) -> FiniteDist {
        FiniteDist::point(self.arms, self.arm)
    }
    fn observe(&mut self, _arm: usize, _reward: f64, _p: &FiniteDist) -> Result<(), Error> {
        Ok(())
    }
}

/// Run for `horizon` rounds. Regret is the exact expectation under each
/// round's decision distribution; the realized reward is logged alongside.
/// `inspect` sees `(t, p, arm, reward)` before the algorithm observes.
pub fn run_bandit(
    env: &BanditModel,
    algo: &mut dyn BanditAlgorithm,
    horizon: usize,
    key: StreamKey,
    seed: u64,
    env_name: &str,
    mut inspect: impl FnMut(usize, &FiniteDist, usize, f64),
) -> Result<RegretLedger, Error> {
    let mut ledger = RegretLedger::new(seed, algo.name(), env_name);
    for t in 1..=horizon {
        let mut rng = key.round(t as u64);
        let p = algo.act(t);
        let arm = p.sample(&mut rng);
        let r = env.sample(arm, &mut rng)?;
        ledger.push(env.expected_regret(p.probs()), r);
        inspect(t, &p, arm, r);
        algo.observe(arm, r, &p)?;
    }
    Ok(ledger)
}
