//! UCB-VI with known deterministic rewards, values clipped at 1.

use alloc::vec;
use alloc::vec::Vec;

use super::planning::{greedy_policy, initial_value, on_policy_residual, value_iteration};
use crate::envs::{Policy, TabularMDP};
use crate::error::Error;
use crate::estimators::{LayerwiseEstimator, LayerwiseMode};
use crate::ledger::RegretLedger;
use crate::math;
use crate::numprob::rng::StreamKey;

/// `b(n) = 2·√(ln(2SAHT/δ)/n)`; `n = 0` gives `+∞`, which the clip turns into 1.
pub fn ucbvi_bonus(n: f64, s: usize, a: usize, h: usize, t: usize, delta: f64) -> f64 {
    if n <= 0.0 {
        return f64::INFINITY;
    }
    2.0 * math::sqrt(math::ln(2.0 * (s * a * h * t) as f64 / delta) / n)
}

/// The S-dependent bonus `b'(n) = 8·√(S·ln(2SAHT/δ)/n)` used by the analysis.
/// Not used for action selection.
pub fn ucbvi_analysis_bonus(n: f64, s: usize, a: usize, h: usize, t: usize, delta: f64) -> f64 {
    if n <= 0.0 {
        return f64::INFINITY;
    }
    8.0 * math::sqrt(s as f64 * math::ln(2.0 * (s * a * h * t) as f64 / delta) / n)
}

/// `Q̄_h = min(1, r + P̂ V̄_{h+1} + b)` from layer `H−1` down, with zero layer `H`.
pub fn optimistic_q(est: &TabularMDP, counts: impl Fn(usize, usize, usize) -> f64, bonus: impl Fn(f64) -> f64) -> Vec<Vec<f64>> {
    let (ns, na) = (est.s, est.a);
    let mut q = vec![vec![0.0; ns * na]; est.h + 1];
    for h in (0..est.h).rev() {
        let v: Vec<f64> = q[h + 1].chunks(na).map(math::max).collect();
        for s in 0..ns {
            for a in 0..na {
                let n = counts(h, s, a);
                q[h][s * na + a] = if n <= 0.0 {
                    1.0
                } else {
                    (est.reward(h, s, a) + math::dot(est.row(h, s, a), &v) + bonus(n)).min(1.0)
                };
            }
        }
    }
    q
}

#[derive(Debug, Clone, PartialEq)]
pub struct UcbviReport {
    pub ledger: RegretLedger,
    /// `E_{d1}[V̄_1]` per episode.
    pub optimistic_value: Vec<f64>,
    /// `E_{d1}[V*_1]`.
    pub optimal_value: f64,
    /// Episodes with `V̄_1(s) ≥ V*_1(s) − 1e-12` for every start state.
    pub optimistic_episodes: usize,
    /// Episodes where `Q̄ ≥ Q*` held everywhere and the optimistic error
    /// decomposition was checked.
    pub decomposition_checked: usize,
    pub decomposition_violations: usize,
}

impl UcbviReport {
    /// Mean realized return over the last `k` episodes.
    pub fn tail_return(&self, k: usize) -> f64 {
        let n = self.ledger.rows.len();
        let k = k.min(n).max(1);
        self.ledger.rows[n - k..].iter().map(|r| r.reward).sum::<f64>() / k as f64
    }
}

pub fn ucbvi_run(env: &TabularMDP, episodes: usize, delta: f64, key: StreamKey, seed: u64, env_name: &str) -> Result<UcbviReport, Error> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidInput("δ must lie in (0, 1)"));
    }
    let (ns, na, hh) = (env.s, env.a, env.h);
    let (star, _) = value_iteration(env);
    let optimal_value = initial_value(env, &star.v[0]);
    let mut est = LayerwiseEstimator::new(env, LayerwiseMode::Frequency)?;
    let mut ledger = RegretLedger::new(seed, "ucbvi", env_name);
    let mut optimistic_value = Vec::with_capacity(episodes);
    let (mut optimistic_episodes, mut decomposition_checked, mut decomposition_violations) = (0, 0, 0);
    for t in 1..=episodes {
        let mut rng = key.round(t as u64);
        let (mhat, _) = est.estimate()?;
        let q = optimistic_q(&mhat, |h, s, a| est.visits(h, s, a), |n| ucbvi_bonus(n, ns, na, hh, episodes, delta));
        let pi = greedy_policy(&q, ns, na, hh);
        let v1: Vec<f64> = q[0].chunks(na).map(math::max).collect();
        optimistic_value.push(initial_value(env, &v1));
        if v1.iter().zip(&star.v[0]).all(|(vb, vs)| *vb >= vs - 1e-12) {
            optimistic_episodes += 1;
        }
        let value = env.policy_value(&pi);
        if q.iter().zip(&star.q).all(|(qb, qs)| qb.iter().zip(qs).all(|(x, y)| *x >= *y)) {
            decomposition_checked += 1;
            if optimal_value - value > on_policy_residual(env, &pi, &q) + 1e-12 {
                decomposition_violations += 1;
            }
        }
        let tau = env.rollout(&pi, &mut rng)?;
        ledger.push(optimal_value - value, tau.total_reward());
        est.observe(&tau)?;
    }
    Ok(UcbviReport { ledger, optimistic_value, optimal_value, optimistic_episodes, decomposition_checked, decomposition_violations })
}

/// Model-based ε-greedy: with probability ε per step a uniform action,
/// otherwise greedy for the frequency-estimated model. Unvisited pairs get
/// their known reward and no continuation value, so the greedy part carries
/// no implicit exploration bonus.
pub fn eps_greedy_rl_run(env: &TabularMDP, episodes: usize, eps: f64, key: StreamKey, seed: u64, env_name: &str) -> Result<RegretLedger, Error> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::InvalidInput("ε must lie in [0, 1]"));
    }
    let (ns, na, hh) = (env.s, env.a, env.h);
    let (star, _) = value_iteration(env);
    let optimal_value = initial_value(env, &star.v[0]);
    let mut est = LayerwiseEstimator::new(env, LayerwiseMode::Frequency)?;
    let mut ledger = RegretLedger::new(seed, "eps_greedy_rl", env_name);
    for t in 1..=episodes {
        let mut rng = key.round(t as u64);
        let (mhat, _) = est.estimate()?;
        let mut q = vec![vec![0.0; ns * na]; hh + 1];
        for h in (0..hh).rev() {
            let v: Vec<f64> = q[h + 1].chunks(na).map(math::max).collect();
            for s in 0..ns {
                for a in 0..na {
                    let cont = if est.visits(h, s, a) > 0.0 { math::dot(mhat.row(h, s, a), &v) } else { 0.0 };
                    q[h][s * na + a] = mhat.reward(h, s, a) + cont;
                }
            }
        }
        let greedy = greedy_policy(&q, ns, na, hh);
        let mixed = Policy {
            probs: greedy
                .probs
                .iter()
                .map(|layer| layer.iter().map(|row| row.iter().map(|g| (1.0 - eps) * g + eps / na as f64).collect()).collect())
                .collect(),
        };
        let tau = env.rollout(&mixed, &mut rng)?;
        ledger.push(optimal_value - env.policy_value(&mixed), tau.total_reward());
        est.observe(&tau)?;
    }
    Ok(ledger)
}
