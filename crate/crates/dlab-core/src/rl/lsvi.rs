//! Least-squares value iteration with elliptical bonuses on low-rank MDPs.

use alloc::vec;
use alloc::vec::Vec;

use super::planning::{greedy_policy, initial_value, value_iteration};
use crate::contextual::elliptic_potential_bound;
use crate::envs::LowRankMDP;
use crate::error::Error;
use crate::ledger::RegretLedger;
use crate::math;
use crate::numprob::linalg::{ridge_in_ball, sherman_morrison, Mat};
use crate::numprob::rng::StreamKey;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LsviConfig {
    pub episodes: usize,
    pub delta: f64,
    /// Constant `c` in `R = c·d²·ln(HT/δ)`.
    pub c: f64,
}

impl LsviConfig {
    pub fn new(episodes: usize, delta: f64) -> Self {
        LsviConfig { episodes, delta, c: 1.0 }
    }

    pub fn bonus_scale(&self, d: usize, h: usize) -> f64 {
        self.c * (d * d) as f64 * math::ln((h * self.episodes) as f64 / self.delta)
    }
}

/// Per-layer `Σ_h = I + Σ φφᵀ`, its inverse, the data `Σ_h − I` and the
/// last fitted `θ̂_h` (with `‖θ̂_h‖ ≤ 2√d`).
#[derive(Debug, Clone, PartialEq)]
pub struct LsviState {
    pub gram: Vec<Mat>,
    pub sigma_inv: Vec<Mat>,
    pub theta: Vec<Vec<f64>>,
    /// Bonus scale `R`.
    pub r: f64,
    /// `counts[h][(s·A + a)·S + s']`.
    counts: Vec<Vec<f64>>,
}

impl LsviState {
    pub fn new(env: &LowRankMDP, r: f64) -> Self {
        let (d, hh) = (env.d, env.h);
        LsviState {
            gram: vec![Mat::zeros(d, d); hh],
            sigma_inv: vec![Mat::identity(d); hh],
            theta: vec![vec![0.0; d]; hh],
            r,
            counts: vec![vec![0.0; env.s * env.a * env.s]; hh],
        }
    }

    pub fn bonus(&self, h: usize, phi: &[f64]) -> f64 {
        math::sqrt(self.r * self.sigma_inv[h].quad(phi).max(0.0))
    }

    /// Backward ridge regressions; returns `Q̄` with a zero layer `H`.
    pub fn plan(&mut self, env: &LowRankMDP) -> Vec<Vec<f64>> {
        let (ns, na, hh, d) = (env.s, env.a, env.h, env.d);
        let t = env.tabular();
        let radius = 2.0 * math::sqrt(d as f64);
        let mut q = vec![vec![0.0; ns * na]; hh + 1];
        for h in (0..hh).rev() {
            let v: Vec<f64> = q[h + 1].chunks(na).map(math::max).collect();
            let mut b = vec![0.0; d];
            for sa in 0..ns * na {
                let row = &self.counts[h][sa * ns..(sa + 1) * ns];
                let (n, cont) = row.iter().zip(&v).fold((0.0, 0.0), |(n, c), (k, x)| (n + k, c + k * x));
                if n == 0.0 {
                    continue;
                }
                let y = n * t.reward(h, sa / na, sa % na) + cont;
                for (bi, fi) in b.iter_mut().zip(&env.phi[sa]) {
                    *bi += y * fi;
                }
            }
            self.theta[h] = ridge_in_ball(&self.gram[h], &b, radius);
            for sa in 0..ns * na {
                let phi = &env.phi[sa];
                q[h][sa] = (math::dot(phi, &self.theta[h]) + self.bonus(h, phi)).min(1.0);
            }
        }
        q
    }

    /// Add one transition; returns `‖φ‖²_{Σ_h⁻¹}` before the update.
    pub fn observe(&mut self, env: &LowRankMDP, h: usize, s: usize, a: usize, next: usize) -> f64 {
        let phi = env.feature(s, a);
        let w = self.sigma_inv[h].quad(phi);
        self.counts[h][(s * env.a + a) * env.s + next] += 1.0;
        self.gram[h].add_outer(phi, 1.0);
        sherman_morrison(&mut self.sigma_inv[h], phi);
        w
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LsviReport {
    pub ledger: RegretLedger,
    /// Per-layer `Σ_t ‖φ(s_h, a_h)‖²_{Σ_h⁻¹}`.
    pub potential: Vec<f64>,
    pub potential_bound: f64,
    /// Episodes with `Q̄ ≥ Q*` everywhere.
    pub optimistic_episodes: usize,
}

impl LsviReport {
    pub fn potential_ok(&self) -> bool {
        self.potential.iter().all(|&p| p <= self.potential_bound)
    }
}

pub fn lsvi_ucb_run(env: &LowRankMDP, cfg: &LsviConfig, key: StreamKey, seed: u64, env_name: &str) -> Result<LsviReport, Error> {
    if !(cfg.delta > 0.0 && cfg.delta < 1.0) || cfg.episodes == 0 {
        return Err(Error::InvalidInput("need T ≥ 1 and δ in (0, 1)"));
    }
    let t = env.tabular();
    let (ns, na, hh, d) = (env.s, env.a, env.h, env.d);
    let (star, _) = value_iteration(t);
    let optimal_value = initial_value(t, &star.v[0]);
    let mut state = LsviState::new(env, cfg.bonus_scale(d, hh));
    let mut ledger = RegretLedger::new(seed, "lsvi_ucb", env_name);
    let mut potential = vec![0.0; hh];
    let mut optimistic_episodes = 0;
    for ep in 1..=cfg.episodes {
        let mut rng = key.round(ep as u64);
        let q = state.plan(env);
        if q.iter().zip(&star.q).all(|(qb, qs)| qb.iter().zip(qs).all(|(x, y)| *x >= y - 1e-12)) {
            optimistic_episodes += 1;
        }
        let pi = greedy_policy(&q, ns, na, hh);
        let tau = t.rollout(&pi, &mut rng)?;
        ledger.push(optimal_value - t.policy_value(&pi), tau.total_reward());
        for (h, step) in tau.steps.iter().enumerate() {
            let next = if h + 1 < hh { tau.steps[h + 1].s } else { tau.terminal };
            potential[h] += state.observe(env, h, step.s, step.a, next);
        }
    }
    Ok(LsviReport { ledger, potential, potential_bound: elliptic_potential_bound(d, cfg.episodes), optimistic_episodes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::random_low_rank;
    use crate::numprob::rng::{Seed, Stream};

    #[test]
    fn first_plan_is_clipped() {
        let env = random_low_rank(4, 2, 3, 2, &mut Stream::from_seed(2));
        let cfg = LsviConfig::new(10, 0.1);
        let mut st = LsviState::new(&env, cfg.bonus_scale(2, 3));
        let q = st.plan(&env);
        assert!(q[..3].iter().flatten().all(|&x| x == 1.0));
    }

    #[test]
    fn potential_within_bound() {
        let env = random_low_rank(4, 2, 3, 2, &mut Stream::from_seed(5));
        let rep = lsvi_ucb_run(&env, &LsviConfig::new(60, 0.1), StreamKey::new(Seed(1), 2), 1, "lr").unwrap();
        assert!(rep.potential_ok());
        assert_eq!(rep.ledger.len(), 60);
    }
}
