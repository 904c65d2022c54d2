//! BiLinUCB over a finite Q-class: average-optimistic selection with
//! elimination by empirical Bellman residuals.

use alloc::vec;
use alloc::vec::Vec;

use super::planning::{greedy_policy, initial_value, value_iteration};
use crate::envs::{LowRankMDP, Policy, TabularMDP};
use crate::error::Error;
use crate::math;
use crate::numprob::rng::{Stream, StreamKey};

/// `q[h][s·A + a]` for `h = 0..H`, plus a zero layer `H`.
#[derive(Debug, Clone, PartialEq)]
pub struct QFunction {
    pub q: Vec<Vec<f64>>,
}

impl QFunction {
    pub fn value_at_start(&self, mdp: &TabularMDP) -> f64 {
        let v: Vec<f64> = self.q[0].chunks(mdp.a).map(math::max).collect();
        initial_value(mdp, &v)
    }

    pub fn greedy(&self, mdp: &TabularMDP) -> Policy {
        greedy_policy(&self.q, mdp.s, mdp.a, mdp.h)
    }
}

/// `Q*` followed by `extra` linear perturbations `Q*_h + ⟨φ, u_h⟩` with each
/// `u_h` uniform on `[−scale, scale]^d`. Every member is linear in `φ`.
pub fn linear_q_class(env: &LowRankMDP, extra: usize, scale: f64, rng: &mut Stream) -> Vec<QFunction> {
    let (star, _) = value_iteration(env.tabular());
    let mut out = vec![QFunction { q: star.q.clone() }];
    for _ in 0..extra {
        let mut q = star.q.clone();
        for layer in q.iter_mut().take(env.h) {
            let u: Vec<f64> = (0..env.d).map(|_| scale * (2.0 * rng.uniform() - 1.0)).collect();
            for (x, phi) in layer.iter_mut().zip(&env.phi) {
                *x += math::dot(phi, &u);
            }
        }
        out.push(QFunction { q });
    }
    out
}

/// `β = c·K·(ln|Q| + ln(HK/δ))/n`.
pub fn bilinucb_beta(iters: usize, n: usize, class_size: usize, h: usize, delta: f64, c: f64) -> f64 {
    c * iters as f64 * (math::ln(class_size as f64) + math::ln((h * iters) as f64 / delta)) / n as f64
}

#[derive(Debug, Clone, PartialEq)]
pub struct BilinReport {
    pub policy: Policy,
    /// Index of the iteration whose policy was returned.
    pub chosen: usize,
    /// Empirical mean return of each iteration's rollouts.
    pub returns: Vec<f64>,
    /// Surviving-set size after each iteration.
    pub survivors: Vec<usize>,
    /// Class index selected at each iteration.
    pub selected: Vec<usize>,
    /// Whether each class member survived every iteration.
    pub survived_all: Vec<bool>,
}

pub fn bilinucb_run(env: &TabularMDP, class: &[QFunction], iters: usize, n: usize, beta: f64, key: StreamKey) -> Result<BilinReport, Error> {
    if class.is_empty() || iters == 0 || n == 0 {
        return Err(Error::InvalidInput("need a nonempty class, K ≥ 1 and n ≥ 1"));
    }
    let (na, hh) = (env.a, env.h);
    if class.iter().any(|f| f.q.len() != hh + 1 || f.q.iter().any(|l| l.len() != env.s * na)) {
        return Err(Error::InvalidInput("Q tables must be (H+1) × S·A"));
    }
    let starts: Vec<f64> = class.iter().map(|f| f.value_at_start(env)).collect();
    let vmax: Vec<Vec<Vec<f64>>> = class.iter().map(|f| f.q.iter().map(|l| l.chunks(na).map(math::max).collect()).collect()).collect();
    let mut alive = vec![true; class.len()];
    let mut sq = vec![vec![0.0; hh]; class.len()];
    let (mut returns, mut survivors, mut selected, mut policies) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    for k in 0..iters {
        let pick = (0..class.len())
            .filter(|&i| alive[i])
            .fold(None, |best: Option<usize>, i| match best {
                Some(b) if starts[b] >= starts[i] => Some(b),
                _ => Some(i),
            })
            .ok_or(Error::Internal("surviving set is empty"))?;
        selected.push(pick);
        let pi = class[pick].greedy(env);
        let mut resid = vec![vec![0.0; hh]; class.len()];
        let mut ret = 0.0;
        let stream_key = key.child(k as u64);
        for i in 0..n {
            let mut rng = stream_key.round(i as u64);
            let tau = env.rollout(&pi, &mut rng)?;
            ret += tau.total_reward();
            for h in 0..hh {
                let st = tau.steps[h];
                let next = if h + 1 < hh { tau.steps[h + 1].s } else { tau.terminal };
                for (f, r) in resid.iter_mut().enumerate() {
                    r[h] += class[f].q[h][st.s * na + st.a] - st.r - vmax[f][h + 1][next];
                }
            }
        }
        returns.push(ret / n as f64);
        policies.push(pi);
        for f in 0..class.len() {
            for h in 0..hh {
                let e = resid[f][h] / n as f64;
                sq[f][h] += e * e;
            }
            alive[f] = sq[f].iter().all(|&s| s <= beta);
        }
        let count = alive.iter().filter(|&&x| x).count();
        survivors.push(count);
        if count == 0 {
            return Err(Error::InvalidInput("every Q was eliminated; β is too small"));
        }
    }
    let chosen = math::argmax(&returns);
    let survived_all = alive;
    Ok(BilinReport { policy: policies.swap_remove(chosen), chosen, returns, survivors, selected, survived_all })
}
