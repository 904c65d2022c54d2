use alloc::vec;
use alloc::vec::Vec;

use crate::envs::BanditModel;
use crate::error::{check_len, Error};
use crate::math;
use crate::numprob::dist::{FiniteDist, RewardDist};
use crate::numprob::divergence::hellinger_sq_reward_mixture;

/// Bayes posterior (exponential weights with η = 1 on log loss).
#[derive(Debug, Clone, PartialEq)]
pub struct LogLossPosterior {
    log_w: Vec<f64>,
    log_prior: Vec<f64>,
    pub excluded: Vec<bool>,
    /// Σ_t −ln(mixture density of the observation).
    pub mixture_log_loss: f64,
    /// Σ_t −ln m(observation) for each model.
    pub model_log_loss: Vec<f64>,
    collapsed: bool,
}

impl LogLossPosterior {
    pub fn uniform(n: usize) -> Self {
        LogLossPosterior {
            log_w: vec![0.0; n],
            log_prior: vec![-math::ln(n as f64); n],
            excluded: vec![false; n],
            mixture_log_loss: 0.0,
            model_log_loss: vec![0.0; n],
            collapsed: false,
        }
    }

    pub fn with_prior(prior: &FiniteDist) -> Self {
        let mut p = Self::uniform(prior.len());
        for (lw, &q) in p.log_w.iter_mut().zip(prior.probs()) {
            *lw = if q > 0.0 { math::ln(q) } else { f64::NEG_INFINITY };
        }
        p.log_prior = p.log_w.clone();
        p
    }

    pub fn len(&self) -> usize {
        self.log_w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_w.is_empty()
    }

    /// Condition on one observation given each model's log density of it.
    /// Models with zero density are excluded for good.
    pub fn update(&mut self, log_density: &[f64]) -> Result<(), Error> {
        check_len(self.log_w.len(), log_density.len())?;
        if self.collapsed {
            return Err(Error::PosteriorCollapsed);
        }
        let post = self.dist()?;
        let terms: Vec<f64> = post
            .probs()
            .iter()
            .zip(log_density)
            .map(|(q, l)| if *q > 0.0 { math::ln(*q) + l } else { f64::NEG_INFINITY })
            .collect();
        let m = math::max(&terms);
        let mix = if m == f64::NEG_INFINITY { m } else { m + math::ln(terms.iter().map(|x| math::exp(x - m)).sum::<f64>()) };
        self.mixture_log_loss -= mix;
        for i in 0..self.log_w.len() {
            self.model_log_loss[i] -= log_density[i];
            self.log_w[i] += log_density[i];
            if self.log_w[i] == f64::NEG_INFINITY || log_density[i].is_nan() {
                self.log_w[i] = f64::NEG_INFINITY;
                self.excluded[i] = true;
            }
        }
        let top = math::max(&self.log_w);
        if top == f64::NEG_INFINITY {
            self.collapsed = true;
            return Err(Error::PosteriorCollapsed);
        }
        self.log_w.iter_mut().for_each(|x| *x -= top);
        Ok(())
    }

    pub fn dist(&self) -> Result<FiniteDist, Error> {
        if self.collapsed {
            return Err(Error::PosteriorCollapsed);
        }
        FiniteDist::from_log_weights(&self.log_w)
    }

    /// Log-loss regret against the best single model so far, from the
    /// telescoped mixture loss `−ln Σ_i π_i e^{−L_i}` rather than the running
    /// sum, so the `ln(1/π_best)` bound holds in floating point too.
    pub fn regret(&self) -> f64 {
        let best = self.model_log_loss.iter().copied().fold(f64::INFINITY, f64::min);
        let terms: Vec<f64> = self.log_prior.iter().zip(&self.model_log_loss).map(|(p, l)| p - (l - best)).collect();
        let m = math::max(&terms);
        -(m + math::ln(terms.iter().map(|x| math::exp(x - m)).sum::<f64>()))
    }
}

/// Per-decision mean of the posterior mixture.
pub fn mixture_means(class: &[BanditModel], q: &FiniteDist) -> Vec<f64> {
    let n = class[0].len();
    (0..n).map(|pi| class.iter().zip(q.probs()).map(|(m, w)| w * m.mean(pi)).sum()).collect()
}

/// Mixture law at one decision, merging identical components.
pub fn mixture_at(class: &[BanditModel], q: &FiniteDist, pi: usize) -> Vec<(f64, RewardDist)> {
    let mut mix: Vec<(f64, RewardDist)> = Vec::new();
    for (m, &w) in class.iter().zip(q.probs()) {
        if w == 0.0 {
            continue;
        }
        let law = m.laws[pi];
        match mix.iter_mut().find(|(_, l)| *l == law) {
            Some(e) => e.0 += w,
            None => mix.push((w, law)),
        }
    }
    mix
}

/// `E_{π∼p} Hel²(M*(π), M̄(π))` with `M̄` the posterior mixture.
pub fn hellinger_to_mixture(truth: &BanditModel, class: &[BanditModel], q: &FiniteDist, p: &[f64]) -> f64 {
    p.iter()
        .enumerate()
        .filter(|(_, w)| **w > 0.0)
        .map(|(pi, w)| w * hellinger_sq_reward_mixture(&truth.laws[pi], &mixture_at(class, q, pi)))
        .sum()
}
