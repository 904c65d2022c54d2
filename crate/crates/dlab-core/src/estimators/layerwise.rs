use alloc::vec;
use alloc::vec::Vec;

use crate::envs::{TabularMDP, Trajectory};
use crate::error::Error;
use crate::math;
use crate::numprob::dist::FiniteDist;
use crate::numprob::divergence::{divergence, Divergence};

use super::posterior::LogLossPosterior;

/// Candidate transition kernels per layer: `kernels[h][k]` is a flat
/// `[s][a][s']` table.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelClass {
    pub kernels: Vec<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LayerwiseMode {
    /// Empirical frequencies; unvisited pairs get a uniform row.
    Frequency,
    /// Bayes posterior over each layer's kernel class; the estimate is the
    /// posterior mixture, itself a valid kernel.
    Posterior(KernelClass),
}

/// One estimator per layer, combined into a proper tabular MDP estimate.
/// Rewards and the initial distribution are taken as known.
#[derive(Debug, Clone)]
pub struct LayerwiseEstimator {
    s: usize,
    a: usize,
    h: usize,
    rewards: Vec<f64>,
    d1: FiniteDist,
    mode: LayerwiseMode,
    counts: Vec<f64>,
    posteriors: Vec<LogLossPosterior>,
}

impl LayerwiseEstimator {
    pub fn new(reference: &TabularMDP, mode: LayerwiseMode) -> Result<Self, Error> {
        let (s, a, h) = (reference.s, reference.a, reference.h);
        let posteriors = match &mode {
            LayerwiseMode::Frequency => Vec::new(),
            LayerwiseMode::Posterior(c) => {
                if c.kernels.len() != h || c.kernels.iter().flatten().any(|k| k.len() != s * a * s) {
                    return Err(Error::InvalidInput("kernel class must be H × K × (S·A·S)"));
                }
                c.kernels.iter().map(|k| LogLossPosterior::uniform(k.len())).collect()
            }
        };
        Ok(LayerwiseEstimator {
            s,
            a,
            h,
            rewards: reference.r.clone(),
            d1: reference.d1.clone(),
            mode,
            counts: vec![0.0; h * s * a * s],
            posteriors,
        })
    }

    pub fn observe(&mut self, tau: &Trajectory) -> Result<(), Error> {
        for h in 0..self.h {
            let st = tau.steps[h];
            let next = if h + 1 < self.h { tau.steps[h + 1].s } else { tau.terminal };
            let base = ((h * self.s + st.s) * self.a + st.a) * self.s;
            self.counts[base + next] += 1.0;
            if let LayerwiseMode::Posterior(c) = &self.mode {
                let off = (st.s * self.a + st.a) * self.s + next;
                let ld: Vec<f64> = c.kernels[h]
                    .iter()
                    .map(|k| if k[off] > 0.0 { math::ln(k[off]) } else { f64::NEG_INFINITY })
                    .collect();
                self.posteriors[h].update(&ld)?;
            }
        }
        Ok(())
    }

    pub fn visits(&self, h: usize, s: usize, a: usize) -> f64 {
        let base = ((h * self.s + s) * self.a + a) * self.s;
        self.counts[base..base + self.s].iter().sum()
    }

    /// Current estimate, plus whether any uniform default row was used.
    pub fn estimate(&self) -> Result<(TabularMDP, bool), Error> {
        let (s, a, h) = (self.s, self.a, self.h);
        let mut p = vec![0.0; h * s * a * s];
        let mut unvisited = false;
        match &self.mode {
            LayerwiseMode::Frequency => {
                for row in 0..h * s * a {
                    let c = &self.counts[row * s..(row + 1) * s];
                    let n: f64 = c.iter().sum();
                    if n == 0.0 {
                        unvisited = true;
                        p[row * s..(row + 1) * s].iter_mut().for_each(|x| *x = 1.0 / s as f64);
                    } else {
                        for k in 0..s {
                            p[row * s + k] = c[k] / n;
                        }
                    }
                }
            }
            LayerwiseMode::Posterior(c) => {
                for layer in 0..h {
                    let q = self.posteriors[layer].dist()?;
                    let out = &mut p[layer * s * a * s..(layer + 1) * s * a * s];
                    for (kernel, &w) in c.kernels[layer].iter().zip(q.probs()) {
                        for (o, x) in out.iter_mut().zip(kernel) {
                            *o += w * x;
                        }
                    }
                }
            }
        }
        let m = TabularMDP::new(s, a, h, p, self.rewards.clone(), self.d1.clone())?;
        Ok((m, unvisited))
    }

    /// Per-layer `E_{(s,a)∼d_h} Hel²(P*_h(s,a), P̂_h(s,a))` under the given
    /// occupancies of the true MDP.
    pub fn layer_hellinger(&self, truth: &TabularMDP, occupancy: &[Vec<f64>]) -> Result<Vec<f64>, Error> {
        let (est, _) = self.estimate()?;
        let mut out = vec![0.0; self.h];
        for h in 0..self.h {
            for s in 0..self.s {
                for a in 0..self.a {
                    let w = occupancy[h][s * self.a + a];
                    if w == 0.0 {
                        continue;
                    }
                    let p = FiniteDist::from_weights(truth.row(h, s, a))?;
                    let q = FiniteDist::from_weights(est.row(h, s, a))?;
                    out[h] += w * divergence(Divergence::HellingerSq, &p, &q)?;
                }
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::{combination_lock, Policy};
    use crate::numprob::rng::Stream;

    #[test]
    fn deterministic_recovery() {
        let lock = combination_lock(3);
        let mut est = LayerwiseEstimator::new(&lock, LayerwiseMode::Frequency).unwrap();
        let mut rng = Stream::from_seed(4);
        // Cover every reachable (h, s, a) with deterministic rollouts.
        for first in 0..2 {
            for second in 0..2 {
                for third in 0..2 {
                    let t = Policy::deterministic(&[vec![first; 5], vec![second; 5], vec![third; 5]], 2);
                    est.observe(&lock.rollout(&t, &mut rng).unwrap()).unwrap();
                }
            }
        }
        let (m, unvisited) = est.estimate().unwrap();
        assert!(unvisited);
        let code = crate::envs::default_lock_code(3);
        let good = Policy::deterministic(&[vec![code[0]; 5], vec![code[1]; 5], vec![code[2]; 5]], 2);
        assert_eq!(m.policy_value(&good), 1.0);
        for h in 0..3 {
            for s in 0..5 {
                for a in 0..2 {
                    if est.visits(h, s, a) > 0.0 {
                        assert_eq!(m.row(h, s, a), lock.row(h, s, a));
                    }
                }
            }
        }
    }

    #[test]
    fn frequency_rows() {
        let lock = combination_lock(1);
        let mut est = LayerwiseEstimator::new(&lock, LayerwiseMode::Frequency).unwrap();
        let mut rng = Stream::from_seed(5);
        let pi = Policy::uniform(1, 3, 2);
        let mut n = [0.0; 2];
        for _ in 0..10 {
            let t = lock.rollout(&pi, &mut rng).unwrap();
            n[t.steps[0].a] += 1.0;
            est.observe(&t).unwrap();
        }
        let (m, _) = est.estimate().unwrap();
        assert_eq!(est.visits(0, 0, 0) + est.visits(0, 0, 1), 10.0);
        assert_eq!(m.row(0, 0, 1)[1], if n[1] > 0.0 { 1.0 } else { 1.0 / 3.0 });
    }
}
