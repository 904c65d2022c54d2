use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::numprob::dist::FiniteDist;
use crate::numprob::rng::Stream;

/// Finite-horizon MDP with deterministic rewards, stored densely.
/// Layers are 0-based internally (`h = 0..H`).
#[derive(Debug, Clone, PartialEq)]
pub struct TabularMDP {
    pub s: usize,
    pub a: usize,
    pub h: usize,
    /// `p[((h·S + s)·A + a)·S + s']`.
    pub p: Vec<f64>,
    /// `r[(h·S + s)·A + a]`.
    pub r: Vec<f64>,
    pub d1: FiniteDist,
}

/// Markov, possibly randomized, non-stationary policy:
/// `probs[h][s]` is a distribution over actions.
#[derive(Debug, Clone, PartialEq)]
pub struct Policy {
    pub probs: Vec<Vec<Vec<f64>>>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Step {
    pub s: usize,
    pub a: usize,
    pub r: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub steps: Vec<Step>,
    /// State reached after the last action.
    pub terminal: usize,
}

impl Trajectory {
    pub fn total_reward(&self) -> f64 {
        self.steps.iter().map(|s| s.r).sum()
    }
}

impl Policy {
    pub fn deterministic(table: &[Vec<usize>], a: usize) -> Self {
        let probs = table
            .iter()
            .map(|layer| {
                layer
                    .iter()
                    .map(|&act| {
                        let mut v = vec![0.0; a];
                        v[act] = 1.0;
                        v
                    })
                    .collect()
            })
            .collect();
        Policy { probs }
    }

    pub fn uniform(h: usize, s: usize, a: usize) -> Self {
        Policy { probs: vec![vec![vec![1.0 / a as f64; a]; s]; h] }
    }

    pub fn random_deterministic(h: usize, s: usize, a: usize, rng: &mut Stream) -> Self {
        let table: Vec<Vec<usize>> = (0..h).map(|_| (0..s).map(|_| rng.below(a)).collect()).collect();
        Self::deterministic(&table, a)
    }

    pub fn random_stochastic(h: usize, s: usize, a: usize, rng: &mut Stream) -> Self {
        let probs = (0..h)
            .map(|_| {
                (0..s)
                    .map(|_| {
                        let w: Vec<f64> = (0..a).map(|_| rng.uniform() + 1e-3).collect();
                        let z: f64 = w.iter().sum();
                        w.iter().map(|x| x / z).collect()
                    })
                    .collect()
            })
            .collect();
        Policy { probs }
    }

    pub fn dist(&self, h: usize, s: usize) -> &[f64] {
        &self.probs[h][s]
    }

    pub fn act(&self, h: usize, s: usize, rng: &mut Stream) -> usize {
        rng.categorical(&self.probs[h][s])
    }
}

impl TabularMDP {
    pub fn new(s: usize, a: usize, h: usize, p: Vec<f64>, r: Vec<f64>, d1: FiniteDist) -> Result<Self, Error> {
        let m = TabularMDP { s, a, h, p, r, d1 };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<(), Error> {
        let (s, a, h) = (self.s, self.a, self.h);
        if s == 0 || a == 0 || h == 0 {
            return Err(Error::InvalidInput("S, A, H must be positive"));
        }
        if self.p.len() != h * s * a * s || self.r.len() != h * s * a || self.d1.len() != s {
            return Err(Error::InvalidInput("table sizes do not match (S, A, H)"));
        }
        for row in self.p.chunks(s) {
            if row.iter().any(|x| !(*x >= 0.0)) || (row.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
                return Err(Error::InvalidInput("transition row is not a distribution"));
            }
        }
        if self.r.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) {
            return Err(Error::InvalidInput("rewards must be nonnegative"));
        }
        if self.max_path_reward() > 1.0 + 1e-9 {
            return Err(Error::InvalidInput("some trajectory collects more than 1 in total"));
        }
        Ok(())
    }

    #[inline]
    pub fn idx(&self, h: usize, s: usize, a: usize) -> usize {
        (h * self.s + s) * self.a + a
    }

    pub fn row(&self, h: usize, s: usize, a: usize) -> &[f64] {
        let i = self.idx(h, s, a) * self.s;
        &self.p[i..i + self.s]
    }

    pub fn reward(&self, h: usize, s: usize, a: usize) -> f64 {
        self.r[self.idx(h, s, a)]
    }

    /// Largest total reward along any reachable path.
    pub fn max_path_reward(&self) -> f64 {
        let mut w = vec![0.0; self.s];
        for h in (0..self.h).rev() {
            let mut next = vec![0.0f64; self.s];
            for s in 0..self.s {
                for a in 0..self.a {
                    let cont = self
                        .row(h, s, a)
                        .iter()
                        .zip(&w)
                        .filter(|(p, _)| **p > 0.0)
                        .map(|(_, v)| *v)
                        .fold(0.0, f64::max);
                    next[s] = next[s].max(self.reward(h, s, a) + cont);
                }
            }
            w = next;
        }
        self.d1.probs().iter().zip(&w).filter(|(p, _)| **p > 0.0).map(|(_, v)| *v).fold(0.0, f64::max)
    }

    /// State-action occupancies `d[h][s·A + a]`.
    pub fn occupancy(&self, pi: &Policy) -> Vec<Vec<f64>> {
        let (ns, na) = (self.s, self.a);
        let mut out = Vec::with_capacity(self.h);
        let mut ds: Vec<f64> = self.d1.probs().to_vec();
        for h in 0..self.h {
            let mut dsa = vec![0.0; ns * na];
            let mut next = vec![0.0; ns];
            for s in 0..ns {
                if ds[s] == 0.0 {
                    continue;
                }
                for a in 0..na {
                    let m = ds[s] * pi.probs[h][s][a];
                    dsa[s * na + a] = m;
                    if m == 0.0 {
                        continue;
                    }
                    for (n, p) in next.iter_mut().zip(self.row(h, s, a)) {
                        *n += m * p;
                    }
                }
            }
            out.push(dsa);
            ds = next;
        }
        out
    }

    /// State occupancies `d[h][s]`.
    pub fn state_occupancy(&self, pi: &Policy) -> Vec<Vec<f64>> {
        self.occupancy(pi)
            .into_iter()
            .map(|dsa| dsa.chunks(self.a).map(|c| c.iter().sum()).collect())
            .collect()
    }

    /// Exact `f(π) = E[Σ_h r_h]` through the occupancy recursion.
    pub fn policy_value(&self, pi: &Policy) -> f64 {
        self.occupancy(pi)
            .iter()
            .enumerate()
            .map(|(h, d)| d.iter().enumerate().map(|(i, m)| m * self.r[h * self.s * self.a + i]).sum::<f64>())
            .sum()
    }

    /// `Q^π_h(s,a)` and `V^π_h(s)` by backward recursion; index `H` holds
    /// the zero terminal layer.
    pub fn evaluate(&self, pi: &Policy) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let (ns, na) = (self.s, self.a);
        let mut q = vec![vec![0.0; ns * na]; self.h + 1];
        let mut v = vec![vec![0.0; ns]; self.h + 1];
        for h in (0..self.h).rev() {
            for s in 0..ns {
                for a in 0..na {
                    let cont: f64 = self.row(h, s, a).iter().zip(&v[h + 1]).map(|(p, x)| p * x).sum();
                    q[h][s * na + a] = self.reward(h, s, a) + cont;
                }
                v[h][s] = (0..na).map(|a| pi.probs[h][s][a] * q[h][s * na + a]).sum();
            }
        }
        (q, v)
    }

    /// One episode with actions chosen by `choose(h, s, rng)`.
    pub fn rollout_with(
        &self,
        rng: &mut Stream,
        mut choose: impl FnMut(usize, usize, &mut Stream) -> usize,
    ) -> Result<Trajectory, Error> {
        let mut s = self.d1.sample(rng);
        let mut steps = Vec::with_capacity(self.h);
        for h in 0..self.h {
            let a = choose(h, s, rng);
            if a >= self.a {
                return Err(Error::InvalidInput("action index out of range"));
            }
            let r = self.reward(h, s, a);
            steps.push(Step { s, a, r });
            s = rng.categorical(self.row(h, s, a));
        }
        Ok(Trajectory { steps, terminal: s })
    }

    pub fn rollout(&self, pi: &Policy, rng: &mut Stream) -> Result<Trajectory, Error> {
        self.rollout_with(rng, |h, s, r| pi.act(h, s, r))
    }
}

/// Random instance: Dirichlet-like rows with a few zeros, rewards in
/// `[0, 1/H]` so every trajectory total lies in [0, 1].
pub fn random_tabular(s: usize, a: usize, h: usize, rng: &mut Stream) -> TabularMDP {
    let mut p = Vec::with_capacity(h * s * a * s);
    for _ in 0..h * s * a {
        let w: Vec<f64> = (0..s).map(|_| if rng.uniform() < 0.2 { 0.0 } else { -crate::math::ln(1.0 - rng.uniform()) }).collect();
        let z: f64 = w.iter().sum();
        if z > 0.0 {
            p.extend(w.iter().map(|x| x / z));
        } else {
            let k = rng.below(s);
            p.extend((0..s).map(|i| if i == k { 1.0 } else { 0.0 }));
        }
    }
    let r = (0..h * s * a).map(|_| rng.uniform() / h as f64).collect();
    let w: Vec<f64> = (0..s).map(|_| rng.uniform() + 0.05).collect();
    let d1 = FiniteDist::from_weights(&w).expect("positive weights");
    TabularMDP::new(s, a, h, p, r, d1).expect("generator produces valid MDPs")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn occupancy_conserves_mass() {
        let mut rng = Stream::from_seed(1);
        for _ in 0..20 {
            let m = random_tabular(4, 3, 5, &mut rng);
            let pi = Policy::random_stochastic(5, 4, 3, &mut rng);
            for d in m.occupancy(&pi) {
                assert!((d.iter().sum::<f64>() - 1.0).abs() < 1e-12);
            }
            let (_, v) = m.evaluate(&pi);
            let direct: f64 = m.d1.probs().iter().zip(&v[0]).map(|(p, x)| p * x).sum();
            assert!((direct - m.policy_value(&pi)).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_reward_mdp() {
        let mut rng = Stream::from_seed(2);
        let mut m = random_tabular(3, 2, 3, &mut rng);
        m.r.iter_mut().for_each(|x| *x = 0.0);
        let pi = Policy::random_stochastic(3, 3, 2, &mut rng);
        assert_eq!(m.policy_value(&pi), 0.0);
    }

    #[test]
    fn rejects_bad_tables() {
        let d1 = FiniteDist::point(1, 0);
        assert!(TabularMDP::new(1, 1, 1, vec![0.5], vec![0.0], d1.clone()).is_err());
        assert!(TabularMDP::new(1, 1, 2, vec![1.0, 1.0], vec![0.6, 0.6], d1).is_err());
    }
}
