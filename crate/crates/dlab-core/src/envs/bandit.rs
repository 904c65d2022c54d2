use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::math;
use crate::numprob::dist::{FiniteDist, RewardDist};
use crate::numprob::rng::Stream;

use super::Normalization;

/// Reward law for each decision. No range restriction, so it can hold
/// class members such as the cheating code's negative-mean arms.
#[derive(Debug, Clone, PartialEq)]
pub struct BanditModel {
    pub laws: Vec<RewardDist>,
}

impl BanditModel {
    pub fn new(laws: Vec<RewardDist>) -> Self {
        BanditModel { laws }
    }

    pub fn gaussian(means: &[f64]) -> Self {
        BanditModel { laws: means.iter().map(|&m| RewardDist::gaussian(m)).collect() }
    }

    pub fn len(&self) -> usize {
        self.laws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.laws.is_empty()
    }

    pub fn means(&self) -> Vec<f64> {
        self.laws.iter().map(|l| l.mean()).collect()
    }

    pub fn mean(&self, pi: usize) -> f64 {
        self.laws[pi].mean()
    }

    /// Optimal decision, ties to the lowest index.
    pub fn best(&self) -> usize {
        math::argmax(&self.means())
    }

    pub fn best_mean(&self) -> f64 {
        self.mean(self.best())
    }

    pub fn regret(&self, pi: usize) -> f64 {
        self.best_mean() - self.mean(pi)
    }

    /// Exact expected regret of a decision distribution.
    pub fn expected_regret(&self, p: &[f64]) -> f64 {
        let m = self.means();
        let best = math::max(&m);
        p.iter().zip(&m).map(|(w, v)| w * (best - v)).sum()
    }

    pub fn sample(&self, pi: usize, rng: &mut Stream) -> Result<f64, Error> {
        self.laws.get(pi).map(|l| l.sample(rng)).ok_or(Error::InvalidInput("decision index out of range"))
    }
}

/// Multi-armed bandit with means in [0, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct BanditEnv {
    pub model: BanditModel,
    pub optimal_arm: usize,
    pub optimal_mean: f64,
}

impl BanditEnv {
    pub fn new(arms: Vec<RewardDist>) -> Result<Self, Error> {
        if arms.is_empty() {
            return Err(Error::InvalidInput("bandit needs at least one arm"));
        }
        if arms.iter().any(|a| !(0.0..=1.0).contains(&a.mean())) {
            return Err(Error::InvalidInput("bandit means must lie in [0,1]"));
        }
        let model = BanditModel::new(arms);
        let optimal_arm = model.best();
        let optimal_mean = model.mean(optimal_arm);
        Ok(BanditEnv { model, optimal_arm, optimal_mean })
    }

    pub fn gaussian(means: &[f64]) -> Result<Self, Error> {
        Self::new(means.iter().map(|&m| RewardDist::gaussian(m)).collect())
    }

    pub fn bernoulli(means: &[f64]) -> Result<Self, Error> {
        Self::new(means.iter().map(|&m| RewardDist::bernoulli(m)).collect::<Result<_, _>>()?)
    }

    pub fn arms(&self) -> usize {
        self.model.len()
    }

    pub fn normalization(&self) -> Normalization {
        Normalization::PerStep
    }

    pub fn pull(&self, arm: usize, rng: &mut Stream) -> Result<f64, Error> {
        self.model.sample(arm, rng)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Noise {
    Gaussian,
    Bernoulli,
    None,
}

impl Noise {
    pub fn law(self, mean: f64) -> RewardDist {
        match self {
            Noise::Gaussian => RewardDist::Gaussian { mean },
            Noise::Bernoulli => RewardDist::Bernoulli { mean },
            Noise::None => RewardDist::PointMass { value: mean },
        }
    }
}

/// Contextual bandit over a finite context set.
#[derive(Debug, Clone, PartialEq)]
pub struct ContextualEnv {
    pub contexts: FiniteDist,
    /// `f[x][a]` in [0, 1].
    pub f: Vec<Vec<f64>>,
    pub noise: Noise,
}

impl ContextualEnv {
    pub fn new(contexts: FiniteDist, f: Vec<Vec<f64>>, noise: Noise) -> Result<Self, Error> {
        if f.len() != contexts.len() || f.is_empty() {
            return Err(Error::DimensionMismatch { expected: contexts.len(), got: f.len() });
        }
        let a = f[0].len();
        if a == 0 || f.iter().any(|r| r.len() != a) {
            return Err(Error::InvalidInput("reward table must be rectangular"));
        }
        if f.iter().flatten().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::InvalidInput("mean rewards must lie in [0,1]"));
        }
        Ok(ContextualEnv { contexts, f, noise })
    }

    pub fn actions(&self) -> usize {
        self.f[0].len()
    }

    pub fn best(&self, x: usize) -> usize {
        math::argmax(&self.f[x])
    }

    pub fn sample_context(&self, rng: &mut Stream) -> usize {
        self.contexts.sample(rng)
    }

    pub fn reward(&self, x: usize, a: usize, rng: &mut Stream) -> Result<f64, Error> {
        let m = *self.f.get(x).and_then(|r| r.get(a)).ok_or(Error::InvalidInput("index out of range"))?;
        Ok(self.noise.law(m).sample(rng))
    }

    pub fn expected_regret(&self, x: usize, p: &[f64]) -> f64 {
        let best = math::max(&self.f[x]);
        p.iter().zip(&self.f[x]).map(|(w, v)| w * (best - v)).sum()
    }
}

/// Linear structured bandit: `f*(π) = ⟨θ*, φ(π)⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearEnv {
    pub features: Vec<Vec<f64>>,
    pub theta: Vec<f64>,
    pub noise: Noise,
    pub model: BanditModel,
}

impl LinearEnv {
    pub fn new(features: Vec<Vec<f64>>, theta: Vec<f64>, noise: Noise) -> Result<Self, Error> {
        let d = theta.len();
        if features.iter().any(|f| f.len() != d) {
            return Err(Error::InvalidInput("feature dimension mismatch"));
        }
        if math::norm(&theta) > 1.0 + 1e-12 || features.iter().any(|f| math::norm(f) > 1.0 + 1e-12) {
            return Err(Error::InvalidInput("linear instance needs ‖θ‖ ≤ 1 and ‖φ‖ ≤ 1"));
        }
        let model = BanditModel::new(features.iter().map(|f| noise.law(math::dot(f, &theta))).collect());
        Ok(LinearEnv { features, theta, noise, model })
    }
}

/// The cheating-code class: `A` arms followed by `log₂A` cheat arms.
#[derive(Debug, Clone, PartialEq)]
pub struct CheatingCode {
    pub arms: usize,
    pub bits: usize,
    pub models: Vec<BanditModel>,
}

impl CheatingCode {
    pub fn decisions(&self) -> usize {
        self.arms + self.bits
    }

    pub fn is_cheat(&self, pi: usize) -> bool {
        pi >= self.arms
    }

    /// Bit `j` (MSB first) of model `i`'s 0-based index.
    pub fn bit(&self, i: usize, j: usize) -> u8 {
        ((i >> (self.bits - 1 - j)) & 1) as u8
    }

    /// Recover the model index from noiseless cheat-arm means.
    pub fn decode(&self, cheat_means: &[f64]) -> usize {
        cheat_means.iter().fold(0, |acc, &m| (acc << 1) | usize::from(m < -0.5))
    }
}

/// Build the class and its reference model (the first member).
pub fn cheating_code(a: usize) -> Result<(CheatingCode, BanditModel), Error> {
    if a < 2 || !a.is_power_of_two() {
        return Err(Error::InvalidInput("cheating code needs A to be a power of two ≥ 2"));
    }
    let bits = a.trailing_zeros() as usize;
    let mut models = Vec::with_capacity(a);
    for i in 0..a {
        let mut means = vec![0.5; a];
        means[i] = 0.75;
        for j in 0..bits {
            let b = (i >> (bits - 1 - j)) & 1;
            means.push(-(b as f64));
        }
        models.push(BanditModel::gaussian(&means));
    }
    let reference = models[0].clone();
    Ok((CheatingCode { arms: a, bits, models }, reference))
}
