use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::math;
use crate::numprob::rng::Stream;

const SUM_TOL: f64 = 1e-9;

/// A probability vector over `0..len`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteDist {
    probs: Vec<f64>,
}

impl FiniteDist {
    pub fn new(probs: Vec<f64>) -> Result<Self, Error> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty support"));
        }
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::InvalidDistribution("negative or non-finite entry"));
        }
        let s: f64 = probs.iter().sum();
        if (s - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidDistribution("entries do not sum to 1"));
        }
        Ok(FiniteDist { probs })
    }

    /// Normalize nonnegative weights.
    pub fn from_weights(w: &[f64]) -> Result<Self, Error> {
        if w.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::InvalidDistribution("negative or non-finite weight"));
        }
        let s: f64 = w.iter().sum();
        if !(s > 0.0) {
            return Err(Error::InvalidDistribution("weights sum to zero"));
        }
        Ok(FiniteDist { probs: w.iter().map(|x| x / s).collect() })
    }

    /// Normalize log-weights with max subtraction. Entries equal to
    /// `-inf` get probability exactly zero.
    pub fn from_log_weights(lw: &[f64]) -> Result<Self, Error> {
        let m = math::max(lw);
        if m == f64::NEG_INFINITY || m.is_nan() {
            return Err(Error::PosteriorCollapsed);
        }
        let w: Vec<f64> = lw.iter().map(|x| math::exp(x - m)).collect();
        Self::from_weights(&w)
    }

    pub fn uniform(n: usize) -> Self {
        assert!(n > 0);
        FiniteDist { probs: vec![1.0 / n as f64; n] }
    }

    pub fn point(n: usize, i: usize) -> Self {
        let mut probs = vec![0.0; n];
        probs[i] = 1.0;
        FiniteDist { probs }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn expect(&self, values: &[f64]) -> f64 {
        math::dot(&self.probs, values)
    }

    pub fn sample(&self, rng: &mut Stream) -> usize {
        rng.categorical(&self.probs)
    }

    /// Convex combination `(1-w)·self + w·other`.
    pub fn mix(&self, other: &FiniteDist, w: f64) -> FiniteDist {
        let probs = self.probs.iter().zip(&other.probs).map(|(a, b)| (1.0 - w) * a + w * b).collect();
        FiniteDist { probs }
    }
}

impl core::ops::Index<usize> for FiniteDist {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.probs[i]
    }
}

/// Reward law attached to a decision. Gaussians always have unit variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RewardDist {
    Gaussian { mean: f64 },
    Bernoulli { mean: f64 },
    PointMass { value: f64 },
}

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

impl RewardDist {
    pub fn gaussian(mean: f64) -> Self {
        RewardDist::Gaussian { mean }
    }

    pub fn bernoulli(mean: f64) -> Result<Self, Error> {
        if !(0.0..=1.0).contains(&mean) {
            return Err(Error::InvalidInput("Bernoulli mean outside [0,1]"));
        }
        Ok(RewardDist::Bernoulli { mean })
    }

    pub fn point(value: f64) -> Self {
        RewardDist::PointMass { value }
    }

    pub fn mean(&self) -> f64 {
        match *self {
            RewardDist::Gaussian { mean } | RewardDist::Bernoulli { mean } => mean,
            RewardDist::PointMass { value } => value,
        }
    }

    pub fn sample(&self, rng: &mut Stream) -> f64 {
        match *self {
            RewardDist::Gaussian { mean } => mean + rng.normal(),
            RewardDist::Bernoulli { mean } => {
                if rng.bernoulli(mean) {
                    1.0
                } else {
                    0.0
                }
            }
            RewardDist::PointMass { value } => value,
        }
    }

    /// Density (Gaussian) or mass (Bernoulli, point mass) of an outcome.
    pub fn density(&self, r: f64) -> f64 {
        match *self {
            RewardDist::Gaussian { mean } => {
                let z = r - mean;
                INV_SQRT_2PI * math::exp(-0.5 * z * z)
            }
            RewardDist::Bernoulli { mean } => {
                if r == 1.0 {
                    mean
                } else if r == 0.0 {
                    1.0 - mean
                } else {
                    0.0
                }
            }
            RewardDist::PointMass { value } => {
                if r == value {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    /// Log density; `-inf` outside the support.
    pub fn log_density(&self, r: f64) -> f64 {
        match *self {
            RewardDist::Gaussian { mean } => {
                let z = r - mean;
                -0.5 * z * z + math::ln(INV_SQRT_2PI)
            }
            _ => {
                let d = self.density(r);
                if d > 0.0 {
                    math::ln(d)
                } else {
                    f64::NEG_INFINITY
                }
            }
        }
    }
}
