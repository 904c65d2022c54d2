//! Closed-form strategies that certify DEC bounds for specific classes.

use alloc::vec;
use alloc::vec::Vec;

use crate::contextual::igw;
use crate::envs::CheatingCode;
use crate::error::Error;
use crate::math;
use crate::numprob::design::{g_optimal_design, Design};
use crate::numprob::dist::FiniteDist;

/// `E_p[max f − f(π)] − γ E_p[(f(π) − f̂(π))²]` for a structured model `f`.
pub fn structured_payoff(p: &[f64], f: &[f64], fhat: &[f64], gamma: f64) -> f64 {
    let b = math::max(f);
    let reg: f64 = p.iter().zip(f).map(|(w, v)| w * (b - v)).sum();
    let est: f64 = p.iter().zip(f.iter().zip(fhat)).map(|(w, (v, h))| w * (v - h) * (v - h)).sum();
    reg - gamma * est
}

#[derive(Debug, Clone)]
pub struct LinearDecStrategy {
    pub p: FiniteDist,
    pub lambda: f64,
    pub design: Design,
}

/// Optimal design on gap-reweighted features mixed with the greedy point,
/// then inverse weighting with `η = γ/d`.
pub fn linear_dec_strategy(theta_hat: &[f64], features: &[Vec<f64>], gamma: f64) -> Result<LinearDecStrategy, Error> {
    if !(gamma > 0.0) || features.is_empty() {
        return Err(Error::InvalidInput("need γ > 0 and a nonempty decision set"));
    }
    let d = theta_hat.len();
    let eta = gamma / d as f64;
    let fhat: Vec<f64> = features.iter().map(|f| math::dot(theta_hat, f)).collect();
    let greedy = math::argmax(&fhat);
    let gaps: Vec<f64> = fhat.iter().map(|v| fhat[greedy] - v).collect();
    let scaled: Vec<Vec<f64>> = features
        .iter()
        .zip(&gaps)
        .map(|(f, g)| {
            let s = math::sqrt(1.0 + eta * g);
            f.iter().map(|x| x / s).collect()
        })
        .collect();
    let design = g_optimal_design(&scaled, 1e-6)?;
    let mut q: Vec<f64> = design.weights.probs().iter().map(|w| 0.5 * w).collect();
    q[greedy] += 0.5;
    let total = |lam: f64| q.iter().zip(&gaps).map(|(w, g)| w / (lam + eta * g)).sum::<f64>();
    let (mut lo, mut hi) = (0.5, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if total(mid) > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let lambda = 0.5 * (lo + hi);
    let p: Vec<f64> = q.iter().zip(&gaps).map(|(w, g)| w / (lambda + eta * g)).collect();
    Ok(LinearDecStrategy { p: FiniteDist::from_weights(&p)?, lambda, design })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzDecStrategy {
    pub p: FiniteDist,
    pub cover: Vec<usize>,
    pub eps: f64,
    /// `ε + |cover|/γ`.
    pub bound: f64,
}

/// Greedy `ε`-cover in index order.
pub fn greedy_cover(dist: &[Vec<f64>], eps: f64) -> Vec<usize> {
    let mut cover: Vec<usize> = Vec::new();
    for i in 0..dist.len() {
        if !cover.iter().any(|&c| dist[i][c] <= eps) {
            cover.push(i);
        }
    }
    cover
}

/// IGW restricted to a greedy cover at scale `ε = γ^{−1/(d+1)}`.
pub fn lipschitz_dec_strategy(fhat: &[f64], dist: &[Vec<f64>], dim: f64, gamma: f64) -> Result<LipschitzDecStrategy, Error> {
    let n = fhat.len();
    if n == 0 || dist.len() != n || dist.iter().any(|r| r.len() != n) || !(gamma > 0.0) {
        return Err(Error::InvalidInput("metric must be square and match f̂"));
    }
    let eps = math::powf(gamma, -1.0 / (dim + 1.0));
    let cover = greedy_cover(dist, eps);
    let vals: Vec<f64> = cover.iter().map(|&c| fhat[c]).collect();
    let sub = igw(&vals, gamma).p;
    let mut p = vec![0.0; n];
    for (k, &c) in cover.iter().enumerate() {
        p[c] = sub[k];
    }
    let bound = eps + cover.len() as f64 / gamma;
    Ok(LipschitzDecStrategy { p: FiniteDist::new(p)?, cover, eps, bound })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheatingStrategy {
    pub p: FiniteDist,
    pub eps: f64,
    /// `2 log₂A / γ` exceeded 1 and was clipped.
    pub clipped: bool,
}

/// `(1−ε)·π_f̂ + ε·unif(cheat arms)` with `ε = 2 log₂A / γ`.
pub fn cheating_dec_strategy(code: &CheatingCode, fhat_model: usize, gamma: f64) -> Result<CheatingStrategy, Error> {
    if fhat_model >= code.models.len() || !(gamma > 0.0) {
        return Err(Error::InvalidInput("f̂ must be a class member and γ > 0"));
    }
    let raw = 2.0 * code.bits as f64 / gamma;
    let eps = raw.min(1.0);
    let mut p = vec![0.0; code.decisions()];
    p[code.models[fhat_model].best()] = 1.0 - eps;
    for j in 0..code.bits {
        p[code.arms + j] += eps / code.bits as f64;
    }
    Ok(CheatingStrategy { p: FiniteDist::from_weights(&p)?, eps, clipped: raw > 1.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::cheating_code;

    #[test]
    fn cheating_two_arms() {
        let (c, _) = cheating_code(2).unwrap();
        let s = cheating_dec_strategy(&c, 0, 4.0).unwrap();
        assert_eq!(s.eps, 0.5);
        assert_eq!(s.p.probs(), &[0.5, 0.0, 0.5]);
        assert!(cheating_dec_strategy(&c, 0, 1.0).unwrap().clipped);
    }

    #[test]
    fn orthonormal_flat_is_uniform() {
        let feats = vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![0.0, 0.0, 1.0]];
        let s = linear_dec_strategy(&[0.0; 3], &feats, 5.0).unwrap();
        assert!((s.lambda - 1.0).abs() < 1e-9);
        // Greedy arm gets the extra half, the design itself is uniform.
        for (k, &w) in s.design.weights.probs().iter().enumerate() {
            assert!((w - 1.0 / 3.0).abs() < 1e-4, "{k} {w}");
        }
    }

    #[test]
    fn lipschitz_single_point() {
        let s = lipschitz_dec_strategy(&[0.3], &[vec![0.0]], 1.0, 10.0).unwrap();
        assert_eq!(s.p.probs(), &[1.0]);
    }
}
