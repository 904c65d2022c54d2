use alloc::vec::Vec;

use crate::error::{check_len, Error};
use crate::math;
use crate::numprob::dist::{FiniteDist, RewardDist};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Divergence {
    /// Total variation, in [0, 1].
    TV,
    /// Squared Hellinger distance ∫(√p − √q)², in [0, 2].
    HellingerSq,
    /// Kullback-Leibler divergence KL(p‖q), `+inf` unless p ≪ q.
    KL,
}

pub fn divergence(kind: Divergence, p: &FiniteDist, q: &FiniteDist) -> Result<f64, Error> {
    check_len(p.len(), q.len())?;
    let (p, q) = (p.probs(), q.probs());
    Ok(match kind {
        Divergence::TV => 0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>(),
        Divergence::HellingerSq => p
            .iter()
            .zip(q)
            .map(|(a, b)| {
                let d = math::sqrt(*a) - math::sqrt(*b);
                d * d
            })
            .sum(),
        Divergence::KL => {
            let mut s = 0.0;
            for (&a, &b) in p.iter().zip(q) {
                if a == 0.0 {
                    continue;
                }
                if b == 0.0 {
                    return Ok(f64::INFINITY);
                }
                s += a * math::ln(a / b);
            }
            // Rounding can leave a tiny negative sum when p ≈ q.
            s.max(0.0)
        }
    })
}

/// `1 − exp(−(μ₁−μ₂)²/8)` for unit-variance Gaussians.
///
/// This is the Bhattacharyya-type expression displayed for the Gaussian
/// bandit; it equals half of ∫(√p − √q)². Use [`hellinger_sq_reward`] for
/// the [0, 2] convention shared with [`Divergence::HellingerSq`].
pub fn hellinger_sq_gaussian(mu1: f64, mu2: f64) -> f64 {
    let g = mu1 - mu2;
    -libm::expm1(-g * g / 8.0)
}

/// KL between unit-variance Gaussians.
pub fn kl_gaussian(mu1: f64, mu2: f64) -> f64 {
    0.5 * (mu1 - mu2) * (mu1 - mu2)
}

/// Squared Hellinger distance ∫(√p − √q)² between two reward laws.
pub fn hellinger_sq_reward(a: &RewardDist, b: &RewardDist) -> f64 {
    match (a, b) {
        (RewardDist::Gaussian { mean: m1 }, RewardDist::Gaussian { mean: m2 }) => {
            2.0 * hellinger_sq_gaussian(*m1, *m2)
        }
        _ => hellinger_sq_reward_mixture(a, &[(1.0, *b)]),
    }
}

/// Squared Hellinger distance between `a` and the mixture `Σ w_k b_k`.
///
/// Discrete parts are compared atom by atom; Gaussian parts by trapezoid
/// quadrature, which is spectrally accurate for these integrands.
pub fn hellinger_sq_reward_mixture(a: &RewardDist, mix: &[(f64, RewardDist)]) -> f64 {
    let la = Law::of(&[(1.0, *a)]);
    let lb = Law::of(mix);
    let mut affinity = 0.0;
    for &(v, pa) in &la.atoms {
        for &(u, pb) in &lb.atoms {
            if u == v {
                affinity += math::sqrt(pa * pb);
            }
        }
    }
    if !la.gauss.is_empty() && !lb.gauss.is_empty() {
        affinity += gaussian_affinity(&la.gauss, &lb.gauss);
    }
    (la.mass() + lb.mass() - 2.0 * affinity).max(0.0)
}

struct Law {
    atoms: Vec<(f64, f64)>,
    gauss: Vec<(f64, f64)>,
}

impl Law {
    fn of(mix: &[(f64, RewardDist)]) -> Law {
        let mut atoms: Vec<(f64, f64)> = Vec::new();
        let mut gauss = Vec::new();
        let mut push = |v: f64, w: f64| {
            if w <= 0.0 {
                return;
            }
            match atoms.iter_mut().find(|(u, _)| *u == v) {
                Some(e) => e.1 += w,
                None => atoms.push((v, w)),
            }
        };
        for &(w, d) in mix {
            match d {
                RewardDist::Gaussian { mean } => gauss.push((w, mean)),
                RewardDist::Bernoulli { mean } => {
                    push(1.0, w * mean);
                    push(0.0, w * (1.0 - mean));
                }
                RewardDist::PointMass { value } => push(value, w),
            }
        }
        Law { atoms, gauss }
    }

    fn mass(&self) -> f64 {
        self.atoms.iter().map(|a| a.1).sum::<f64>() + self.gauss.iter().map(|g| g.0).sum::<f64>()
    }
}

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

fn mixture_density(g: &[(f64, f64)], x: f64) -> f64 {
    g.iter().map(|&(w, m)| w * INV_SQRT_2PI * math::exp(-0.5 * (x - m) * (x - m))).sum()
}

/// ∫ √(p q) for two Gaussian mixtures.
fn gaussian_affinity(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    let lo = a.iter().chain(b).map(|g| g.1).fold(f64::INFINITY, f64::min) - 14.0;
    let hi = a.iter().chain(b).map(|g| g.1).fold(f64::NEG_INFINITY, f64::max) + 14.0;
    let h = 0.02;
    let n = math::ceil((hi - lo) / h) as usize;
    let mut s = 0.0;
    for i in 0..=n {
        let x = lo + i as f64 * h;
        s += math::sqrt(mixture_density(a, x) * mixture_density(b, x));
    }
    s * h
}

/// Check KL ≤ (2 + log V)·Hel² for a discrete pair with density ratio
/// bounded by V = max p/q. Returns `(kl, bound)`; the bound is `+inf` when
/// the ratio is unbounded.
pub fn kl_hellinger_bound(p: &FiniteDist, q: &FiniteDist) -> Result<(f64, f64), Error> {
    let kl = divergence(Divergence::KL, p, q)?;
    let h = divergence(Divergence::HellingerSq, p, q)?;
    let mut v: f64 = 1.0;
    for (&a, &b) in p.probs().iter().zip(q.probs()) {
        if a > 0.0 {
            v = if b == 0.0 { f64::INFINITY } else { v.max(a / b) };
        }
    }
    Ok((kl, (2.0 + math::ln(v)) * h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn d(v: &[f64]) -> FiniteDist {
        FiniteDist::new(v.to_vec()).unwrap()
    }

    #[test]
    fn fixed_examples() {
        let u = d(&[0.5, 0.5]);
        for k in [Divergence::TV, Divergence::HellingerSq, Divergence::KL] {
            assert_eq!(divergence(k, &u, &u).unwrap(), 0.0);
        }
        let (p, q) = (d(&[1.0, 0.0]), d(&[0.0, 1.0]));
        assert_eq!(divergence(Divergence::TV, &p, &q).unwrap(), 1.0);
        assert_eq!(divergence(Divergence::HellingerSq, &p, &q).unwrap(), 2.0);
        assert_eq!(divergence(Divergence::KL, &p, &q).unwrap(), f64::INFINITY);
        assert!(divergence(Divergence::TV, &p, &d(&[1.0])).is_err());
    }

    #[test]
    fn half_quarter_pair() {
        // Hand values: Hel² = (√.5−√.25)² + (√.5−√.75)²,
        // KL = .5 ln 2 + .5 ln(2/3).
        let (p, q) = (d(&[0.5, 0.5]), d(&[0.25, 0.75]));
        let tv = divergence(Divergence::TV, &p, &q).unwrap();
        let h = divergence(Divergence::HellingerSq, &p, &q).unwrap();
        let kl = divergence(Divergence::KL, &p, &q).unwrap();
        assert!((tv - 0.25).abs() < 1e-15);
        assert!((h - 0.068_148_347_421_863_42).abs() < 1e-12, "{h}");
        assert!((kl - 0.143_841_036_225_890_42).abs() < 1e-12, "{kl}");
        assert!(tv * tv <= h && h <= kl);
    }

    #[test]
    fn gaussian_closed_form() {
        assert_eq!(hellinger_sq_gaussian(0.5, 0.5), 0.0);
        assert!((hellinger_sq_gaussian(0.5, 1.5) - 0.117_503_097_415_404_6).abs() < 1e-12);
        let mut prev = 0.0;
        for i in 1..100 {
            let v = hellinger_sq_gaussian(0.0, i as f64 * 0.25);
            assert!(v >= prev && v <= 1.0);
            prev = v;
        }
        assert!(1.0 - prev < 1e-12);
    }

    #[test]
    fn reward_laws() {
        let g = |m| RewardDist::gaussian(m);
        // Quadrature path against the closed form.
        let q = hellinger_sq_reward_mixture(&g(0.2), &[(0.5, g(1.0)), (0.5, g(1.0))]);
        assert!((q - 2.0 * hellinger_sq_gaussian(0.2, 1.0)).abs() < 1e-12, "{q}");
        let b = |m| RewardDist::bernoulli(m).unwrap();
        let expect = divergence(Divergence::HellingerSq, &d(&[0.3, 0.7]), &d(&[0.5, 0.5])).unwrap();
        assert!((hellinger_sq_reward(&b(0.7), &b(0.5)) - expect).abs() < 1e-15);
        assert!((hellinger_sq_reward_mixture(&b(0.7), &[(0.5, b(0.9)), (0.5, b(0.1))]) - expect).abs() < 1e-15);
        assert_eq!(hellinger_sq_reward(&g(0.0), &b(0.5)), 2.0);
        assert_eq!(hellinger_sq_reward(&RewardDist::point(1.0), &RewardDist::point(0.0)), 2.0);
        assert_eq!(hellinger_sq_reward(&RewardDist::point(1.0), &b(1.0)), 0.0);
        let _ = vec![0];
    }

    #[test]
    fn bounded_ratio_lemma() {
        let (p, q) = (d(&[0.6, 0.3, 0.1]), d(&[0.2, 0.4, 0.4]));
        let (kl, bound) = kl_hellinger_bound(&p, &q).unwrap();
        assert!(kl <= bound);
    }
}
