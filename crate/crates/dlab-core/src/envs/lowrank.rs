use alloc::vec::Vec;

use crate::error::Error;
use crate::math;
use crate::numprob::dist::FiniteDist;
use crate::numprob::rng::Stream;

use super::tabular::TabularMDP;

/// `P_h(s'|s,a) = ⟨φ(s,a), μ_h(s')⟩`, `r_h(s,a) = ⟨φ(s,a), w_h⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct LowRankMDP {
    pub s: usize,
    pub a: usize,
    pub h: usize,
    pub d: usize,
    /// `phi[s·A + a]`.
    pub phi: Vec<Vec<f64>>,
    /// `mu[h][k]` is a distribution over next states.
    pub mu: Vec<Vec<Vec<f64>>>,
    pub w: Vec<Vec<f64>>,
    pub d1: FiniteDist,
    tabular: TabularMDP,
}

impl LowRankMDP {
    pub fn new(
        s: usize,
        a: usize,
        h: usize,
        phi: Vec<Vec<f64>>,
        mu: Vec<Vec<Vec<f64>>>,
        w: Vec<Vec<f64>>,
        d1: FiniteDist,
    ) -> Result<Self, Error> {
        let d = phi.first().map_or(0, |f| f.len());
        if phi.len() != s * a || phi.iter().any(|f| f.len() != d) {
            return Err(Error::InvalidInput("feature table must be (S·A) × d"));
        }
        if phi.iter().any(|f| math::norm(f) > 1.0 + 1e-12) {
            return Err(Error::InvalidInput("features need ‖φ‖ ≤ 1"));
        }
        if mu.len() != h || w.len() != h || mu.iter().any(|m| m.len() != d || m.iter().any(|v| v.len() != s)) {
            return Err(Error::InvalidInput("latent tables must be H × d × S"));
        }
        if w.iter().any(|v| v.len() != d || math::norm(v) > math::sqrt(d as f64) + 1e-12) {
            return Err(Error::InvalidInput("reward vectors need ‖w_h‖ ≤ √d"));
        }
        let mut p = Vec::with_capacity(h * s * a * s);
        let mut r = Vec::with_capacity(h * s * a);
        for layer in 0..h {
            for f in &phi {
                for sp in 0..s {
                    p.push((0..d).map(|k| f[k] * mu[layer][k][sp]).sum());
                }
                r.push(math::dot(f, &w[layer]));
            }
        }
        // Reorder p, r from (layer, s·A+a) which already matches TabularMDP
        // layout since phi is indexed s·A + a.
        let tabular = TabularMDP::new(s, a, h, p, r, d1.clone())?;
        Ok(LowRankMDP { s, a, h, d, phi, mu, w, d1, tabular })
    }

    pub fn feature(&self, s: usize, a: usize) -> &[f64] {
        &self.phi[s * self.a + a]
    }

    pub fn tabular(&self) -> &TabularMDP {
        &self.tabular
    }
}

fn simplex_point(n: usize, rng: &mut Stream, sparsity: f64) -> Vec<f64> {
    loop {
        let w: Vec<f64> = (0..n)
            .map(|_| if rng.uniform() < sparsity { 0.0 } else { -math::ln(1.0 - rng.uniform()) })
            .collect();
        let z: f64 = w.iter().sum();
        if z > 0.0 {
            return w.iter().map(|x| x / z).collect();
        }
    }
}

/// Features on the simplex and `μ_h(·)_k` as distributions, so every
/// transition row is valid by construction. Rewards lie in `[0, 1/H]`.
pub fn random_low_rank(s: usize, a: usize, h: usize, d: usize, rng: &mut Stream) -> LowRankMDP {
    let phi: Vec<Vec<f64>> = (0..s * a).map(|_| simplex_point(d, rng, 0.3)).collect();
    let mu: Vec<Vec<Vec<f64>>> = (0..h).map(|_| (0..d).map(|_| simplex_point(s, rng, 0.5)).collect()).collect();
    let w: Vec<Vec<f64>> = (0..h).map(|_| (0..d).map(|_| rng.uniform() / h as f64).collect()).collect();
    let d1 = FiniteDist::from_weights(&(0..s).map(|_| rng.uniform() + 0.05).collect::<Vec<_>>()).expect("positive");
    LowRankMDP::new(s, a, h, phi, mu, w, d1).expect("generator produces valid instances")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numprob::linalg::{numeric_rank, Mat};

    #[test]
    fn transition_rank_at_most_d() {
        let mut rng = Stream::from_seed(3);
        for d in 1..=3 {
            let m = random_low_rank(6, 2, 3, d, &mut rng);
            let t = m.tabular();
            for h in 0..3 {
                let rows: Vec<Vec<f64>> = (0..12).map(|i| t.p[(h * 12 + i) * 6..(h * 12 + i + 1) * 6].to_vec()).collect();
                assert!(numeric_rank(&Mat::from_rows(&rows), 1e-8) <= d);
            }
        }
    }
}
