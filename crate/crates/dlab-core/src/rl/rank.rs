//! Bellman residual matrices and their numeric rank.

use alloc::vec::Vec;

use super::bilin::QFunction;
use super::planning::bellman_backup;
use crate::envs::{Policy, TabularMDP};
use crate::numprob::linalg::{singular_values, Mat};

pub const RANK_THRESHOLD: f64 = 1e-8;

/// `E_h(π, Q) = Σ_{s,a} d^π_h(s,a)·(Q_h − T_h Q_{h+1})(s,a)`.
pub fn bellman_residual(mdp: &TabularMDP, occ: &[Vec<f64>], q: &QFunction, h: usize) -> f64 {
    let tq = bellman_backup(mdp, &q.q[h + 1], h);
    occ[h].iter().zip(&q.q[h]).zip(&tq).map(|((d, x), y)| d * (x - y)).sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct BellmanFactorization {
    /// `matrices[h]` is policies × Q-functions.
    pub matrices: Vec<Mat>,
    pub singular_values: Vec<Vec<f64>>,
    pub ranks: Vec<usize>,
}

impl BellmanFactorization {
    pub fn rank(&self) -> usize {
        self.ranks.iter().copied().max().unwrap_or(0)
    }
}

pub fn bellman_rank(mdp: &TabularMDP, class: &[QFunction], policies: &[Policy]) -> BellmanFactorization {
    let occs: Vec<Vec<Vec<f64>>> = policies.iter().map(|pi| mdp.occupancy(pi)).collect();
    let mut matrices = Vec::with_capacity(mdp.h);
    let mut svs = Vec::with_capacity(mdp.h);
    let mut ranks = Vec::with_capacity(mdp.h);
    for h in 0..mdp.h {
        let mut m = Mat::zeros(policies.len(), class.len());
        for (i, occ) in occs.iter().enumerate() {
            for (j, q) in class.iter().enumerate() {
                m[(i, j)] = bellman_residual(mdp, occ, q, h);
            }
        }
        let sv = if m.rows == 0 || m.cols == 0 { Vec::new() } else { singular_values(&m) };
        ranks.push(sv.iter().filter(|&&s| s > RANK_THRESHOLD).count());
        svs.push(sv);
        matrices.push(m);
    }
    BellmanFactorization { matrices, singular_values: svs, ranks }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::random_tabular;
    use crate::numprob::rng::Stream;
    use crate::rl::value_iteration;

    #[test]
    fn qstar_column_is_zero() {
        let mut rng = Stream::from_seed(6);
        let m = random_tabular(3, 2, 3, &mut rng);
        let (star, _) = value_iteration(&m);
        let pols: Vec<Policy> = (0..5).map(|_| Policy::random_stochastic(3, 3, 2, &mut rng)).collect();
        let f = bellman_rank(&m, &[QFunction { q: star.q }], &pols);
        assert!(f.matrices.iter().all(|mm| mm.data.iter().all(|x| x.abs() < 1e-12)));
        assert_eq!(f.rank(), 0);
    }
}
