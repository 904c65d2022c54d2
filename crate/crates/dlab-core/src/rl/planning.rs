//! Exact planning on tabular MDPs and the value-decomposition identities.

use alloc::vec;
use alloc::vec::Vec;

use crate::envs::{Policy, TabularMDP};
use crate::math;

/// Per-layer `Q_h[s·A + a]` and `V_h[s]`; layer `H` is the zero layer.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueFunctions {
    pub q: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
}

impl ValueFunctions {
    /// Derive `V_h(s) = max_a Q_h(s,a)` from a Q table with `H + 1` layers.
    pub fn from_q(q: Vec<Vec<f64>>, a: usize) -> Self {
        let v = q.iter().map(|layer| layer.chunks(a).map(math::max).collect()).collect();
        ValueFunctions { q, v }
    }
}

fn max_next(mdp: &TabularMDP, q_next: &[f64]) -> Vec<f64> {
    q_next.chunks(mdp.a).map(math::max).collect()
}

/// `[T_h Q](s,a) = r_h(s,a) + E_{s'}[max_{a'} Q(s',a')]`.
pub fn bellman_backup(mdp: &TabularMDP, q_next: &[f64], h: usize) -> Vec<f64> {
    let v = max_next(mdp, q_next);
    let mut out = vec![0.0; mdp.s * mdp.a];
    for s in 0..mdp.s {
        for a in 0..mdp.a {
            out[s * mdp.a + a] = mdp.reward(h, s, a) + math::dot(mdp.row(h, s, a), &v);
        }
    }
    out
}

/// Greedy deterministic policy of a Q table; ties go to the lowest action.
pub fn greedy_policy(q: &[Vec<f64>], s: usize, a: usize, h: usize) -> Policy {
    let table: Vec<Vec<usize>> = (0..h).map(|l| (0..s).map(|st| math::argmax(&q[l][st * a..(st + 1) * a])).collect()).collect();
    Policy::deterministic(&table, a)
}

/// Backward induction for `Q*`, `V*` and the greedy optimal policy.
pub fn value_iteration(mdp: &TabularMDP) -> (ValueFunctions, Policy) {
    let mut q = vec![vec![0.0; mdp.s * mdp.a]; mdp.h + 1];
    for h in (0..mdp.h).rev() {
        q[h] = bellman_backup(mdp, &q[h + 1], h);
    }
    let pi = greedy_policy(&q, mdp.s, mdp.a, mdp.h);
    (ValueFunctions::from_q(q, mdp.a), pi)
}

/// `E_{s∼d1}[V(s)]`.
pub fn initial_value(mdp: &TabularMDP, v1: &[f64]) -> f64 {
    math::dot(mdp.d1.probs(), v1)
}

/// Both sides of each identity, evaluated exactly.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityReport {
    /// `f(π') − f(π)` against `Σ_h E^π[V^{π'}_h(s) − Q^{π'}_h(s,a)]`.
    pub perf_diff: (f64, f64),
    /// `f^M(π) − f^{M̂}(π)` against the `M̂`-expected Bellman residuals of `Q^{M,π}`.
    pub bellman_residual: (f64, f64),
    /// `E[max_a Q_1] − f^M(π_Q)` against `Σ_h E^{M,π_Q}[Q_h − T_h Q_{h+1}]`.
    pub greedy_residual: (f64, f64),
    /// `f^M(π) − f^{M̂}(π)` against transition plus reward error terms.
    pub simulation: (f64, f64),
    /// `Σ_h E^{M̂,π}[TV(P_h, P̂_h) + |r_h − r̂_h|]`, an upper bound on `|f^M − f^{M̂}|`.
    pub simulation_bound: f64,
}

impl IdentityReport {
    pub fn max_discrepancy(&self) -> f64 {
        [self.perf_diff, self.bellman_residual, self.greedy_residual, self.simulation]
            .iter()
            .map(|(l, r)| (l - r).abs())
            .fold(0.0, f64::max)
    }
}

fn expect_occ(occ: &[Vec<f64>], h: usize, g: impl Fn(usize) -> f64) -> f64 {
    occ[h].iter().enumerate().map(|(i, m)| if *m == 0.0 { 0.0 } else { m * g(i) }).sum()
}

/// Evaluate the performance-difference, Bellman-residual and simulation
/// identities for `(M, M̂, π, π', Q)`. `q` has `H + 1` layers with a zero last
/// layer. `M` and `M̂` must share `d1`.
pub fn identity_checks(m: &TabularMDP, mhat: &TabularMDP, pi: &Policy, pi2: &Policy, q: &[Vec<f64>]) -> IdentityReport {
    let (ns, na, hh) = (m.s, m.a, m.h);
    // Performance difference under M.
    let (q2, v2) = m.evaluate(pi2);
    let occ_pi = m.occupancy(pi);
    let lhs = m.policy_value(pi2) - m.policy_value(pi);
    let rhs: f64 = (0..hh).map(|h| expect_occ(&occ_pi, h, |i| v2[h][i / na] - q2[h][i])).sum();
    let perf_diff = (lhs, rhs);

    // Bellman residual of Q^{M,π} along M̂'s trajectories.
    let (qm, vm) = m.evaluate(pi);
    let occ_hat = mhat.occupancy(pi);
    let lhs = m.policy_value(pi) - mhat.policy_value(pi);
    let rhs: f64 = (0..hh)
        .map(|h| {
            expect_occ(&occ_hat, h, |i| {
                let (s, a) = (i / na, i % na);
                qm[h][i] - mhat.reward(h, s, a) - math::dot(mhat.row(h, s, a), &vm[h + 1])
            })
        })
        .sum();
    let bellman_residual = (lhs, rhs);

    // Greedy policy of an arbitrary Q.
    let pq = greedy_policy(q, ns, na, hh);
    let v1: Vec<f64> = q[0].chunks(na).map(math::max).collect();
    let lhs = initial_value(m, &v1) - m.policy_value(&pq);
    let occ_q = m.occupancy(&pq);
    let rhs: f64 = (0..hh)
        .map(|h| {
            let tq = bellman_backup(m, &q[h + 1], h);
            expect_occ(&occ_q, h, |i| q[h][i] - tq[i])
        })
        .sum();
    let greedy_residual = (lhs, rhs);

    // Simulation lemma.
    let lhs = m.policy_value(pi) - mhat.policy_value(pi);
    let mut rhs = 0.0;
    let mut bound = 0.0;
    for h in 0..hh {
        rhs += expect_occ(&occ_hat, h, |i| {
            let (s, a) = (i / na, i % na);
            let dp: f64 = m.row(h, s, a).iter().zip(mhat.row(h, s, a)).zip(&vm[h + 1]).map(|((p, ph), v)| (p - ph) * v).sum();
            dp + m.reward(h, s, a) - mhat.reward(h, s, a)
        });
        bound += expect_occ(&occ_hat, h, |i| {
            let (s, a) = (i / na, i % na);
            let tv: f64 = 0.5 * m.row(h, s, a).iter().zip(mhat.row(h, s, a)).map(|(p, q)| (p - q).abs()).sum::<f64>();
            tv + (m.reward(h, s, a) - mhat.reward(h, s, a)).abs()
        });
    }
    IdentityReport { perf_diff, bellman_residual, greedy_residual, simulation: (lhs, rhs), simulation_bound: bound }
}

/// `Σ_h E^{π}[(Q_h − T_h Q_{h+1})(s_h, a_h)]` under `mdp`.
pub fn on_policy_residual(mdp: &TabularMDP, pi: &Policy, q: &[Vec<f64>]) -> f64 {
    let occ = mdp.occupancy(pi);
    (0..mdp.h)
        .map(|h| {
            let tq = bellman_backup(mdp, &q[h + 1], h);
            expect_occ(&occ, h, |i| q[h][i] - tq[i])
        })
        .sum()
}
