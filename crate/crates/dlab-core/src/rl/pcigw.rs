//! Policy-cover inverse gap weighting for tabular MDPs.

use alloc::vec;
use alloc::vec::Vec;

use super::planning::{initial_value, value_iteration};
use crate::envs::{Policy, TabularMDP};
use crate::error::Error;
use crate::math;
use crate::numprob::dist::FiniteDist;
use crate::numprob::lp::{solve_lp, LpError, LpProblem, Sense};

#[derive(Debug, Clone, PartialEq)]
pub struct PcIgw {
    /// Cover policies in `(h, s, a)` order, then the greedy policy last.
    pub policies: Vec<Policy>,
    pub p: FiniteDist,
    pub lambda: f64,
    pub eta: f64,
    /// `f̂(π̂) − f̂(π)` per policy.
    pub gaps: Vec<f64>,
}

fn lp_err(e: LpError) -> Error {
    match e {
        LpError::Infeasible => Error::Internal("cover LP reported infeasible"),
        LpError::Unbounded => Error::Internal("cover LP reported unbounded"),
        LpError::IterationLimit => Error::Internal("cover LP hit its iteration limit"),
        LpError::Malformed(m) => Error::Internal(m),
    }
}

/// `d^π_h(s,a) / (2HSA + η·(f̂(π̂) − f̂(π)))` on `mhat`.
pub fn cover_objective(mhat: &TabularMDP, eta: f64, pi: &Policy, h: usize, s: usize, a: usize) -> f64 {
    let (star, _) = value_iteration(mhat);
    let fstar = initial_value(mhat, &star.v[0]);
    let occ = mhat.occupancy(pi);
    let n = (mhat.h * mhat.s * mhat.a) as f64;
    occ[h][s * mhat.a + a] / (2.0 * n + eta * (fstar - mhat.policy_value(pi)))
}

/// Maximizer of [`cover_objective`] over all policies, via the
/// Charnes-Cooper transform of the ratio program on the occupancy polytope.
pub fn cover_policy(mhat: &TabularMDP, eta: f64, fstar: f64, h: usize, s: usize, a: usize) -> Result<Policy, Error> {
    let (ns, na, hh) = (mhat.s, mhat.a, mhat.h);
    let nsa = ns * na;
    let nv = hh * nsa + 1;
    let tv = nv - 1;
    let var = |l: usize, st: usize, ac: usize| l * nsa + st * na + ac;
    let mut obj = vec![0.0; nv];
    obj[var(h, s, a)] = 1.0;
    let mut lp = LpProblem::new(Sense::Maximize, obj);
    let mut norm = vec![0.0; nv];
    norm[tv] = 2.0 * (hh * nsa) as f64 + eta * fstar;
    for l in 0..hh {
        for st in 0..ns {
            for ac in 0..na {
                norm[var(l, st, ac)] = -eta * mhat.reward(l, st, ac);
            }
        }
    }
    lp = lp.eq(norm, 1.0);
    for st in 0..ns {
        let mut row = vec![0.0; nv];
        for ac in 0..na {
            row[var(0, st, ac)] = 1.0;
        }
        row[tv] = -mhat.d1.probs()[st];
        lp = lp.eq(row, 0.0);
    }
    for l in 0..hh.saturating_sub(1) {
        for sp in 0..ns {
            let mut row = vec![0.0; nv];
            for ac in 0..na {
                row[var(l + 1, sp, ac)] = 1.0;
            }
            for st in 0..ns {
                for ac in 0..na {
                    row[var(l, st, ac)] -= mhat.row(l, st, ac)[sp];
                }
            }
            lp = lp.eq(row, 0.0);
        }
    }
    let sol = solve_lp(&lp).map_err(lp_err)?;
    let probs = (0..hh)
        .map(|l| {
            (0..ns)
                .map(|st| {
                    let y: Vec<f64> = (0..na).map(|ac| sol.x[var(l, st, ac)].max(0.0)).collect();
                    let z: f64 = y.iter().sum();
                    if z > 0.0 {
                        y.iter().map(|v| v / z).collect()
                    } else {
                        let mut row = vec![0.0; na];
                        row[0] = 1.0;
                        row
                    }
                })
                .collect()
        })
        .collect();
    Ok(Policy { probs })
}

/// IGW weights `1/(λ + η·gap)` over the cover plus the greedy policy, with
/// `η = γ/(21H²)` and `λ` found by bisection on `[1, HSA+1]`.
pub fn pcigw_distribution(mhat: &TabularMDP, gamma: f64) -> Result<PcIgw, Error> {
    if !(gamma > 0.0) {
        return Err(Error::InvalidInput("γ must be positive"));
    }
    let (ns, na, hh) = (mhat.s, mhat.a, mhat.h);
    let eta = gamma / (21.0 * (hh * hh) as f64);
    let (star, greedy) = value_iteration(mhat);
    let fstar = initial_value(mhat, &star.v[0]);
    let mut policies = Vec::with_capacity(hh * ns * na + 1);
    for h in 0..hh {
        for s in 0..ns {
            for a in 0..na {
                policies.push(cover_policy(mhat, eta, fstar, h, s, a)?);
            }
        }
    }
    policies.push(greedy);
    let gaps: Vec<f64> = policies.iter().map(|pi| (fstar - mhat.policy_value(pi)).max(0.0)).collect();
    let mass = |lam: f64| gaps.iter().map(|g| 1.0 / (lam + eta * g)).sum::<f64>();
    let n = policies.len() as f64;
    let lambda = if gaps.iter().all(|&g| g == 0.0) {
        n
    } else {
        let (mut lo, mut hi) = (1.0, n);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mass(mid) > 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    };
    let w: Vec<f64> = gaps.iter().map(|g| 1.0 / (lambda + eta * g)).collect();
    Ok(PcIgw { policies, p: FiniteDist::from_weights(&w)?, lambda, eta, gaps })
}

/// Squared Hellinger distance ([0, 2] convention) between the laws of
/// `(s_h, a_h, r_h)_{h<H}` under `pi` in `m` and `mhat`, by path enumeration.
/// Paths whose rewards differ are disjoint outcomes.
pub fn trajectory_hellinger_sq(m: &TabularMDP, mhat: &TabularMDP, pi: &Policy) -> f64 {
    fn rec(m: &TabularMDP, mh: &TabularMDP, pi: &Policy, h: usize, s: usize, pm: f64, pq: f64) -> f64 {
        if h == m.h {
            let d = math::sqrt(pm) - math::sqrt(pq);
            return d * d;
        }
        let mut total = 0.0;
        for a in 0..m.a {
            let w = pi.probs[h][s][a];
            if w == 0.0 {
                continue;
            }
            let (am, aq) = (pm * w, pq * w);
            if m.reward(h, s, a) != mh.reward(h, s, a) {
                total += am + aq;
                continue;
            }
            if h + 1 == m.h {
                let d = math::sqrt(am) - math::sqrt(aq);
                total += d * d;
                continue;
            }
            for (sp, (x, y)) in m.row(h, s, a).iter().zip(mh.row(h, s, a)).enumerate() {
                let (bm, bq) = (am * x, aq * y);
                if bm == 0.0 && bq == 0.0 {
                    continue;
                }
                total += rec(m, mh, pi, h + 1, sp, bm, bq);
            }
        }
        total
    }
    let mut total = 0.0;
    for (s, (x, y)) in m.d1.probs().iter().zip(mhat.d1.probs()).enumerate() {
        if *x == 0.0 && *y == 0.0 {
            continue;
        }
        total += rec(m, mhat, pi, 0, s, *x, *y);
    }
    total
}

/// `max_M E_{π∼p}[f^M(π_M) − f^M(π) − γ·Hel²(M(π), M̂(π))]` over `models`.
pub fn pcigw_payoff_audit(dist: &PcIgw, mhat: &TabularMDP, models: &[TabularMDP], gamma: f64) -> f64 {
    let mut worst = f64::NEG_INFINITY;
    for m in models {
        let (star, _) = value_iteration(m);
        let fstar = initial_value(m, &star.v[0]);
        let payoff: f64 = dist
            .policies
            .iter()
            .zip(dist.p.probs())
            .map(|(pi, w)| w * (fstar - m.policy_value(pi) - gamma * trajectory_hellinger_sq(m, mhat, pi)))
            .sum();
        worst = worst.max(payoff);
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numprob::rng::Stream;

    fn flat(s: usize, a: usize, h: usize) -> TabularMDP {
        let p = vec![1.0 / s as f64; h * s * a * s];
        TabularMDP::new(s, a, h, p, vec![0.0; h * s * a], FiniteDist::uniform(s)).unwrap()
    }

    #[test]
    fn equal_gaps_uniform() {
        let m = flat(2, 2, 2);
        let d = pcigw_distribution(&m, 10.0).unwrap();
        assert_eq!(d.policies.len(), 9);
        assert_eq!(d.lambda, 9.0);
        assert!(d.p.probs().iter().all(|&x| (x - 1.0 / 9.0).abs() < 1e-15));
    }

    #[test]
    fn hellinger_self_zero() {
        let m = crate::envs::random_tabular(3, 2, 3, &mut Stream::from_seed(4));
        let pi = Policy::uniform(3, 3, 2);
        assert!(trajectory_hellinger_sq(&m, &m, &pi).abs() < 1e-15);
    }

    #[test]
    fn hellinger_disjoint_rewards_is_two() {
        let m = flat(2, 2, 1);
        let mut other = m.clone();
        other.r.iter_mut().for_each(|r| *r = 0.5);
        let pi = Policy::uniform(1, 2, 2);
        assert!((trajectory_hellinger_sq(&m, &other, &pi) - 2.0).abs() < 1e-15);
    }
}
