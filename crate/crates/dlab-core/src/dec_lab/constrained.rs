//! Constrained DEC on a simplex grid:
//! `min_p max { E_p[regret_M] : E_p[D(M, M̂)] ≤ ε² }`, zero when no model is
//! feasible.

use alloc::vec;
use alloc::vec::Vec;

use super::solver::DecProblem;
use crate::error::Error;
use crate::math;

pub const MAX_GRID_DECISIONS: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct ConstrainedDec {
    pub value: f64,
    pub p: Vec<f64>,
    /// Value on the grid with twice the spacing.
    pub coarse_value: f64,
    /// `|value − coarse_value| ≤ 2·resolution`.
    pub refinement_ok: bool,
}

fn visit_grid(a: usize, n: usize, f: &mut impl FnMut(&[f64])) {
    fn rec(k: usize, left: usize, n: usize, cur: &mut Vec<f64>, f: &mut impl FnMut(&[f64])) {
        if k + 1 == cur.len() {
            cur[k] = left as f64 / n as f64;
            f(cur);
            return;
        }
        for i in 0..=left {
            cur[k] = i as f64 / n as f64;
            rec(k + 1, left - i, n, cur, f);
        }
    }
    let mut cur = vec![0.0; a];
    rec(0, n, n, &mut cur, f);
}

fn grid_value(problem: &DecProblem, eps: f64, n: usize) -> (f64, Vec<f64>) {
    let a = problem.regret[0].len();
    let r2 = eps * eps;
    let mut best = (f64::INFINITY, vec![]);
    visit_grid(a, n, &mut |p| {
        let mut worst = 0.0f64;
        for m in 0..problem.models() {
            if math::dot(p, &problem.div[m]) <= r2 {
                worst = worst.max(math::dot(p, &problem.regret[m]));
            }
        }
        if worst < best.0 {
            best = (worst, p.to_vec());
        }
    });
    best
}

pub fn dec_constrained(problem: &DecProblem, eps: f64, resolution: f64) -> Result<ConstrainedDec, Error> {
    let a = problem.regret[0].len();
    if a > MAX_GRID_DECISIONS {
        return Err(Error::InvalidInput("constrained DEC grid mode supports at most 4 decisions"));
    }
    if !(resolution > 0.0 && resolution <= 0.5) || !(eps >= 0.0) {
        return Err(Error::InvalidInput("bad resolution or radius"));
    }
    let n = math::round(1.0 / resolution).max(2.0) as usize;
    let (value, p) = grid_value(problem, eps, n);
    let (coarse_value, _) = grid_value(problem, eps, (n / 2).max(1));
    Ok(ConstrainedDec { value, p, coarse_value, refinement_ok: (value - coarse_value).abs() <= 2.0 * resolution })
}
