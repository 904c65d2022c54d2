//! Dense two-phase primal simplex with Bland's anti-cycling rule.
//!
//! Problem form: optimize `cᵀx` subject to `A_ub x ≤ b_ub`, `A_eq x = b_eq`
//! and `x ≥ lower` (a lower bound of `-inf` makes the variable free).

use alloc::vec;
use alloc::vec::Vec;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpProblem {
    pub sense: Sense,
    pub objective: Vec<f64>,
    pub a_ub: Vec<Vec<f64>>,
    pub b_ub: Vec<f64>,
    pub a_eq: Vec<Vec<f64>>,
    pub b_eq: Vec<f64>,
    pub lower: Vec<f64>,
    pub max_iter: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub value: f64,
    pub x: Vec<f64>,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpError {
    Infeasible,
    Unbounded,
    IterationLimit,
    Malformed(&'static str),
}

impl LpProblem {
    pub fn new(sense: Sense, objective: Vec<f64>) -> Self {
        let n = objective.len();
        LpProblem {
            sense,
            objective,
            a_ub: Vec::new(),
            b_ub: Vec::new(),
            a_eq: Vec::new(),
            b_eq: Vec::new(),
            lower: vec![0.0; n],
            max_iter: 50_000,
        }
    }

    pub fn le(mut self, row: Vec<f64>, b: f64) -> Self {
        self.a_ub.push(row);
        self.b_ub.push(b);
        self
    }

    pub fn ge(self, row: Vec<f64>, b: f64) -> Self {
        self.le(row.into_iter().map(|x| -x).collect(), -b)
    }

    pub fn eq(mut self, row: Vec<f64>, b: f64) -> Self {
        self.a_eq.push(row);
        self.b_eq.push(b);
        self
    }

    pub fn free(mut self, j: usize) -> Self {
        self.lower[j] = f64::NEG_INFINITY;
        self
    }

    fn validate(&self) -> Result<(), LpError> {
        let n = self.objective.len();
        if n == 0 {
            return Err(LpError::Malformed("no variables"));
        }
        if self.lower.len() != n {
            return Err(LpError::Malformed("lower bounds length"));
        }
        if self.a_ub.len() != self.b_ub.len() || self.a_eq.len() != self.b_eq.len() {
            return Err(LpError::Malformed("row/rhs count"));
        }
        if self.a_ub.iter().chain(&self.a_eq).any(|r| r.len() != n) {
            return Err(LpError::Malformed("row length"));
        }
        let finite = |v: &[f64]| v.iter().all(|x| x.is_finite());
        if !finite(&self.objective)
            || !finite(&self.b_ub)
            || !finite(&self.b_eq)
            || self.a_ub.iter().chain(&self.a_eq).any(|r| !finite(r))
            || self.lower.iter().any(|l| l.is_nan() || *l == f64::INFINITY)
        {
            return Err(LpError::Malformed("non-finite entry"));
        }
        Ok(())
    }

    /// Largest violation of the constraints at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let dot = |r: &[f64]| r.iter().zip(x).map(|(a, b)| a * b).sum::<f64>();
        let mut v: f64 = 0.0;
        for (r, b) in self.a_ub.iter().zip(&self.b_ub) {
            v = v.max(dot(r) - b);
        }
        for (r, b) in self.a_eq.iter().zip(&self.b_eq) {
            v = v.max((dot(r) - b).abs());
        }
        for (xi, l) in x.iter().zip(&self.lower) {
            v = v.max(l - xi);
        }
        v
    }
}

const PIV: f64 = 1e-9;
const RC: f64 = 1e-10;

struct Tableau {
    m: usize,
    ncols: usize,
    t: Vec<f64>, // m rows × (ncols + 1), rhs last
    basis: Vec<usize>,
    iterations: usize,
    max_iter: usize,
}

impl Tableau {
    #[inline]
    fn at(&self, r: usize, c: usize) -> f64 {
        self.t[r * (self.ncols + 1) + c]
    }

    fn rhs(&self, r: usize) -> f64 {
        self.at(r, self.ncols)
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.ncols + 1;
        let p = self.at(r, c);
        for k in 0..w {
            self.t[r * w + k] /= p;
        }
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.t[i * w + c];
            if f == 0.0 {
                continue;
            }
            for k in 0..w {
                self.t[i * w + k] -= f * self.t[r * w + k];
            }
            self.t[i * w + c] = 0.0;
        }
        self.basis[r] = c;
    }

    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut rc = cost.to_vec();
        for r in 0..self.m {
            let cb = cost[self.basis[r]];
            if cb == 0.0 {
                continue;
            }
            for j in 0..self.ncols {
                rc[j] -= cb * self.at(r, j);
            }
        }
        rc
    }

    /// Minimize `cost` over the current feasible basis; columns with
    /// `allowed[j] == false` never enter.
    fn run(&mut self, cost: &[f64], allowed: &[bool]) -> Result<(), LpError> {
        loop {
            if self.iterations >= self.max_iter {
                return Err(LpError::IterationLimit);
            }
            let rc = self.reduced_costs(cost);
            let Some(enter) = (0..self.ncols).find(|&j| allowed[j] && rc[j] < -RC) else {
                return Ok(());
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.m {
                let a = self.at(r, enter);
                if a > PIV {
                    let ratio = self.rhs(r) / a;
                    leave = match leave {
                        None => Some((r, ratio)),
                        Some((lr, lratio)) => {
                            if ratio < lratio - 1e-12 || (ratio <= lratio + 1e-12 && self.basis[r] < self.basis[lr]) {
                                Some((r, ratio))
                            } else {
                                Some((lr, lratio))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = leave else {
                return Err(LpError::Unbounded);
            };
            self.pivot(r, enter);
            self.iterations += 1;
        }
    }
}

pub fn solve_lp(p: &LpProblem) -> Result<LpSolution, LpError> {
    p.validate()?;
    let n = p.objective.len();
    // Column map: each original variable becomes one column (shifted by its
    // lower bound) or two (free variable split into x⁺ − x⁻).
    let mut cols_of: Vec<(usize, Option<usize>)> = Vec::with_capacity(n);
    let mut nv = 0;
    for j in 0..n {
        if p.lower[j] == f64::NEG_INFINITY {
            cols_of.push((nv, Some(nv + 1)));
            nv += 2;
        } else {
            cols_of.push((nv, None));
            nv += 1;
        }
    }
    let shift = |row: &[f64]| -> f64 {
        row.iter().zip(&p.lower).filter(|(_, l)| l.is_finite()).map(|(a, l)| a * l).sum()
    };
    let expand = |row: &[f64]| -> Vec<f64> {
        let mut out = vec![0.0; nv];
        for j in 0..n {
            let (a, b) = cols_of[j];
            out[a] = row[j];
            if let Some(b) = b {
                out[b] = -row[j];
            }
        }
        out
    };
    let m1 = p.a_ub.len();
    let m = m1 + p.a_eq.len();
    let n_slack = m1;
    // Rows after sign normalization; decide which need an artificial.
    let mut rows: Vec<(Vec<f64>, f64, Option<f64>)> = Vec::with_capacity(m);
    for (r, b) in p.a_ub.iter().zip(&p.b_ub) {
        rows.push((expand(r), b - shift(r), Some(1.0)));
    }
    for (r, b) in p.a_eq.iter().zip(&p.b_eq) {
        rows.push((expand(r), b - shift(r), None));
    }
    let mut need_art = Vec::with_capacity(m);
    for (row, b, slack) in rows.iter_mut() {
        if *b < 0.0 {
            row.iter_mut().for_each(|x| *x = -*x);
            *b = -*b;
            if let Some(s) = slack {
                *s = -1.0;
            }
        }
        need_art.push(!matches!(slack, Some(s) if *s > 0.0));
    }
    let n_art = need_art.iter().filter(|x| **x).count();
    let ncols = nv + n_slack + n_art;
    let w = ncols + 1;
    let mut tab = Tableau {
        m,
        ncols,
        t: vec![0.0; m * w],
        basis: vec![0; m],
        iterations: 0,
        max_iter: p.max_iter,
    };
    let mut art_col = nv + n_slack;
    for (i, (row, b, slack)) in rows.iter().enumerate() {
        tab.t[i * w..i * w + nv].copy_from_slice(row);
        if let Some(s) = slack {
            tab.t[i * w + nv + i] = *s;
        }
        tab.t[i * w + ncols] = *b;
        if need_art[i] {
            tab.t[i * w + art_col] = 1.0;
            tab.basis[i] = art_col;
            art_col += 1;
        } else {
            tab.basis[i] = nv + i;
        }
    }

    let is_art = |j: usize| j >= nv + n_slack;
    if n_art > 0 {
        let cost1: Vec<f64> = (0..ncols).map(|j| if is_art(j) { 1.0 } else { 0.0 }).collect();
        let allowed = vec![true; ncols];
        tab.run(&cost1, &allowed)?;
        let infeas: f64 = (0..m).filter(|&r| is_art(tab.basis[r])).map(|r| tab.rhs(r)).sum();
        let scale = 1.0 + rows.iter().map(|r| r.1.abs()).fold(0.0, f64::max);
        if infeas > 1e-8 * scale {
            return Err(LpError::Infeasible);
        }
        // Drive remaining artificials out of the basis; drop redundant rows.
        let mut r = 0;
        while r < tab.m {
            if is_art(tab.basis[r]) {
                if let Some(c) = (0..nv + n_slack).find(|&c| tab.at(r, c).abs() > PIV) {
                    tab.pivot(r, c);
                    r += 1;
                } else {
                    let start = r * w;
                    tab.t.drain(start..start + w);
                    tab.basis.remove(r);
                    tab.m -= 1;
                }
            } else {
                r += 1;
            }
        }
    }

    let sign = if p.sense == Sense::Maximize { -1.0 } else { 1.0 };
    let mut cost = vec![0.0; ncols];
    for j in 0..n {
        let (a, b) = cols_of[j];
        cost[a] = sign * p.objective[j];
        if let Some(b) = b {
            cost[b] = -sign * p.objective[j];
        }
    }
    let allowed: Vec<bool> = (0..ncols).map(|j| !is_art(j)).collect();
    tab.run(&cost, &allowed)?;

    let mut y = vec![0.0; ncols];
    for r in 0..tab.m {
        y[tab.basis[r]] = tab.rhs(r);
    }
    let x: Vec<f64> = (0..n)
        .map(|j| {
            let (a, b) = cols_of[j];
            match b {
                Some(b) => y[a] - y[b],
                None => y[a] + p.lower[j],
            }
        })
        .collect();
    let value = p.objective.iter().zip(&x).map(|(c, v)| c * v).sum();
    Ok(LpSolution { value, x, iterations: tab.iterations })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_variable() {
        let p = LpProblem::new(Sense::Maximize, vec![1.0]).le(vec![1.0], 1.0);
        let s = solve_lp(&p).unwrap();
        assert!((s.value - 1.0).abs() < 1e-12 && (s.x[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn simplex_vertex() {
        let p = LpProblem::new(Sense::Minimize, vec![3.0, 1.0, 2.0]).eq(vec![1.0; 3], 1.0);
        let s = solve_lp(&p).unwrap();
        assert!((s.value - 1.0).abs() < 1e-12);
        assert!((s.x[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn error_kinds() {
        let inf = LpProblem::new(Sense::Minimize, vec![1.0]).le(vec![1.0], -1.0);
        assert_eq!(solve_lp(&inf), Err(LpError::Infeasible));
        let unb = LpProblem::new(Sense::Maximize, vec![1.0, 0.0]).le(vec![1.0, -1.0], 1.0);
        assert_eq!(solve_lp(&unb), Err(LpError::Unbounded));
        let mut lim = LpProblem::new(Sense::Maximize, vec![1.0, 1.0]).le(vec![1.0, 0.0], 1.0).le(vec![0.0, 1.0], 1.0);
        lim.max_iter = 1;
        assert_eq!(solve_lp(&lim), Err(LpError::IterationLimit));
        let bad = LpProblem::new(Sense::Minimize, vec![1.0]).le(vec![1.0, 2.0], 1.0);
        assert!(matches!(solve_lp(&bad), Err(LpError::Malformed(_))));
    }

    #[test]
    fn free_variable_and_lower_bounds() {
        // min t s.t. t ≥ x − 3, t ≥ 1 − x, x ∈ [2, 5]  →  t = -1 at x = 2.
        let p = LpProblem::new(Sense::Minimize, vec![1.0, 0.0])
            .free(0)
            .ge(vec![1.0, -1.0], -3.0)
            .ge(vec![1.0, 1.0], 1.0)
            .le(vec![0.0, 1.0], 5.0);
        let mut p = p;
        p.lower[1] = 2.0;
        let s = solve_lp(&p).unwrap();
        assert!((s.value + 1.0).abs() < 1e-12, "{:?}", s);
        assert!((s.x[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn redundant_equalities() {
        let p = LpProblem::new(Sense::Maximize, vec![1.0, 2.0])
            .eq(vec![1.0, 1.0], 1.0)
            .eq(vec![2.0, 2.0], 2.0);
        let s = solve_lp(&p).unwrap();
        assert!((s.value - 2.0).abs() < 1e-12);
    }
}
