//! Offset DEC: `min_p max_M E_{π∼p}[f^M(π_M) − f^M(π) − γ·D(M(π), M̂(π))]`.
//!
//! The payoff of every model is linear in `p`, so the game is solved as a
//! linear program over the models generated so far (all of them for finite
//! classes, best responses added one at a time for implicit classes).

use alloc::vec;
use alloc::vec::Vec;

use crate::envs::BanditModel;
use crate::error::Error;
use crate::math;
use crate::numprob::divergence::hellinger_sq_reward;
use crate::numprob::dist::FiniteDist;
use crate::numprob::lp::{solve_lp, LpError, LpProblem, Sense};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecDivergence {
    /// Squared Hellinger between reward laws, `∫(√p−√q)²` in `[0, 2]`.
    HellingerSq,
    /// `(f^M(π) − f̂(π))²` for structured bandits.
    SquaredMeanGap,
}

/// Something the max player can best-respond with.
pub trait ModelOracle {
    fn decisions(&self) -> usize;
    /// Payoff rows known up front.
    fn initial_rows(&self) -> Vec<Vec<f64>>;
    /// Payoff vector of a model maximizing `⟨p, g_M⟩`.
    fn best_response(&self, p: &[f64]) -> Vec<f64>;
    /// `max_M ⟨p, g_M⟩`.
    fn upper_value(&self, p: &[f64]) -> f64 {
        math::dot(p, &self.best_response(p))
    }
}

/// Finite model list with precomputed regret and divergence tables.
#[derive(Debug, Clone, PartialEq)]
pub struct DecProblem {
    pub gamma: f64,
    /// `regret[M][π] = f^M(π_M) − f^M(π)`.
    pub regret: Vec<Vec<f64>>,
    /// `div[M][π] = D(M(π), M̂(π))`.
    pub div: Vec<Vec<f64>>,
}

impl DecProblem {
    pub fn new(models: &[BanditModel], reference: &BanditModel, gamma: f64, kind: DecDivergence) -> Result<Self, Error> {
        if models.is_empty() {
            return Err(Error::InvalidInput("empty model class"));
        }
        let a = reference.len();
        if models.iter().any(|m| m.len() != a) {
            return Err(Error::InvalidInput("models disagree on the decision set"));
        }
        let regret = models.iter().map(|m| (0..a).map(|pi| m.regret(pi)).collect()).collect();
        let div = models
            .iter()
            .map(|m| {
                (0..a)
                    .map(|pi| match kind {
                        DecDivergence::HellingerSq => hellinger_sq_reward(&m.laws[pi], &reference.laws[pi]),
                        DecDivergence::SquaredMeanGap => {
                            let d = m.mean(pi) - reference.mean(pi);
                            d * d
                        }
                    })
                    .collect()
            })
            .collect();
        Self::from_tables(regret, div, gamma)
    }

    /// Structured class given by mean vectors and a reference mean vector.
    pub fn structured(means: &[Vec<f64>], reference: &[f64], gamma: f64) -> Result<Self, Error> {
        let regret = means
            .iter()
            .map(|f| {
                let b = math::max(f);
                f.iter().map(|v| b - v).collect()
            })
            .collect();
        let div = means.iter().map(|f| f.iter().zip(reference).map(|(a, b)| (a - b) * (a - b)).collect()).collect();
        Self::from_tables(regret, div, gamma)
    }

    pub fn from_tables(regret: Vec<Vec<f64>>, div: Vec<Vec<f64>>, gamma: f64) -> Result<Self, Error> {
        if regret.is_empty() || regret.len() != div.len() {
            return Err(Error::InvalidInput("regret and divergence tables must match"));
        }
        let a = regret[0].len();
        if a == 0 || regret.iter().chain(&div).any(|r| r.len() != a) {
            return Err(Error::InvalidInput("ragged payoff tables"));
        }
        if !(gamma >= 0.0) {
            return Err(Error::InvalidInput("γ must be nonnegative"));
        }
        Ok(DecProblem { gamma, regret, div })
    }

    pub fn models(&self) -> usize {
        self.regret.len()
    }

    pub fn payoff_row(&self, m: usize) -> Vec<f64> {
        self.regret[m].iter().zip(&self.div[m]).map(|(r, d)| r - self.gamma * d).collect()
    }

    /// `E_p[regret] − γ E_p[div]`, evaluated as two separate expectations.
    pub fn payoff(&self, m: usize, p: &[f64]) -> f64 {
        math::dot(p, &self.regret[m]) - self.gamma * math::dot(p, &self.div[m])
    }

    pub fn payoffs(&self, p: &[f64]) -> Vec<f64> {
        (0..self.models()).map(|m| self.payoff(m, p)).collect()
    }
}

impl ModelOracle for DecProblem {
    fn decisions(&self) -> usize {
        self.regret[0].len()
    }
    fn initial_rows(&self) -> Vec<Vec<f64>> {
        (0..self.models()).map(|m| self.payoff_row(m)).collect()
    }
    fn best_response(&self, p: &[f64]) -> Vec<f64> {
        let v = self.payoffs(p);
        self.payoff_row(math::argmax(&v))
    }
    fn upper_value(&self, p: &[f64]) -> f64 {
        // Both evaluation orders, so callers comparing either form against
        // the certificate never lose to rounding.
        (0..self.models()).map(|m| self.payoff(m, p).max(math::dot(p, &self.payoff_row(m)))).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Structured class `F = grid^A` with squared-mean-gap divergence to `f̂`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridClass {
    pub grid: Vec<f64>,
    pub reference: Vec<f64>,
    pub gamma: f64,
}

impl GridClass {
    /// Grid `{0, 1/n, …, 1}`.
    pub fn uniform(n: usize, reference: Vec<f64>, gamma: f64) -> Self {
        GridClass { grid: (0..=n).map(|i| i as f64 / n as f64).collect(), reference, gamma }
    }

    /// Best value of `−p·v − γp(v − f̂)²` over grid points `v ≤ cap`
    /// (`p` factored out, so just maximize `−v − γ(v−f̂)²`).
    fn best_below(&self, cap: f64, fhat: f64) -> Option<f64> {
        let mut best: Option<(f64, f64)> = None;
        for &v in self.grid.iter().filter(|&&v| v <= cap) {
            let s = -v - self.gamma * (v - fhat) * (v - fhat);
            if best.is_none_or(|(bs, _)| s > bs) {
                best = Some((s, v));
            }
        }
        best.map(|b| b.1)
    }

    fn row_for(&self, f: &[f64]) -> Vec<f64> {
        let b = math::max(f);
        f.iter().zip(&self.reference).map(|(v, r)| b - v - self.gamma * (v - r) * (v - r)).collect()
    }

    /// Maximizing model for `p`, as a mean vector.
    pub fn best_model(&self, p: &[f64]) -> Vec<f64> {
        let a = self.reference.len();
        let mut best: Option<(f64, Vec<f64>)> = None;
        for star in 0..a {
            for &b in &self.grid {
                let mut f = vec![0.0; a];
                f[star] = b;
                for pi in (0..a).filter(|&pi| pi != star) {
                    f[pi] = self.best_below(b, self.reference[pi]).expect("grid is nonempty");
                }
                let val = math::dot(p, &self.row_for(&f));
                if best.as_ref().is_none_or(|(bv, _)| val > *bv) {
                    best = Some((val, f));
                }
            }
        }
        best.expect("nonempty").1
    }
}

impl ModelOracle for GridClass {
    fn decisions(&self) -> usize {
        self.reference.len()
    }
    fn initial_rows(&self) -> Vec<Vec<f64>> {
        Vec::new()
    }
    fn best_response(&self, p: &[f64]) -> Vec<f64> {
        self.row_for(&self.best_model(p))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DecSolver {
    /// LP over generated payoff rows, new rows from exact best responses.
    CuttingPlane { max_iter: usize, tol: f64 },
    /// Hedge for the max player against exact best responses, averaged.
    Hedge { iters: usize },
}

impl Default for DecSolver {
    fn default() -> Self {
        DecSolver::CuttingPlane { max_iter: 500, tol: 1e-9 }
    }
}

/// Output of the saddle-point solver. `upper` (= `value + gap` up to
/// rounding) bounds the payoff of every model against `p`; `value` is a
/// certified lower bound on the game value.
#[derive(Debug, Clone, PartialEq)]
pub struct SaddleCertificate {
    pub p: FiniteDist,
    pub value: f64,
    pub gap: f64,
    /// Largest payoff against `p` found by the exact best response.
    pub upper: f64,
    /// Payoffs against `p` of the rows the solver knows about (every model
    /// for finite classes).
    pub payoffs: Vec<f64>,
    pub iterations: usize,
    /// Gap exceeded the requested tolerance.
    pub flagged: bool,
}

impl SaddleCertificate {
    pub fn upper(&self) -> f64 {
        self.upper
    }
}

fn minmax_lp(rows: &[Vec<f64>], a: usize) -> Result<(Vec<f64>, f64), Error> {
    // Variables (p_1..p_A, t); minimize t subject to ⟨g_k, p⟩ − t ≤ 0.
    let mut obj = vec![0.0; a + 1];
    obj[a] = 1.0;
    // t is bounded below by the smallest payoff entry; a finite bound keeps
    // the simplex away from the split free-variable degeneracy.
    let floor = rows.iter().flatten().copied().fold(f64::INFINITY, f64::min) - 1.0;
    let mut lp = LpProblem::new(Sense::Minimize, obj);
    lp.lower[a] = floor;
    for r in rows {
        let mut row = r.clone();
        row.push(-1.0);
        lp = lp.le(row, 0.0);
    }
    let mut ones = vec![1.0; a];
    ones.push(0.0);
    lp = lp.eq(ones, 1.0);
    let sol = solve_lp(&lp).map_err(|e| match e {
        LpError::Infeasible => Error::Internal("min-max LP reported infeasible"),
        LpError::Unbounded => Error::Internal("min-max LP reported unbounded"),
        LpError::IterationLimit => Error::Internal("min-max LP hit its iteration limit"),
        LpError::Malformed(m) => Error::Internal(m),
    })?;
    let mut p: Vec<f64> = sol.x[..a].iter().map(|x| x.max(0.0)).collect();
    let s: f64 = p.iter().sum();
    p.iter_mut().for_each(|x| *x /= s);
    Ok((p, sol.value))
}

fn finish(oracle: &dyn ModelOracle, rows: &[Vec<f64>], p: Vec<f64>, lower: f64, iterations: usize, tol: f64) -> SaddleCertificate {
    let mut upper = oracle.upper_value(&p);
    let payoffs: Vec<f64> = rows.iter().map(|r| math::dot(&p, r)).collect();
    for &v in &payoffs {
        upper = upper.max(v);
    }
    let gap = (upper - lower).max(0.0);
    SaddleCertificate {
        p: FiniteDist::new(p).expect("normalized"),
        value: upper - gap,
        gap,
        upper,
        payoffs,
        iterations,
        flagged: gap > tol,
    }
}

/// Solve the offset DEC game. For finite classes the cutting plane starts
/// with every row and terminates after one LP.
pub fn dec_offset(oracle: &dyn ModelOracle, solver: DecSolver) -> Result<SaddleCertificate, Error> {
    let a = oracle.decisions();
    match solver {
        DecSolver::CuttingPlane { max_iter, tol } => {
            let mut rows = oracle.initial_rows();
            if rows.is_empty() {
                rows.push(oracle.best_response(&FiniteDist::uniform(a).into_vec()));
            }
            let mut best: Option<(Vec<f64>, f64)> = None;
            let mut lower = f64::NEG_INFINITY;
            for it in 1..=max_iter {
                let (p, lb) = minmax_lp(&rows, a)?;
                lower = lower.max(lb);
                let br = oracle.best_response(&p);
                let ub = math::dot(&p, &br).max(rows.iter().map(|r| math::dot(&p, r)).fold(f64::NEG_INFINITY, f64::max));
                if best.as_ref().is_none_or(|b| ub < b.1) {
                    best = Some((p, ub));
                }
                if best.as_ref().unwrap().1 - lower <= tol {
                    let (p, _) = best.unwrap();
                    return Ok(finish(oracle, &rows, p, lower, it, tol));
                }
                rows.push(br);
            }
            let (p, _) = best.unwrap();
            Ok(finish(oracle, &rows, p, lower, max_iter, tol))
        }
        DecSolver::Hedge { iters } => {
            // Needs an explicit row list for the max player.
            let rows = oracle.initial_rows();
            if rows.is_empty() {
                return Err(Error::InvalidInput("Hedge needs a finite model list"));
            }
            let n = rows.len();
            let span = rows.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-12);
            let eta = math::sqrt(8.0 * math::ln(n.max(2) as f64) / iters as f64) / span;
            let mut cum = vec![0.0; n];
            let mut p_avg = vec![0.0; a];
            let mut q_avg = vec![0.0; n];
            for _ in 0..iters {
                let m = math::max(&cum);
                let w: Vec<f64> = cum.iter().map(|c| math::exp(eta * (c - m))).collect();
                let s: f64 = w.iter().sum();
                let q: Vec<f64> = w.iter().map(|x| x / s).collect();
                let mix: Vec<f64> = (0..a).map(|pi| (0..n).map(|k| q[k] * rows[k][pi]).sum()).collect();
                let neg: Vec<f64> = mix.iter().map(|v| -v).collect();
                let pi = math::argmax(&neg);
                p_avg[pi] += 1.0 / iters as f64;
                for k in 0..n {
                    cum[k] += rows[k][pi];
                    q_avg[k] += q[k] / iters as f64;
                }
            }
            let s: f64 = p_avg.iter().sum();
            p_avg.iter_mut().for_each(|x| *x /= s);
            let mix: Vec<f64> = (0..a).map(|pi| (0..n).map(|k| q_avg[k] * rows[k][pi]).sum()).collect();
            let lower = mix.iter().cloned().fold(f64::INFINITY, f64::min);
            Ok(finish(oracle, &rows, p_avg, lower, iters, 1e-3))
        }
    }
}

/// Convex combinations of pairs and triples of mean vectors on a weight
/// grid of `steps` parts, appended to the originals.
pub fn with_mean_mixtures(means: &[Vec<f64>], steps: usize) -> Vec<Vec<f64>> {
    let mut out = means.to_vec();
    let n = means.len();
    let comb = |w: &[(usize, f64)]| -> Vec<f64> {
        let a = means[0].len();
        (0..a).map(|pi| w.iter().map(|(k, x)| x * means[*k][pi]).sum()).collect()
    };
    for i in 0..n {
        for j in i + 1..n {
            for s in 1..steps {
                let x = s as f64 / steps as f64;
                out.push(comb(&[(i, x), (j, 1.0 - x)]));
            }
            for k in j + 1..n {
                for s1 in 1..steps {
                    for s2 in 1..steps - s1 {
                        let (x, y) = (s1 as f64 / steps as f64, s2 as f64 / steps as f64);
                        out.push(comb(&[(i, x), (j, y), (k, 1.0 - x - y)]));
                    }
                }
            }
        }
    }
    out
}
