//! G-optimal design by Frank-Wolfe on log det, with away steps.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;
use crate::math;
use crate::numprob::dist::FiniteDist;
use crate::numprob::linalg::{cholesky, cholesky_solve, sym_eigen, Mat};

#[derive(Debug, Clone)]
pub struct Design {
    pub weights: FiniteDist,
    /// Dimension of the span of the points.
    pub rank: usize,
    /// Leverage `φᵢᵀ Σ_p⁺ φᵢ` of every input point.
    pub leverage: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl Design {
    pub fn max_leverage(&self) -> f64 {
        math::max(&self.leverage)
    }
}

/// Points below this weight count as outside the support.
pub const SUPPORT_EPS: f64 = 1e-12;

/// Find `p` with `max_i φᵢᵀ Σ_p⁻¹ φᵢ ≤ r(1+tol)` where `r` is the rank of the
/// point set. Iteration cap defaults to `max(10·r·ln r, 200_000)`.
pub fn g_optimal_design(points: &[Vec<f64>], tol: f64) -> Result<Design, Error> {
    g_optimal_design_capped(points, tol, None)
}

pub fn g_optimal_design_capped(points: &[Vec<f64>], tol: f64, cap: Option<usize>) -> Result<Design, Error> {
    if points.is_empty() {
        return Err(Error::InvalidInput("empty point set"));
    }
    if !(tol > 0.0) {
        return Err(Error::InvalidInput("tol must be positive"));
    }
    let d = points[0].len();
    if points.iter().any(|p| p.len() != d || p.iter().any(|x| !x.is_finite())) {
        return Err(Error::InvalidInput("points must share a dimension and be finite"));
    }
    let n = points.len();
    // Restrict to the span so a rank-deficient set is handled exactly.
    let mut g = Mat::zeros(d, d);
    for p in points {
        g.add_outer(p, 1.0 / n as f64);
    }
    let (vals, vecs) = sym_eigen(&g);
    let top = vals.first().copied().unwrap_or(0.0);
    if !(top > 0.0) {
        return Err(Error::InvalidInput("degenerate point set: all points are zero"));
    }
    let r = vals.iter().filter(|&&v| v > 1e-12 * top).count();
    let z: Vec<Vec<f64>> = points
        .iter()
        .map(|p| (0..r).map(|k| (0..d).map(|i| vecs[(i, k)] * p[i]).sum()).collect())
        .collect();
    let rf = r as f64;
    let cap = cap.unwrap_or_else(|| ((10.0 * rf * math::ln(rf.max(1.0))) as usize).max(200_000));

    let mut w = vec![1.0 / n as f64; n];
    let mut iterations = 0;
    let mut converged = false;
    let mut lev;
    loop {
        lev = leverages(&z, &w, r)?;
        let (jmax, gmax) = lev.iter().copied().enumerate().fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
        let (jmin, gmin) = lev
            .iter()
            .copied()
            .enumerate()
            .filter(|&(i, _)| w[i] > SUPPORT_EPS)
            .fold((0, f64::INFINITY), |a, b| if b.1 < a.1 { b } else { a });
        if gmax <= rf * (1.0 + tol) && gmin >= rf * (1.0 - tol) {
            converged = true;
            break;
        }
        if iterations >= cap {
            break;
        }
        iterations += 1;
        // Exact line search on log det along e_j − p:
        // α* = (g_j − r) / (r (g_j − 1)).
        let toward = gmax - rf;
        let away = rf - gmin;
        if toward >= away {
            let alpha = (gmax - rf) / (rf * (gmax - 1.0));
            for x in w.iter_mut() {
                *x *= 1.0 - alpha;
            }
            w[jmax] += alpha;
        } else {
            let floor = -w[jmin] / (1.0 - w[jmin]);
            let alpha = if gmin > 1.0 { ((gmin - rf) / (rf * (gmin - 1.0))).max(floor) } else { floor };
            for x in w.iter_mut() {
                *x *= 1.0 - alpha;
            }
            w[jmin] += alpha;
            if alpha == floor {
                w[jmin] = 0.0;
            }
        }
    }
    Ok(Design { weights: FiniteDist::from_weights(&w)?, rank: r, leverage: lev, iterations, converged })
}

fn leverages(z: &[Vec<f64>], w: &[f64], r: usize) -> Result<Vec<f64>, Error> {
    let mut m = Mat::zeros(r, r);
    for (zi, &wi) in z.iter().zip(w) {
        if wi > 0.0 {
            m.add_outer(zi, wi);
        }
    }
    let l = cholesky(&m).ok_or(Error::Internal("design moment matrix lost rank"))?;
    Ok(z.iter().map(|zi| math::dot(zi, &cholesky_solve(&l, zi))).collect())
}

/// Leverage of each point under an arbitrary design, via a direct inverse;
/// used to audit [`g_optimal_design`].
pub fn leverage_direct(points: &[Vec<f64>], p: &[f64]) -> Option<Vec<f64>> {
    let d = points[0].len();
    let mut m = Mat::zeros(d, d);
    for (x, &w) in points.iter().zip(p) {
        m.add_outer(x, w);
    }
    let inv = crate::numprob::linalg::inverse_spd(&m)?;
    Some(points.iter().map(|x| inv.quad(x)).collect())
}
