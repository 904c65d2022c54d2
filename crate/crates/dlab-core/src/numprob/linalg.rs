//! Small dense linear algebra: enough for d ≲ 50.

use alloc::vec;
use alloc::vec::Vec;

use crate::math;

#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    pub rows: usize,
    pub cols: usize,
    pub data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let r = rows.len();
        let c = if r == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged rows");
            data.extend_from_slice(row);
        }
        Mat { rows: r, cols: c, data }
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matmul(&self, b: &Mat) -> Mat {
        assert_eq!(self.cols, b.rows);
        let mut out = Mat::zeros(self.rows, b.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..b.cols {
                    out.data[i * b.cols + j] += a * b.data[k * b.cols + j];
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(self.cols, x.len());
        (0..self.rows).map(|i| math::dot(self.row(i), x)).collect()
    }

    /// `self += w · x xᵀ`.
    pub fn add_outer(&mut self, x: &[f64], w: f64) {
        let n = x.len();
        assert!(self.rows == n && self.cols == n);
        for i in 0..n {
            for j in 0..n {
                self.data[i * n + j] += w * x[i] * x[j];
            }
        }
    }

    /// `xᵀ self x`.
    pub fn quad(&self, x: &[f64]) -> f64 {
        math::dot(x, &self.matvec(x))
    }
}

impl core::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

/// Lower-triangular Cholesky factor, or `None` if `a` is not numerically
/// positive definite.
pub fn cholesky(a: &Mat) -> Option<Mat> {
    let n = a.rows;
    let mut l = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            if i == j {
                if !(s > 0.0) {
                    return None;
                }
                l[(i, i)] = math::sqrt(s);
            } else {
                l[(i, j)] = s / l[(j, j)];
            }
        }
    }
    Some(l)
}

/// Solve `L Lᵀ x = b` given the Cholesky factor.
pub fn cholesky_solve(l: &Mat, b: &[f64]) -> Vec<f64> {
    let n = l.rows;
    let mut y = b.to_vec();
    for i in 0..n {
        for k in 0..i {
            y[i] -= l[(i, k)] * y[k];
        }
        y[i] /= l[(i, i)];
    }
    for i in (0..n).rev() {
        for k in i + 1..n {
            y[i] -= l[(k, i)] * y[k];
        }
        y[i] /= l[(i, i)];
    }
    y
}

pub fn solve_spd(a: &Mat, b: &[f64]) -> Option<Vec<f64>> {
    cholesky(a).map(|l| cholesky_solve(&l, b))
}

pub fn inverse_spd(a: &Mat) -> Option<Mat> {
    let l = cholesky(a)?;
    let n = a.rows;
    let mut inv = Mat::zeros(n, n);
    let mut e = vec![0.0; n];
    for j in 0..n {
        e.iter_mut().for_each(|x| *x = 0.0);
        e[j] = 1.0;
        let col = cholesky_solve(&l, &e);
        for i in 0..n {
            inv[(i, j)] = col[i];
        }
    }
    Some(inv)
}

/// Sherman-Morrison: given `inv = A⁻¹`, overwrite with `(A + x xᵀ)⁻¹`.
pub fn sherman_morrison(inv: &mut Mat, x: &[f64]) {
    let u = inv.matvec(x);
    let denom = 1.0 + math::dot(x, &u);
    let n = x.len();
    for i in 0..n {
        for j in 0..n {
            inv.data[i * n + j] -= u[i] * u[j] / denom;
        }
    }
}

/// `argmin_θ Σ(⟨θ,φ⟩−y)² + ‖θ‖²` subject to `‖θ‖ ≤ radius`, where `gram`
/// is `Σφφᵀ` and `b = Σ y φ`. The constraint is handled by raising the ridge
/// until the norm meets the radius (bisection on the multiplier).
pub fn ridge_in_ball(gram: &Mat, b: &[f64], radius: f64) -> Vec<f64> {
    let n = gram.rows;
    let solve = |lam: f64| {
        let mut a = gram.clone();
        for i in 0..n {
            a[(i, i)] += lam;
        }
        solve_spd(&a, b).expect("ridge system is positive definite")
    };
    let theta = solve(1.0);
    if math::norm(&theta) <= radius {
        return theta;
    }
    let (mut lo, mut hi) = (1.0, (math::norm(b) / radius).max(1.0) * 2.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if math::norm(&solve(mid)) > radius {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-13 * hi {
            break;
        }
    }
    solve(hi)
}

/// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
/// Returns eigenvalues (descending) and eigenvectors as columns.
pub fn sym_eigen(a: &Mat) -> (Vec<f64>, Mat) {
    let n = a.rows;
    let mut m = a.clone();
    let mut v = Mat::identity(n);
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += m[(i, j)] * m[(i, j)];
            }
        }
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + math::sqrt(theta * theta + 1.0));
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / math::sqrt(t * t + 1.0);
                let s = t * c;
                for k in 0..n {
                    let mkp = m[(k, p)];
                    let mkq = m[(k, q)];
                    m[(k, p)] = c * mkp - s * mkq;
                    m[(k, q)] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[(p, k)];
                    let mqk = m[(q, k)];
                    m[(p, k)] = c * mpk - s * mqk;
                    m[(q, k)] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| m[(j, j)].partial_cmp(&m[(i, i)]).unwrap_or(core::cmp::Ordering::Equal));
    let vals = idx.iter().map(|&i| m[(i, i)]).collect();
    let mut vecs = Mat::zeros(n, n);
    for (c, &i) in idx.iter().enumerate() {
        for k in 0..n {
            vecs[(k, c)] = v[(k, i)];
        }
    }
    (vals, vecs)
}

/// Singular values (descending) by one-sided Jacobi, which keeps small
/// singular values accurate to working precision relative to the largest.
pub fn singular_values(a: &Mat) -> Vec<f64> {
    // Work on the orientation with fewer columns.
    let mut u = if a.cols > a.rows { a.transpose() } else { a.clone() };
    let (m, n) = (u.rows, u.cols);
    for _sweep in 0..200 {
        let mut rotated = false;
        for p in 0..n {
            for q in p + 1..n {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, 0.0);
                for k in 0..m {
                    let (x, y) = (u[(k, p)], u[(k, q)]);
                    alpha += x * x;
                    beta += y * y;
                    gamma += x * y;
                }
                if gamma.abs() <= 1e-15 * math::sqrt(alpha * beta) || gamma == 0.0 {
                    continue;
                }
                rotated = true;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + math::sqrt(1.0 + zeta * zeta));
                let t = if zeta == 0.0 { 1.0 } else { t };
                let c = 1.0 / math::sqrt(1.0 + t * t);
                let s = c * t;
                for k in 0..m {
                    let (x, y) = (u[(k, p)], u[(k, q)]);
                    u[(k, p)] = c * x - s * y;
                    u[(k, q)] = s * x + c * y;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = (0..n)
        .map(|j| math::sqrt((0..m).map(|k| u[(k, j)] * u[(k, j)]).sum::<f64>()))
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(core::cmp::Ordering::Equal));
    sv
}

/// Number of singular values strictly above `threshold`.
pub fn numeric_rank(a: &Mat, threshold: f64) -> usize {
    if a.rows == 0 || a.cols == 0 {
        return 0;
    }
    singular_values(a).iter().filter(|&&s| s > threshold).count()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numprob::rng::Stream;

    fn random_spd(n: usize, s: &mut Stream) -> Mat {
        let mut a = Mat::identity(n);
        for _ in 0..n + 2 {
            let x: Vec<f64> = (0..n).map(|_| s.normal()).collect();
            a.add_outer(&x, 1.0);
        }
        a
    }

    #[test]
    fn inverse_and_sherman_morrison() {
        let mut s = Stream::from_seed(3);
        let a = random_spd(5, &mut s);
        let inv = inverse_spd(&a).unwrap();
        let id = a.matmul(&inv);
        for i in 0..5 {
            for j in 0..5 {
                assert!((id[(i, j)] - if i == j { 1.0 } else { 0.0 }).abs() < 1e-10);
            }
        }
        let x: Vec<f64> = (0..5).map(|_| s.normal()).collect();
        let mut inc = inv.clone();
        sherman_morrison(&mut inc, &x);
        let mut b = a.clone();
        b.add_outer(&x, 1.0);
        let direct = inverse_spd(&b).unwrap();
        for k in 0..25 {
            assert!((inc.data[k] - direct.data[k]).abs() < 1e-10);
        }
    }

    #[test]
    fn eigen_reconstructs() {
        let mut s = Stream::from_seed(4);
        let a = random_spd(4, &mut s);
        let (vals, v) = sym_eigen(&a);
        let mut d = Mat::zeros(4, 4);
        for i in 0..4 {
            d[(i, i)] = vals[i];
        }
        let r = v.matmul(&d).matmul(&v.transpose());
        for k in 0..16 {
            assert!((r.data[k] - a.data[k]).abs() < 1e-10);
        }
        assert!(vals.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn rank_of_product() {
        let mut s = Stream::from_seed(5);
        let rand = |r, c, s: &mut Stream| {
            let mut m = Mat::zeros(r, c);
            m.data.iter_mut().for_each(|x| *x = s.normal());
            m
        };
        let a = rand(7, 2, &mut s).matmul(&rand(2, 9, &mut s));
        assert_eq!(numeric_rank(&a, 1e-8), 2);
        assert_eq!(numeric_rank(&Mat::zeros(3, 3), 1e-8), 0);
        let sv = singular_values(&Mat::from_rows(&[vec![3.0, 0.0], vec![0.0, -4.0]]));
        assert!((sv[0] - 4.0).abs() < 1e-14 && (sv[1] - 3.0).abs() < 1e-14);
    }
}
