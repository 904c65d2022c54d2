//! Eluder dimension of a finite class on a finite decision set.
//!
//! A decision can appear at most once in an independent sequence (its own
//! earlier deviation would already exceed the budget), and independence of
//! the next decision only depends on the *set* of earlier ones. So the
//! longest sequence is a longest chain in the subset lattice, found by DP
//! over bitmasks.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Error;

pub const MAX_DECISIONS: usize = 12;
pub const MAX_FUNCTIONS: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub struct EluderResult {
    pub dim: usize,
    /// Scale `ε'` attaining the sup (a left limit is reported as its
    /// breakpoint).
    pub witness_eps: f64,
    /// Instance exceeded the exhaustive limits; `dim` is a greedy lower bound.
    pub lower_bound_only: bool,
}

#[derive(Clone, Copy)]
enum Scale {
    /// `dev > ε'`, `Σ dev² ≤ ε'²`.
    At(f64),
    /// Left limit at a breakpoint `b`: `dev ≥ b`, `Σ dev² < b²`.
    Below(f64),
}

impl Scale {
    fn dev_ok(self, d: f64) -> bool {
        match self {
            Scale::At(e) => d > e,
            Scale::Below(b) => d >= b,
        }
    }
    fn sum_ok(self, s: f64) -> bool {
        match self {
            Scale::At(e) => s <= e * e,
            Scale::Below(b) => s < b * b,
        }
    }
    fn eps(self) -> f64 {
        match self {
            Scale::At(e) | Scale::Below(e) => e,
        }
    }
}

fn deviations(values: &[Vec<f64>], fstar: &[f64]) -> Vec<Vec<f64>> {
    values.iter().map(|f| f.iter().zip(fstar).map(|(a, b)| (a - b).abs()).collect()).collect()
}

fn candidates(dev: &[Vec<f64>], eps: f64) -> Vec<Scale> {
    let mut b: Vec<f64> = dev.iter().flatten().copied().filter(|&d| d > eps).collect();
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.dedup();
    let mut out = vec![Scale::At(eps)];
    out.extend(b.into_iter().map(Scale::Below));
    out
}

fn longest_chain(dev: &[Vec<f64>], sums: &[Vec<f64>], n: usize, scale: Scale) -> usize {
    let masks: Vec<u32> = dev
        .iter()
        .map(|d| d.iter().enumerate().filter(|(_, &x)| scale.dev_ok(x)).fold(0u32, |m, (i, _)| m | (1 << i)))
        .collect();
    let full = 1usize << n;
    let mut reach = vec![false; full];
    reach[0] = true;
    let mut best = 0;
    for s in 0..full {
        if !reach[s] {
            continue;
        }
        best = best.max((s as u32).count_ones() as usize);
        let mut open = 0u32;
        for (f, &m) in masks.iter().enumerate() {
            if scale.sum_ok(sums[f][s]) {
                open |= m;
            }
        }
        open &= !(s as u32);
        while open != 0 {
            let i = open.trailing_zeros();
            reach[s | (1 << i)] = true;
            open &= open - 1;
        }
    }
    best
}

fn greedy_lower_bound(dev: &[Vec<f64>], eps: f64) -> usize {
    let n = dev[0].len();
    let mut sums = vec![0.0; dev.len()];
    let mut used = vec![false; n];
    let mut len = 0;
    loop {
        let next = (0..n).find(|&pi| !used[pi] && dev.iter().zip(&sums).any(|(d, &s)| d[pi] > eps && s <= eps * eps));
        match next {
            None => return len,
            Some(pi) => {
                used[pi] = true;
                len += 1;
                for (s, d) in sums.iter_mut().zip(dev) {
                    *s += d[pi] * d[pi];
                }
            }
        }
    }
}

/// `sup_{ε' ≥ ε}` longest `ε'`-independent sequence w.r.t. `f*`, floored at 1.
/// `values[f][π]`.
pub fn eluder_dimension(values: &[Vec<f64>], fstar: &[f64], eps: f64) -> Result<EluderResult, Error> {
    let n = fstar.len();
    if values.is_empty() || n == 0 || values.iter().any(|f| f.len() != n) || !(eps >= 0.0) {
        return Err(Error::InvalidInput("class must be a nonempty table over the decisions"));
    }
    let dev = deviations(values, fstar);
    if n > MAX_DECISIONS || values.len() > MAX_FUNCTIONS {
        return Ok(EluderResult { dim: greedy_lower_bound(&dev, eps).max(1), witness_eps: eps, lower_bound_only: true });
    }
    let full = 1usize << n;
    let sums: Vec<Vec<f64>> = dev
        .iter()
        .map(|d| {
            let mut s = vec![0.0; full];
            for m in 1..full {
                let i = m.trailing_zeros() as usize;
                s[m] = s[m & (m - 1)] + d[i] * d[i];
            }
            s
        })
        .collect();
    let mut best = EluderResult { dim: 0, witness_eps: eps, lower_bound_only: false };
    for scale in candidates(&dev, eps) {
        let l = longest_chain(&dev, &sums, n, scale);
        if l > best.dim {
            best.dim = l;
            best.witness_eps = scale.eps();
        }
        if best.dim == n {
            break;
        }
    }
    best.dim = best.dim.max(1);
    Ok(best)
}

/// `max_{f* ∈ F}` of [`eluder_dimension`].
pub fn eluder_dimension_class(values: &[Vec<f64>], eps: f64) -> Result<EluderResult, Error> {
    let mut best: Option<EluderResult> = None;
    for fstar in values {
        let r = eluder_dimension(values, fstar, eps)?;
        if best.as_ref().is_none_or(|b| r.dim > b.dim) {
            best = Some(r);
        }
    }
    best.ok_or(Error::InvalidInput("empty class"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singleton_is_one() {
        let r = eluder_dimension(&[vec![0.2, 0.4]], &[0.2, 0.4], 0.1).unwrap();
        assert_eq!(r.dim, 1);
    }

    #[test]
    fn full_binary_three() {
        let mut f = Vec::new();
        for m in 0..8u32 {
            f.push((0..3).map(|i| ((m >> i) & 1) as f64).collect::<Vec<_>>());
        }
        let r = eluder_dimension_class(&f, 0.4).unwrap();
        assert_eq!(r.dim, 3);
        // ε at or above every deviation leaves nothing to be surprised by.
        assert_eq!(eluder_dimension_class(&f, 1.0).unwrap().dim, 1);
    }
}
