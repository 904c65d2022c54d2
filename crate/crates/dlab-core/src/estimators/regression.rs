use alloc::vec::Vec;

use crate::error::Error;
use crate::math;

/// A finite function class tabulated on a finite query set:
/// `values[f][q]`. Contextual problems use `q = x·A + a`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteClass {
    pub values: Vec<Vec<f64>>,
}

impl FiniteClass {
    pub fn new(values: Vec<Vec<f64>>) -> Result<Self, Error> {
        if values.is_empty() {
            return Err(Error::InvalidInput("empty function class"));
        }
        let q = values[0].len();
        if values.iter().any(|v| v.len() != q) {
            return Err(Error::InvalidInput("class members must share a query set"));
        }
        Ok(FiniteClass { values })
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn queries(&self) -> usize {
        self.values[0].len()
    }

    pub fn eval(&self, f: usize, q: usize) -> f64 {
        self.values[f][q]
    }

    /// Empirical square loss of each member on `(query, reward)` data.
    pub fn losses(&self, data: &[(usize, f64)]) -> Vec<f64> {
        self.values
            .iter()
            .map(|v| data.iter().map(|&(q, r)| (v[q] - r) * (v[q] - r)).sum())
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeastSquares {
    pub index: usize,
    /// Set when the data were empty and index 0 was returned by default.
    pub no_data: bool,
}

/// Empirical risk minimizer; ties go to the lowest index.
pub fn least_squares_finite(class: &FiniteClass, data: &[(usize, f64)]) -> Result<LeastSquares, Error> {
    if class.is_empty() {
        return Err(Error::InvalidInput("empty function class"));
    }
    if data.is_empty() {
        return Ok(LeastSquares { index: 0, no_data: true });
    }
    let l = class.losses(data);
    let mut best = 0;
    for i in 1..l.len() {
        if l[i] < l[best] {
            best = i;
        }
    }
    Ok(LeastSquares { index: best, no_data: false })
}

/// Members whose empirical loss is within `beta` of the minimum.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfidenceSet {
    pub members: Vec<bool>,
    pub beta: f64,
}

impl ConfidenceSet {
    pub fn indices(&self) -> impl Iterator<Item = usize> + '_ {
        self.members.iter().enumerate().filter(|(_, m)| **m).map(|(i, _)| i)
    }

    pub fn size(&self) -> usize {
        self.members.iter().filter(|m| **m).count()
    }

    pub fn contains(&self, f: usize) -> bool {
        self.members[f]
    }
}

/// `β = 8 ln(|F|/δ)`.
pub fn confidence_beta(class_size: usize, delta: f64) -> f64 {
    8.0 * math::ln(class_size as f64 / delta)
}

pub fn confidence_set(class: &FiniteClass, data: &[(usize, f64)], beta: f64) -> ConfidenceSet {
    let l = class.losses(data);
    let min = l.iter().copied().fold(f64::INFINITY, f64::min);
    ConfidenceSet { members: l.iter().map(|&x| x <= min + beta).collect(), beta }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn constant_functions() {
        let c = FiniteClass::new(vec![vec![0.0], vec![1.0]]).unwrap();
        let d = [(0, 1.0), (0, 1.0), (0, 0.0)];
        assert_eq!(least_squares_finite(&c, &d).unwrap().index, 1);
        assert!(least_squares_finite(&c, &[]).unwrap().no_data);
        assert!(FiniteClass::new(vec![]).is_err());
    }

    #[test]
    fn beta_values() {
        assert!((confidence_beta(10, 0.1) - 36.841_361_487_904_73).abs() < 1e-9);
        let c = FiniteClass::new(vec![vec![0.0], vec![1.0], vec![1.0]]).unwrap();
        let s = confidence_set(&c, &[(0, 1.0)], 0.0);
        assert_eq!(s.indices().collect::<Vec<_>>(), vec![1, 2]);
    }
}
