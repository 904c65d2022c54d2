use alloc::vec;
use alloc::vec::Vec;

use crate::error::{check_len, Error};
use crate::math;
use crate::numprob::dist::FiniteDist;

/// Exponential weights over a finite class, kept in log space.
#[derive(Debug, Clone, PartialEq)]
pub struct ExpWeights {
    pub log_w: Vec<f64>,
    pub eta: f64,
    pub cum_loss: Vec<f64>,
}

impl ExpWeights {
    pub fn new(n: usize, eta: f64) -> Result<Self, Error> {
        if n == 0 {
            return Err(Error::InvalidInput("empty class"));
        }
        if !(eta > 0.0) {
            return Err(Error::InvalidInput("learning rate must be positive"));
        }
        Ok(ExpWeights { log_w: vec![0.0; n], eta, cum_loss: vec![0.0; n] })
    }

    /// Learning rate `√(8 ln N / T)` for losses in [0, 1].
    pub fn tuned_eta(n: usize, horizon: usize) -> f64 {
        math::sqrt(8.0 * math::ln(n as f64) / horizon as f64)
    }

    pub fn len(&self) -> usize {
        self.log_w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_w.is_empty()
    }

    pub fn update(&mut self, losses: &[f64]) -> Result<(), Error> {
        check_len(self.log_w.len(), losses.len())?;
        if losses.iter().any(|l| l.is_nan()) {
            return Err(Error::InvalidInput("NaN loss"));
        }
        for ((lw, cl), &l) in self.log_w.iter_mut().zip(&mut self.cum_loss).zip(losses) {
            *lw -= self.eta * l;
            *cl += l;
        }
        // Re-center so log-weights stay near zero on long streams.
        let m = math::max(&self.log_w);
        if m.is_finite() {
            self.log_w.iter_mut().for_each(|x| *x -= m);
        }
        Ok(())
    }

    pub fn dist(&self) -> FiniteDist {
        FiniteDist::from_log_weights(&self.log_w).expect("finite losses keep some weight")
    }
}

/// Result of the square-loss substitution rule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquarePrediction {
    pub value: f64,
    /// `max_y [(ŷ−y)² + (c/η) ln Σ q e^{−η(f−y)²}]` at the chosen ŷ.
    pub worst_case: f64,
}

/// `argmin_{ŷ∈[0,1]} max_{y∈{0,1}} (ŷ−y)² + (c/η) ln Σ_f q(f) e^{−η(f−y)²}`
/// on a grid of spacing `step`; ties go to the smaller ŷ.
pub fn square_loss_minimax(q: &FiniteDist, preds: &[f64], eta: f64, c: f64, step: f64) -> Result<SquarePrediction, Error> {
    check_len(q.len(), preds.len())?;
    if preds.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Error::InvalidInput("predictions must lie in [0,1]"));
    }
    let mix = |y: f64| -> f64 {
        let lw: Vec<f64> = q
            .probs()
            .iter()
            .zip(preds)
            .map(|(w, f)| if *w > 0.0 { math::ln(*w) - eta * (f - y) * (f - y) } else { f64::NEG_INFINITY })
            .collect();
        let m = math::max(&lw);
        m + math::ln(lw.iter().map(|x| math::exp(x - m)).sum::<f64>())
    };
    let (m0, m1) = ((c / eta) * mix(0.0), (c / eta) * mix(1.0));
    let n = math::round(1.0 / step) as usize;
    let mut best = SquarePrediction { value: 0.0, worst_case: f64::INFINITY };
    for i in 0..=n {
        let y = (i as f64 / n as f64).min(1.0);
        let w = (y * y + m0).max((1.0 - y) * (1.0 - y) + m1);
        if w < best.worst_case {
            best = SquarePrediction { value: y, worst_case: w };
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_losses_keep_distribution() {
        let mut e = ExpWeights::new(3, 0.7).unwrap();
        e.update(&[0.0; 3]).unwrap();
        assert_eq!(e.dist(), FiniteDist::uniform(3));
        assert!(e.update(&[f64::NAN, 0.0, 0.0]).is_err());
        assert!(e.update(&[0.0]).is_err());
    }

    #[test]
    fn ratio_after_ten_rounds() {
        let mut e = ExpWeights::new(2, 1.0).unwrap();
        for _ in 0..10 {
            e.update(&[0.0, 1.0]).unwrap();
        }
        let d = e.dist();
        assert!((d[0] / d[1] - math::exp(10.0)).abs() / math::exp(10.0) < 1e-12);
    }

    #[test]
    fn tiny_eta_is_uniform() {
        let mut e = ExpWeights::new(3, 1e-15).unwrap();
        e.update(&[1.0, 0.0, 0.5]).unwrap();
        for &p in e.dist().probs() {
            assert!((p - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn point_mass_prediction() {
        let q = FiniteDist::point(2, 1);
        let s = square_loss_minimax(&q, &[0.2, 0.8], 2.0, 1.0, 1e-4).unwrap();
        assert!((s.value - 0.8).abs() < 1e-9);
    }
}
