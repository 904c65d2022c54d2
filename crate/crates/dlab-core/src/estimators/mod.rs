//! Online estimation oracles. Each reports its own estimation error through
//! an [`EstimationLedger`] when the harness knows the truth.

mod expweights;
mod layerwise;
mod posterior;
mod regression;

pub use expweights::{square_loss_minimax, ExpWeights, SquarePrediction};
pub use layerwise::{KernelClass, LayerwiseEstimator, LayerwiseMode};
pub use posterior::{hellinger_to_mixture, mixture_at, mixture_means, LogLossPosterior};
pub use regression::{confidence_beta, confidence_set, least_squares_finite, ConfidenceSet, FiniteClass, LeastSquares};

use alloc::vec::Vec;

/// Per-round estimation error terms and their running total.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct EstimationLedger {
    pub terms: Vec<f64>,
    pub total: f64,
}

impl EstimationLedger {
    pub fn push(&mut self, term: f64) {
        debug_assert!(term >= 0.0);
        self.terms.push(term);
        self.total += term;
    }
}
