//! Sampling estimators for the mean and degree-1 Fourier mass, the
//! Fourier-regularity check, and exact spectra for validating them.

mod columns;
mod degree_one;
mod exact;
mod mean;
pub mod plan;

use serde::{Deserialize, Serialize};

pub use degree_one::{
    check_fourier_regular, estimate_sum_of_squares, estimate_sums_of_squares, Regularity, RegularityCheck, SharedEstimates,
};
pub use exact::{influences, ExactSpectrum, FULL_MAX_DIM, SLICE_MAX_DIM};
pub use mean::estimate_mean;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralEstimate {
    pub value: f64,
    /// Additive accuracy the estimate was planned for.
    pub accuracy: f64,
    /// Failure probability the estimate was planned for.
    pub confidence: f64,
    pub queries_used: u64,
}
