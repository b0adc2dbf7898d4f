//! Special functions and integration primitives shared by the engines.

mod bvn;
mod normal;
mod qmc;
mod sum;

pub use bvn::{bvn, bvn_cdf};
pub use normal::{erfc, norm_cdf, norm_pdf, norm_quantile, std_normal_cdf, std_normal_quantile};
pub use qmc::{normal_pairs_block, qmc_normal_pairs, QmcSpec, Sobol2, SobolRange};
pub use sum::{compensated_cumsum, compensated_sum, CompensatedSum};

use crate::error::{CoverError, Result};

/// A probability in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Probability(f64);

impl Probability {
    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Probability(value))
        } else {
            Err(CoverError::domain(
                "Probability",
                format!("{value} is not in [0, 1]"),
            ))
        }
    }

    /// Rounds tiny excursions outside [0, 1] (from floating point) back in.
    pub(crate) fn clamped(value: f64) -> Self {
        Probability(value.clamp(0.0, 1.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

/// A correlation coefficient in [-1, 1].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Correlation(f64);

impl Correlation {
    pub fn new(rho: f64) -> Result<Self> {
        if (-1.0..=1.0).contains(&rho) {
            Ok(Correlation(rho))
        } else {
            Err(CoverError::domain(
                "Correlation",
                format!("rho = {rho} is not in [-1, 1]"),
            ))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}
