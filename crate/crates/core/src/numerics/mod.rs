//! Deterministic random streams and the special functions backing the
//! Beta-posterior policies.
//!
//! Everything here is pure 64-bit floating point. Randomness flows
//! exclusively through [`RngStream`] values keyed by `(seed, stream_id)`;
//! nothing in the crate touches a platform RNG.

mod rng;
mod special;

pub use rng::RngStream;
pub use special::{beta_pdf, beta_quantile, inv_normal_cdf, ln_beta, ln_gamma, reg_inc_beta};
#[doc(hidden)]
pub use special::{ibeta_asym, ibeta_cf};

use crate::CoreError;

/// Shape pair of a Beta distribution: `alpha` counts successes (plus the
/// prior weight), `beta` counts failures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaParams {
    pub alpha: f64,
    pub beta: f64,
}

impl BetaParams {
    /// Both shapes must be strictly positive and finite.
    pub fn new(alpha: f64, beta: f64) -> Result<Self, CoreError> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(CoreError::domain(format!(
                "BetaParams.alpha must be positive and finite, got {alpha}"
            )));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(CoreError::domain(format!(
                "BetaParams.beta must be positive and finite, got {beta}"
            )));
        }
        Ok(Self { alpha, beta })
    }

    /// Mean `alpha / (alpha + beta)`.
    pub fn mean(&self) -> f64 {
        self.alpha / (self.alpha + self.beta)
    }
}
