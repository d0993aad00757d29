//! Special functions needed by the density and the moment formulas.

use crate::error::{Error, Result};

/// Euler–Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Natural log of the gamma function for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    statrs::function::gamma::ln_gamma(x)
}

/// Digamma function `psi(z) = d/dz ln Gamma(z)` for `z > 0`.
pub fn digamma(z: f64) -> Result<f64> {
    if !(z > 0.0) || !z.is_finite() {
        return Err(Error::Domain(format!("digamma requires finite z > 0, got {z}")));
    }
    Ok(digamma_unchecked(z))
}

pub(crate) fn digamma_unchecked(z: f64) -> f64 {
    statrs::function::gamma::digamma(z)
}
