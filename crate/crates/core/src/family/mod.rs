//! The weighted exponential family with power generator `T(x) = x^(-s)`.
//!
//! For `x > 0` the density is
//!
//! ```text
//! f(x) = (mu sigma)^(mu+1) / ((sigma + delta) Gamma(mu+1))
//!        * (1 + delta T(x)) * |T'(x)| / T(x) * exp(-mu sigma T(x)) * T(x)^mu
//! ```
//!
//! where `delta` is 0 for the classical member and 1 for the weighted one.
//! With `T(x) = x^(-s)` we have `|T'(x)| / T(x) = |s| / x`.
//!
//! **Sign convention.** `s` is always stored so that `T(x) = x^(-s)`. A
//! distribution whose generator is written `T(x) = x^k` therefore has
//! `s = -k`: the gamma distribution (`T(x) = x`) has `s = -1` and the inverse
//! gamma (`T(x) = 1/x`) has `s = 1`.

mod named;

pub use named::{from_named, to_named, ModelName, NamedModel};

use crate::error::{Error, Result};
use crate::special::ln_gamma;

/// Generator power and weighting indicator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FamilySpec {
    s: f64,
    delta: u8,
}

impl FamilySpec {
    /// `s` is the power in `T(x) = x^(-s)`; `delta` is 0 or 1.
    pub fn new(s: f64, delta: u8) -> Result<Self> {
        if !s.is_finite() || s == 0.0 {
            return Err(Error::InvalidParameter(format!(
                "generator power s must be finite and non-zero, got {s}"
            )));
        }
        if delta > 1 {
            return Err(Error::InvalidParameter(format!(
                "delta must be 0 or 1, got {delta}"
            )));
        }
        Ok(Self { s, delta })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn delta(&self) -> u8 {
        self.delta
    }

    /// `delta` as a float, for use inside formulas.
    pub fn delta_f64(&self) -> f64 {
        f64::from(self.delta)
    }

    pub fn is_weighted(&self) -> bool {
        self.delta == 1
    }

    /// `T(x) = x^(-s)`.
    pub fn generator(&self, x: f64) -> f64 {
        (-self.s * x.ln()).exp()
    }

    /// `log T(x) = -s log x`.
    pub fn log_generator(&self, x: f64) -> f64 {
        -self.s * x.ln()
    }

    /// `T^{-1}(z) = z^(-1/s)`, evaluated as `exp(-log(z) / s)`.
    pub fn inverse_generator(&self, z: f64) -> f64 {
        self.inverse_generator_from_log(z.ln())
    }

    /// `T^{-1}` applied to `exp(log_z)`.
    pub fn inverse_generator_from_log(&self, log_z: f64) -> f64 {
        (-log_z / self.s).exp()
    }
}

/// The pair `(mu, sigma)`, both finite and strictly positive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Params {
    mu: f64,
    sigma: f64,
}

impl Params {
    pub fn new(mu: f64, sigma: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "mu must be finite and > 0, got {mu}"
            )));
        }
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "sigma must be finite and > 0, got {sigma}"
            )));
        }
        Ok(Self { mu, sigma })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }
}

fn check_point(x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("x must be finite and > 0, got {x}")))
    }
}

/// `log(1 + exp(a))` without overflow.
fn log1p_exp(a: f64) -> f64 {
    if a > 0.0 {
        a + (-a).exp().ln_1p()
    } else {
        a.exp().ln_1p()
    }
}

/// Log of the family density at `x`.
pub fn log_density(spec: FamilySpec, params: Params, x: f64) -> Result<f64> {
    check_point(x)?;
    let (mu, sigma) = (params.mu, params.sigma);
    let d = spec.delta_f64();
    let log_y = spec.log_generator(x);
    let y = log_y.exp();
    let log_weight = if spec.is_weighted() { log1p_exp(log_y) } else { 0.0 };
    Ok((mu + 1.0) * (mu * sigma).ln() - (sigma + d).ln() - ln_gamma(mu + 1.0)
        + log_weight
        + spec.s.abs().ln()
        - x.ln()
        - mu * sigma * y
        + mu * log_y)
}

/// Family density at `x`.
pub fn density(spec: FamilySpec, params: Params, x: f64) -> Result<f64> {
    log_density(spec, params, x).map(f64::exp)
}

/// Mixture weights `(sigma / (sigma + delta), delta / (sigma + delta))`.
pub fn mixture_weights(spec: FamilySpec, params: Params) -> (f64, f64) {
    let d = spec.delta_f64();
    let total = params.sigma + d;
    (params.sigma / total, d / total)
}

/// Log of the mixture component `f_j`, `j` in `{1, 2}`.
///
/// `f_j` is the law of `T^{-1}(Z_j)` with `Z_j ~ Gamma(mu + j - 1, 1/(mu sigma))`.
pub fn log_component_density(spec: FamilySpec, params: Params, j: u8, x: f64) -> Result<f64> {
    if j != 1 && j != 2 {
        return Err(Error::Domain(format!("component index must be 1 or 2, got {j}")));
    }
    check_point(x)?;
    let shape = params.mu + f64::from(j) - 1.0;
    let rate = params.mu * params.sigma;
    let log_y = spec.log_generator(x);
    Ok(shape * rate.ln() - ln_gamma(shape) + spec.s.abs().ln() - x.ln() - rate * log_y.exp()
        + shape * log_y)
}

/// Mixture component density `f_j(x)`.
pub fn component_density(spec: FamilySpec, params: Params, j: u8, x: f64) -> Result<f64> {
    log_component_density(spec, params, j, x).map(f64::exp)
}
