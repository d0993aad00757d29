//! Closed-form population moments for power generators `T(x) = x^(-s)`.
//!
//! Every expectation splits over the two gamma components of the mixture:
//! `E[g(X)] = w1 E[g(T^{-1}(Z_1))] + w2 E[g(T^{-1}(Z_2))]`.

use crate::error::{Error, Result};
use crate::family::{mixture_weights, FamilySpec, Params};
use crate::special::{digamma_unchecked, ln_gamma};

pub use crate::special::digamma;

/// The four statistics driving the estimators, with `y = x^(-s)`:
/// `h1 = y log y / (1 + delta y)`, `h2 = y log y`, `h3 = log y`, `h4 = y`.
///
/// Holds either population expectations or sample means.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HVector {
    pub h1: f64,
    pub h2: f64,
    pub h3: f64,
    pub h4: f64,
}

impl HVector {
    pub fn new(h1: f64, h2: f64, h3: f64, h4: f64) -> Self {
        Self { h1, h2, h3, h4 }
    }

    /// The statistics of a single observation `x > 0`.
    pub fn at_point(spec: FamilySpec, x: f64) -> Self {
        let log_y = spec.log_generator(x);
        let y = log_y.exp();
        let h2 = y * log_y;
        let h1 = if spec.is_weighted() { h2 / (1.0 + y) } else { h2 };
        Self {
            h1,
            h2,
            h3: log_y,
            h4: y,
        }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.h1, self.h2, self.h3, self.h4]
    }

    pub fn from_array(a: [f64; 4]) -> Self {
        Self::new(a[0], a[1], a[2], a[3])
    }
}

/// `E[X^q]`, defined when `mu - q/s > 0`.
pub fn moment(spec: FamilySpec, params: Params, q: f64) -> Result<f64> {
    let (mu, sigma) = (params.mu(), params.sigma());
    let a = mu - q / spec.s();
    if !(a > 0.0) {
        return Err(Error::MomentUndefined(format!(
            "E[X^{q}] needs mu - q/s > 0, got {a}"
        )));
    }
    let (w1, w2) = mixture_weights(spec, params);
    let log_core = (q / spec.s()) * (mu * sigma).ln() + ln_gamma(a) - ln_gamma(mu);
    Ok(log_core.exp() * (w1 + w2 * a / mu))
}

/// `E[X^(-p) log X]`, defined when `mu + p/s > 0`.
pub fn neg_power_log_moment(spec: FamilySpec, params: Params, p: f64) -> Result<f64> {
    let (mu, sigma) = (params.mu(), params.sigma());
    let s = spec.s();
    let a = mu + p / s;
    if !(a > 0.0) {
        return Err(Error::MomentUndefined(format!(
            "E[X^-{p} log X] needs mu + p/s > 0, got {a}"
        )));
    }
    let (w1, w2) = mixture_weights(spec, params);
    let log_rate = (mu * sigma).ln();
    let factor = (ln_gamma(a) - ln_gamma(mu) - (p / s) * log_rate).exp();
    let first = w1 * (digamma_unchecked(a) - log_rate);
    let second = if w2 > 0.0 {
        w2 * (a / mu) * (digamma_unchecked(a + 1.0) - log_rate)
    } else {
        0.0
    };
    Ok(-factor * (first + second) / s)
}

/// `E[log X]`, in the simplified form obtained from the digamma recurrence:
/// `-(1/s) [psi(mu + 1) - log(mu sigma) - (1/mu) sigma / (sigma + delta)]`.
pub fn log_moment(spec: FamilySpec, params: Params) -> f64 {
    let (mu, sigma) = (params.mu(), params.sigma());
    let (w1, _) = mixture_weights(spec, params);
    -(digamma_unchecked(mu + 1.0) - (mu * sigma).ln() - w1 / mu) / spec.s()
}

/// `E[X^(-s) log(X^(-s)) / (1 + delta X^(-s))] = [psi(mu + 1) - log(mu sigma)] / (sigma + delta)`.
pub fn weighted_log_moment(spec: FamilySpec, params: Params) -> f64 {
    let (mu, sigma) = (params.mu(), params.sigma());
    (digamma_unchecked(mu + 1.0) - (mu * sigma).ln()) / (sigma + spec.delta_f64())
}

/// Population expectations of `(h1, h2, h3, h4)`.
pub fn population_h(spec: FamilySpec, params: Params) -> HVector {
    let (mu, sigma) = (params.mu(), params.sigma());
    let s = spec.s();
    let (_, w2) = mixture_weights(spec, params);
    let h4 = (1.0 + w2 / mu) / sigma;
    let h3 = -s * log_moment(spec, params);
    // mu + s/s = mu + 1 > 0, so this cannot fail
    let h2 = -s * neg_power_log_moment(spec, params, s)
        .expect("E[X^-s log X] exists for every valid (mu, sigma)");
    let h1 = if spec.is_weighted() {
        weighted_log_moment(spec, params)
    } else {
        h2
    };
    HVector { h1, h2, h3, h4 }
}
