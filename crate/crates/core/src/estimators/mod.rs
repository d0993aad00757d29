//! Closed-form moment-type estimators of `(mu, sigma)` and their delta-method
//! covariance.
//!
//! With sample means `X = (X1, X2, X3, X4)` of the statistics in [`HVector`],
//!
//! ```text
//! C = 1 - delta X4 + delta X2 / (delta X1 + 1)
//! D = delta - delta X3 / (delta X1 + 1)
//! sigma_hat = g1(X) = positive root of X4 sigma^2 - C sigma - D = 0
//! mu_hat    = g2(X) = (delta X1 + 1) / (sigma_hat X2 - X3)
//! ```
//!
//! For `delta = 0` this reduces to `sigma_hat = 1 / X4`, which is also the
//! maximum likelihood estimator of `sigma`.

mod mle;

pub use mle::{mean_log_likelihood, mle_numeric, MleFit};

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, EstimationFailure, Result};
use crate::family::{to_named, FamilySpec, ModelName, Params};
use crate::moments::HVector;

/// Denominators of `mu_hat` within this fraction of the magnitude of their
/// terms are treated as zero (exact cancellation for constant samples).
const MU_DENOMINATOR_RTOL: f64 = 1e-12;

/// Sample means of the four statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SampleHStats {
    pub hstats: HVector,
    pub n: usize,
}

/// Statistics of every observation, after checking that each is finite and
/// strictly positive.
pub fn h_values(data: &[f64], spec: FamilySpec) -> Result<Vec<HVector>> {
    data.iter()
        .enumerate()
        .map(|(index, &x)| {
            if x > 0.0 && x.is_finite() {
                Ok(HVector::at_point(spec, x))
            } else {
                Err(Error::NonPositiveData { index, value: x })
            }
        })
        .collect()
}

/// Componentwise mean of a set of statistic vectors.
pub fn mean_h<'a, I>(points: I) -> HVector
where
    I: IntoIterator<Item = &'a HVector>,
{
    let mut acc = [0.0; 4];
    let mut n = 0usize;
    for p in points {
        acc[0] += p.h1;
        acc[1] += p.h2;
        acc[2] += p.h3;
        acc[3] += p.h4;
        n += 1;
    }
    let n = n as f64;
    HVector::new(acc[0] / n, acc[1] / n, acc[2] / n, acc[3] / n)
}

/// One-pass sample means of `h1..h4`. Needs `n >= 2`.
pub fn summary_stats(data: &[f64], spec: FamilySpec) -> Result<SampleHStats> {
    if data.len() < 2 {
        return Err(Error::EmptySample {
            n: data.len(),
            required: 2,
        });
    }
    let mut acc = [0.0; 4];
    for (index, &x) in data.iter().enumerate() {
        if !(x > 0.0 && x.is_finite()) {
            return Err(Error::NonPositiveData { index, value: x });
        }
        let h = HVector::at_point(spec, x);
        acc[0] += h.h1;
        acc[1] += h.h2;
        acc[2] += h.h3;
        acc[3] += h.h4;
    }
    let n = data.len() as f64;
    Ok(SampleHStats {
        hstats: HVector::new(acc[0] / n, acc[1] / n, acc[2] / n, acc[3] / n),
        n: data.len(),
    })
}

/// Coefficients `(C, D)` of the sigma quadratic `h4 sigma^2 - C sigma - D = 0`.
pub fn sigma_quadratic(h: &HVector, delta: u8) -> Result<(f64, f64)> {
    let d = f64::from(delta);
    let w = d * h.h1 + 1.0;
    if w == 0.0 || !w.is_finite() {
        return Err(EstimationFailure::SingularWeight { value: w }.into());
    }
    let c = 1.0 - d * h.h4 + d * h.h2 / w;
    let dd = d - d * h.h3 / w;
    Ok((c, dd))
}

/// The sigma map `g1`: positive root of the sigma quadratic.
pub fn g1(h: &HVector, delta: u8) -> Result<f64> {
    if !(h.h4 > 0.0) || !h.h4.is_finite() {
        return Err(EstimationFailure::NonPositiveH4 { value: h.h4 }.into());
    }
    let (c, d) = sigma_quadratic(h, delta)?;
    let disc = c * c + 4.0 * h.h4 * d;
    if !disc.is_finite() {
        return Err(EstimationFailure::NonFinite { what: "discriminant" }.into());
    }
    if disc < 0.0 {
        return Err(EstimationFailure::NegativeDiscriminant { value: disc }.into());
    }
    let root = disc.sqrt();
    // (C + r) / (2 h4) == 2 D / (r - C); pick the form without cancellation
    let sigma = if c >= 0.0 {
        (c + root) / (2.0 * h.h4)
    } else {
        2.0 * d / (root - c)
    };
    if !(sigma > 0.0) || !sigma.is_finite() {
        return Err(EstimationFailure::NonPositiveSigma { value: sigma }.into());
    }
    Ok(sigma)
}

/// The mu map `g2` for a given sigma: `(delta h1 + 1) / (sigma h2 - h3)`.
pub fn g2(h: &HVector, sigma: f64, delta: u8) -> Result<f64> {
    let d = f64::from(delta);
    let a = sigma * h.h2;
    let denom = a - h.h3;
    if !denom.is_finite() {
        return Err(EstimationFailure::NonFinite { what: "mu denominator" }.into());
    }
    if denom <= MU_DENOMINATOR_RTOL * (a.abs() + h.h3.abs()) {
        return Err(EstimationFailure::NonPositiveMuDenominator { value: denom }.into());
    }
    let mu = (d * h.h1 + 1.0) / denom;
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(EstimationFailure::NonFinite { what: "mu estimate" }.into());
    }
    Ok(mu)
}

/// `(mu, sigma)` from a vector of means.
pub fn params_from_h(h: &HVector, delta: u8) -> Result<Params> {
    let sigma = g1(h, delta)?;
    let mu = g2(h, sigma, delta)?;
    Params::new(mu, sigma)
}

/// The full estimator map `x -> (g2(x), g1(x))`, in the row order of the
/// delta-method Jacobian.
pub fn estimator_map(h: &HVector, delta: u8) -> Result<[f64; 2]> {
    let sigma = g1(h, delta)?;
    Ok([g2(h, sigma, delta)?, sigma])
}

/// Jacobian of [`estimator_map`] by central differences with step
/// `eps^(1/3) max(1, |x_i|)`.
pub fn jacobian_central(h: &HVector, delta: u8) -> Result<[[f64; 4]; 2]> {
    let x = h.to_array();
    let mut jac = [[0.0; 4]; 2];
    let base = f64::EPSILON.cbrt();
    for i in 0..4 {
        let step = base * x[i].abs().max(1.0);
        let mut up = x;
        let mut down = x;
        up[i] += step;
        down[i] -= step;
        let width = up[i] - down[i];
        let fu = estimator_map(&HVector::from_array(up), delta)?;
        let fd = estimator_map(&HVector::from_array(down), delta)?;
        for r in 0..2 {
            jac[r][i] = (fu[r] - fd[r]) / width;
        }
    }
    Ok(jac)
}

/// Jacobian of [`estimator_map`] by forward differences with step
/// `eps^(1/2) max(1, |x_i|)`.
pub fn jacobian_forward(h: &HVector, delta: u8) -> Result<[[f64; 4]; 2]> {
    let x = h.to_array();
    let f0 = estimator_map(h, delta)?;
    let mut jac = [[0.0; 4]; 2];
    let base = f64::EPSILON.sqrt();
    for i in 0..4 {
        let mut up = x;
        up[i] += base * x[i].abs().max(1.0);
        let width = up[i] - x[i];
        let fu = estimator_map(&HVector::from_array(up), delta)?;
        for r in 0..2 {
            jac[r][i] = (fu[r] - f0[r]) / width;
        }
    }
    Ok(jac)
}

/// Unbiased sample covariance of the statistic vectors.
pub fn h_covariance(points: &[HVector]) -> [[f64; 4]; 4] {
    let mean = mean_h(points).to_array();
    let mut cov = [[0.0; 4]; 4];
    for p in points {
        let v = p.to_array();
        for i in 0..4 {
            let di = v[i] - mean[i];
            for j in i..4 {
                cov[i][j] += di * (v[j] - mean[j]);
            }
        }
    }
    let denom = (points.len() - 1) as f64;
    for i in 0..4 {
        for j in i..4 {
            cov[i][j] /= denom;
            cov[j][i] = cov[i][j];
        }
    }
    cov
}

/// `A Sigma A^T / n`.
pub fn sandwich(jac: &[[f64; 4]; 2], sigma: &[[f64; 4]; 4], n: usize) -> [[f64; 2]; 2] {
    let mut out = [[0.0; 2]; 2];
    for r in 0..2 {
        for c in 0..2 {
            let mut acc = 0.0;
            for i in 0..4 {
                for j in 0..4 {
                    acc += jac[r][i] * sigma[i][j] * jac[c][j];
                }
            }
            out[r][c] = acc / n as f64;
        }
    }
    // exact symmetry
    let off = 0.5 * (out[0][1] + out[1][0]);
    out[0][1] = off;
    out[1][0] = off;
    out
}

/// Delta-method covariance of `(mu_hat, sigma_hat)` at sample size `n`.
/// Needs `n >= 5`.
pub fn asymptotic_covariance(data: &[f64], spec: FamilySpec) -> Result<[[f64; 2]; 2]> {
    let points = h_values(data, spec)?;
    covariance_from_points(&points, spec.delta())
}

fn covariance_from_points(points: &[HVector], delta: u8) -> Result<[[f64; 2]; 2]> {
    if points.len() < 5 {
        return Err(Error::EmptySample {
            n: points.len(),
            required: 5,
        });
    }
    let mean = mean_h(points);
    let jac = jacobian_central(&mean, delta)?;
    Ok(sandwich(&jac, &h_covariance(points), points.len()))
}

/// Closed interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn contains(&self, v: f64) -> bool {
        self.lower <= v && v <= self.upper
    }
}

/// Two-sided standard-normal quantile for a confidence level in `(0, 1)`.
pub fn normal_critical_value(level: f64) -> Result<f64> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "confidence level must lie in (0, 1), got {level}"
        )));
    }
    Ok(Normal::standard().inverse_cdf(0.5 + 0.5 * level))
}

/// Wald interval `estimate +- z sqrt(variance)`.
pub fn wald_interval(estimate: f64, variance: f64, z: f64) -> Interval {
    let half = z * variance.max(0.0).sqrt();
    Interval {
        lower: estimate - half,
        upper: estimate + half,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateOptions {
    pub ci_level: f64,
    /// Named model used to attach native-parameter estimates.
    pub model: Option<ModelName>,
}

impl Default for EstimateOptions {
    fn default() -> Self {
        Self {
            ci_level: 0.95,
            model: None,
        }
    }
}

/// Asymptotic inference attached to a point estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inference {
    /// Covariance of `(mu_hat, sigma_hat)`, i.e. `A Sigma A^T / n`.
    pub covariance: [[f64; 2]; 2],
    pub ci_mu: Interval,
    pub ci_sigma: Interval,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimateReport {
    pub mu_hat: f64,
    pub sigma_hat: f64,
    pub n: usize,
    pub hstats: HVector,
    pub native_estimates: Option<Vec<(&'static str, f64)>>,
    pub ci_level: f64,
    /// `None` when `n < 5` or the Jacobian could not be evaluated.
    pub inference: Option<Inference>,
}

impl EstimateReport {
    pub fn params(&self) -> Params {
        Params::new(self.mu_hat, self.sigma_hat).expect("estimates are validated")
    }
}

/// Moment-type estimate with default options.
pub fn estimate(data: &[f64], spec: FamilySpec) -> Result<EstimateReport> {
    estimate_with(data, spec, &EstimateOptions::default())
}

pub fn estimate_with(
    data: &[f64],
    spec: FamilySpec,
    options: &EstimateOptions,
) -> Result<EstimateReport> {
    if data.len() < 2 {
        return Err(Error::EmptySample {
            n: data.len(),
            required: 2,
        });
    }
    let z = normal_critical_value(options.ci_level)?;
    let points = h_values(data, spec)?;
    let hstats = mean_h(&points);
    let params = params_from_h(&hstats, spec.delta())?;
    let (mu_hat, sigma_hat) = (params.mu(), params.sigma());

    let inference = covariance_from_points(&points, spec.delta())
        .ok()
        .map(|cov| Inference {
            covariance: cov,
            ci_mu: wald_interval(mu_hat, cov[0][0], z),
            ci_sigma: wald_interval(sigma_hat, cov[1][1], z),
        });
    let native_estimates = options
        .model
        .and_then(|m| to_named(m, spec, params).ok());

    Ok(EstimateReport {
        mu_hat,
        sigma_hat,
        n: data.len(),
        hstats,
        native_estimates,
        ci_level: options.ci_level,
        inference,
    })
}
