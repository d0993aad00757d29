//! Numerical maximum likelihood for `(mu, sigma)`, used as a comparison
//! baseline for the closed-form estimators.
//!
//! The log-likelihood depends on the data only through `mean(y)`,
//! `mean(log y)` and a parameter-free constant (`y = x^(-s)`), so each
//! evaluation is O(1) after one pass over the data. The search runs BFGS on
//! `(log mu, log sigma)` with central-difference gradients.

use super::{g2, params_from_h, summary_stats};
use crate::error::{Error, Result};
use crate::family::{FamilySpec, Params};
use crate::special::ln_gamma;

const MAX_ITER: usize = 500;
const GRAD_TOL: f64 = 1e-8;
const STEP_TOL: f64 = 1e-10;

/// Sufficient statistics of the likelihood.
#[derive(Debug, Clone, Copy)]
struct LikelihoodStats {
    mean_y: f64,
    mean_log_y: f64,
    /// `mean(log(1 + delta y)) + log|s| - mean(log x)`.
    constant: f64,
    delta: f64,
}

impl LikelihoodStats {
    fn new(data: &[f64], spec: FamilySpec) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::EmptySample { n: 0, required: 1 });
        }
        let (mut sy, mut sly, mut sw, mut slx) = (0.0, 0.0, 0.0, 0.0);
        for (index, &x) in data.iter().enumerate() {
            if !(x > 0.0 && x.is_finite()) {
                return Err(Error::NonPositiveData { index, value: x });
            }
            let lx = x.ln();
            let ly = -spec.s() * lx;
            let y = ly.exp();
            sy += y;
            sly += ly;
            if spec.is_weighted() {
                sw += if ly > 0.0 { ly + (-ly).exp().ln_1p() } else { y.ln_1p() };
            }
            slx += lx;
        }
        let n = data.len() as f64;
        Ok(Self {
            mean_y: sy / n,
            mean_log_y: sly / n,
            constant: sw / n + spec.s().abs().ln() - slx / n,
            delta: spec.delta_f64(),
        })
    }

    fn mean_log_likelihood(&self, mu: f64, sigma: f64) -> f64 {
        let rate = mu * sigma;
        (mu + 1.0) * rate.ln() - (sigma + self.delta).ln() - ln_gamma(mu + 1.0)
            - rate * self.mean_y
            + mu * self.mean_log_y
            + self.constant
    }
}

/// Average log-density of the data at `params`.
pub fn mean_log_likelihood(data: &[f64], spec: FamilySpec, params: Params) -> Result<f64> {
    Ok(LikelihoodStats::new(data, spec)?.mean_log_likelihood(params.mu(), params.sigma()))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MleFit {
    pub params: Params,
    pub mean_log_likelihood: f64,
    pub iterations: usize,
}

fn objective(stats: &LikelihoodStats, theta: [f64; 2]) -> f64 {
    let v = -stats.mean_log_likelihood(theta[0].exp(), theta[1].exp());
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

fn gradient(stats: &LikelihoodStats, theta: [f64; 2]) -> [f64; 2] {
    let base = f64::EPSILON.cbrt();
    let mut g = [0.0; 2];
    for i in 0..2 {
        let h = base * theta[i].abs().max(1.0);
        let mut up = theta;
        let mut down = theta;
        up[i] += h;
        down[i] -= h;
        g[i] = (objective(stats, up) - objective(stats, down)) / (up[i] - down[i]);
    }
    g
}

fn norm(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

fn default_start(data: &[f64], spec: FamilySpec) -> Result<Params> {
    let h = summary_stats(data, spec)?.hstats;
    if let Ok(p) = params_from_h(&h, spec.delta()) {
        return Ok(p);
    }
    // unweighted closed form as a fallback start
    let sigma = 1.0 / h.h4;
    let mu = g2(&h, sigma, 0).unwrap_or(1.0);
    Params::new(mu, sigma)
}

/// Maximizes the likelihood over `(mu, sigma)`. Starts from `init`, or from
/// the moment-type estimates when `init` is `None`.
pub fn mle_numeric(data: &[f64], spec: FamilySpec, init: Option<Params>) -> Result<MleFit> {
    let stats = LikelihoodStats::new(data, spec)?;
    let start = match init {
        Some(p) => p,
        None => default_start(data, spec)?,
    };
    let mut theta = [start.mu().ln(), start.sigma().ln()];
    let mut f = objective(&stats, theta);
    let mut g = gradient(&stats, theta);
    // inverse Hessian approximation
    let mut hinv = [[1.0, 0.0], [0.0, 1.0]];

    for iter in 0..MAX_ITER {
        if norm(g) < GRAD_TOL {
            return finish(&stats, theta, iter);
        }
        let mut dir = [
            -(hinv[0][0] * g[0] + hinv[0][1] * g[1]),
            -(hinv[1][0] * g[0] + hinv[1][1] * g[1]),
        ];
        let mut slope = dir[0] * g[0] + dir[1] * g[1];
        if !(slope < 0.0) {
            hinv = [[1.0, 0.0], [0.0, 1.0]];
            dir = [-g[0], -g[1]];
            slope = dir[0] * g[0] + dir[1] * g[1];
        }
        // keep trial steps inside a sane range of log-parameters
        let len = norm(dir);
        let mut t = if len > 2.0 { 2.0 / len } else { 1.0 };
        let mut accepted = None;
        while t * len > STEP_TOL * 1e-3 {
            let trial = [theta[0] + t * dir[0], theta[1] + t * dir[1]];
            let ft = objective(&stats, trial);
            if ft <= f + 1e-4 * t * slope {
                accepted = Some((trial, ft));
                break;
            }
            t *= 0.5;
        }
        let Some((next, fnext)) = accepted else {
            // no descent possible at this resolution: the gradient is at its noise floor
            return finish(&stats, theta, iter);
        };
        let step = [next[0] - theta[0], next[1] - theta[1]];
        let gnext = gradient(&stats, next);
        let yv = [gnext[0] - g[0], gnext[1] - g[1]];
        theta = next;
        f = fnext;
        g = gnext;
        if norm(step) < STEP_TOL {
            return finish(&stats, theta, iter + 1);
        }
        let sy = step[0] * yv[0] + step[1] * yv[1];
        if sy > 1e-16 {
            let rho = 1.0 / sy;
            // H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
            let mut left = [[0.0; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    let e = if i == j { 1.0 } else { 0.0 };
                    left[i][j] = e - rho * step[i] * yv[j];
                }
            }
            let mut tmp = [[0.0; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    tmp[i][j] = left[i][0] * hinv[0][j] + left[i][1] * hinv[1][j];
                }
            }
            let mut next_h = [[0.0; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    next_h[i][j] =
                        tmp[i][0] * left[j][0] + tmp[i][1] * left[j][1] + rho * step[i] * step[j];
                }
            }
            hinv = next_h;
        }
    }
    Err(Error::OptimizationFailed {
        iterations: MAX_ITER,
        mu: theta[0].exp(),
        sigma: theta[1].exp(),
    })
}

fn finish(stats: &LikelihoodStats, theta: [f64; 2], iterations: usize) -> Result<MleFit> {
    let params = Params::new(theta[0].exp(), theta[1].exp()).map_err(|_| {
        Error::OptimizationFailed {
            iterations,
            mu: theta[0].exp(),
            sigma: theta[1].exp(),
        }
    })?;
    Ok(MleFit {
        params,
        mean_log_likelihood: stats.mean_log_likelihood(params.mu(), params.sigma()),
        iterations,
    })
}
