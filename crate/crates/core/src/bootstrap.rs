//! Bootstrap bias reduction `theta* = 2 theta_hat - mean_b(theta_hat^(b))`
//! for the closed-form estimators.

use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimators::{h_values, mean_h, params_from_h};
use crate::family::{to_named, FamilySpec, ModelName, Params};
use crate::moments::HVector;
use crate::sampling::{FamilySampler, SeededStream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BootstrapScheme {
    /// Resample `n` observations with replacement.
    #[default]
    Nonparametric,
    /// Draw `n` observations from the fitted model.
    Parametric,
    /// Every replicate reuses the original sample unchanged. Only useful for
    /// checking the correction itself.
    Original,
}

impl std::str::FromStr for BootstrapScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "nonparametric" | "np" => Ok(Self::Nonparametric),
            "parametric" | "p" => Ok(Self::Parametric),
            "original" => Ok(Self::Original),
            other => Err(Error::Config(format!("unknown bootstrap scheme '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BootstrapConfig {
    pub replicates: usize,
    pub scheme: BootstrapScheme,
    /// Replicate `b` draws from `stream.child(b)`.
    pub stream: SeededStream,
}

impl BootstrapConfig {
    pub fn new(replicates: usize, scheme: BootstrapScheme, stream: SeededStream) -> Result<Self> {
        if replicates == 0 {
            return Err(Error::InvalidParameter(
                "bootstrap needs at least one replicate".into(),
            ));
        }
        Ok(Self {
            replicates,
            scheme,
            stream,
        })
    }

    /// Successful replicates needed for the correction: `max(10, B/4)`,
    /// capped at `B`.
    pub fn required_successes(&self) -> usize {
        let b = self.replicates;
        b.min(10usize.max(b.div_ceil(4)))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BiasReducedEstimate {
    /// Parameter names, e.g. `["lambda", "phi"]` or `["mu", "sigma"]`.
    pub names: Vec<&'static str>,
    pub raw: Vec<f64>,
    pub replicate_mean: Vec<f64>,
    pub reduced: Vec<f64>,
    pub replicates_used: usize,
    pub failures: usize,
    /// Set when a reduced value is not strictly positive.
    pub negative_reduced: bool,
}

impl BiasReducedEstimate {
    pub fn get(&self, name: &str) -> Option<(f64, f64)> {
        self.names
            .iter()
            .position(|n| *n == name)
            .map(|i| (self.raw[i], self.reduced[i]))
    }
}

/// Names of the parameters the correction acts on.
pub fn target_names(named: Option<ModelName>) -> Vec<&'static str> {
    match named.and_then(|m| m.free_params()) {
        Some(names) => names.to_vec(),
        None => vec!["mu", "sigma"],
    }
}

/// Values of the target parameters for a fitted `(mu, sigma)`.
pub fn target_values(spec: FamilySpec, params: Params, named: Option<ModelName>) -> Result<Vec<f64>> {
    match named {
        Some(m) if m.free_params().is_some() => {
            let free = m.free_params().unwrap_or_default();
            let native = to_named(m, spec, params)?;
            Ok(native
                .into_iter()
                .filter(|(k, _)| free.contains(k))
                .map(|(_, v)| v)
                .collect())
        }
        _ => Ok(vec![params.mu(), params.sigma()]),
    }
}

/// Bias-reduced estimate from raw data.
pub fn bootstrap_bias_reduce(
    data: &[f64],
    spec: FamilySpec,
    config: &BootstrapConfig,
    named: Option<ModelName>,
) -> Result<BiasReducedEstimate> {
    let points = h_values(data, spec)?;
    if points.len() < 2 {
        return Err(Error::EmptySample {
            n: points.len(),
            required: 2,
        });
    }
    let raw = params_from_h(&mean_h(&points), spec.delta())?;
    bootstrap_from_points(&points, spec, raw, config, named)
}

/// Bias reduction when the per-observation statistics and the raw fit are
/// already available.
pub fn bootstrap_from_points(
    points: &[HVector],
    spec: FamilySpec,
    raw: Params,
    config: &BootstrapConfig,
    named: Option<ModelName>,
) -> Result<BiasReducedEstimate> {
    let names = target_names(named);
    let raw_values = target_values(spec, raw, named)?;
    let sampler = match config.scheme {
        BootstrapScheme::Parametric => Some(FamilySampler::new(spec, raw)?),
        _ => None,
    };
    let n = points.len();

    let fit = |b: usize| -> Option<Vec<f64>> {
        let mut rng = config.stream.child(b as u64).rng();
        let h = match config.scheme {
            BootstrapScheme::Nonparametric => {
                let mut acc = [0.0; 4];
                for _ in 0..n {
                    let p = &points[rng.random_range(0..n)];
                    acc[0] += p.h1;
                    acc[1] += p.h2;
                    acc[2] += p.h3;
                    acc[3] += p.h4;
                }
                let nf = n as f64;
                HVector::new(acc[0] / nf, acc[1] / nf, acc[2] / nf, acc[3] / nf)
            }
            BootstrapScheme::Parametric => {
                let sampler = sampler.as_ref()?;
                let resample: Vec<HVector> = (0..n)
                    .map(|_| HVector::at_point(spec, sampler.draw(&mut rng)))
                    .collect();
                mean_h(&resample)
            }
            BootstrapScheme::Original => mean_h(points),
        };
        let p = params_from_h(&h, spec.delta()).ok()?;
        target_values(spec, p, named).ok()
    };

    // results land in index order, so the sums below do not depend on scheduling
    let fits: Vec<Option<Vec<f64>>> = (0..config.replicates).into_par_iter().map(fit).collect();

    let k = names.len();
    let mut sum = vec![0.0; k];
    let mut used = 0usize;
    for v in fits.iter().flatten() {
        for (acc, x) in sum.iter_mut().zip(v) {
            *acc += x;
        }
        used += 1;
    }
    let failures = config.replicates - used;
    let required = config.required_successes();
    if used < required {
        return Err(Error::BootstrapDegenerate {
            succeeded: used,
            total: config.replicates,
            required,
        });
    }
    let replicate_mean: Vec<f64> = sum.iter().map(|s| s / used as f64).collect();
    let reduced: Vec<f64> = raw_values
        .iter()
        .zip(&replicate_mean)
        .map(|(r, m)| 2.0 * r - m)
        .collect();
    let negative_reduced = reduced.iter().any(|v| !(*v > 0.0));
    Ok(BiasReducedEstimate {
        names,
        raw: raw_values,
        replicate_mean,
        reduced,
        replicates_used: used,
        failures,
        negative_reduced,
    })
}
