//! Monte Carlo evaluation of the estimators: relative bias and RMSE over a
//! grid of true parameters and sample sizes.
//!
//! Cell `c` enumerates (grid point, sample size) pairs, grid point outermost.
//! Replication `r` of cell `c` draws its data from
//! `SeededStream::new(seed, c).child(r).child(0)` and its bootstrap
//! resamples from `...child(r).child(1)`, so the output does not depend on
//! how work is scheduled across threads.

mod config;
mod report;

pub use config::parse_scenario;
pub use report::{
    estimates_csv, fmt_f64, metrics_csv, write_outputs, ESTIMATES_HEADER, METRICS_HEADER,
};

use rayon::prelude::*;

use crate::bootstrap::{bootstrap_from_points, target_names, target_values, BootstrapConfig, BootstrapScheme};
use crate::error::{Error, Result};
use crate::estimators::{mean_h, mle_numeric, params_from_h};
use crate::model::{ModelChoice, ResolvedModel};
use crate::moments::HVector;
use crate::sampling::{FamilySampler, SeededStream};

/// Cells where more than this fraction of replications fail are flagged.
pub const FAILURE_FLAG_FRACTION: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EstimatorKind {
    /// Closed-form moment-type estimator.
    Mom,
    /// Bootstrap bias-reduced moment-type estimator.
    MomBoot,
    /// Numerical maximum likelihood.
    Mle,
}

impl EstimatorKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Self::Mom => "mom",
            Self::MomBoot => "mom_boot",
            Self::Mle => "mle",
        }
    }
}

impl std::str::FromStr for EstimatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "mom" => Ok(Self::Mom),
            "mom_boot" | "boot" => Ok(Self::MomBoot),
            "mle" => Ok(Self::Mle),
            other => Err(Error::Config(format!("unknown estimator '{other}'"))),
        }
    }
}

/// One simulation study.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub model: ModelChoice,
    /// True parameter sets, each a list of `(name, value)` pairs.
    pub grid: Vec<Vec<(String, f64)>>,
    pub n_grid: Vec<usize>,
    pub replications: usize,
    pub bootstrap: usize,
    pub scheme: BootstrapScheme,
    pub master_seed: u64,
    pub estimators: Vec<EstimatorKind>,
}

impl Scenario {
    /// The weighted inverse Lindley study: `lambda = 1`,
    /// `phi in {0.5, 1, 3, 5, 9}`, `n in {20, 50, 100, 200, 400, 1000}`,
    /// `N = 1000`, `B = 200`.
    pub fn weighted_inverse_lindley_study(master_seed: u64) -> Self {
        Self {
            model: ModelChoice::Named(crate::family::ModelName::WeightedInverseLindley),
            grid: [0.5, 1.0, 3.0, 5.0, 9.0]
                .iter()
                .map(|&phi| vec![("lambda".to_string(), 1.0), ("phi".to_string(), phi)])
                .collect(),
            n_grid: vec![20, 50, 100, 200, 400, 1000],
            replications: 1000,
            bootstrap: 200,
            scheme: BootstrapScheme::Nonparametric,
            master_seed,
            estimators: vec![EstimatorKind::Mom, EstimatorKind::MomBoot, EstimatorKind::Mle],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.grid.is_empty() {
            return Err(Error::Config("parameter grid is empty".into()));
        }
        if self.n_grid.is_empty() || self.n_grid.iter().any(|&n| n < 2) {
            return Err(Error::Config("sample sizes must be given and at least 2".into()));
        }
        if self.replications == 0 {
            return Err(Error::Config("replications must be at least 1".into()));
        }
        if self.bootstrap == 0 && self.estimators.contains(&EstimatorKind::MomBoot) {
            return Err(Error::Config("bootstrap replicates must be at least 1".into()));
        }
        if self.estimators.is_empty() {
            return Err(Error::Config("no estimators selected".into()));
        }
        for point in &self.grid {
            for (k, v) in point {
                if !(v.is_finite() && (*v > 0.0 || k == "s" || k == "delta")) {
                    return Err(Error::Config(format!("grid value {k} = {v} must be positive")));
                }
            }
            self.model.resolve(point)?;
        }
        Ok(())
    }

    pub fn cell_count(&self) -> usize {
        self.grid.len() * self.n_grid.len()
    }

    /// `(grid index, sample size)` of cell `c`.
    pub fn cell(&self, c: usize) -> (usize, usize) {
        (c / self.n_grid.len(), self.n_grid[c % self.n_grid.len()])
    }
}

/// Aggregated metrics for one (cell, estimator, parameter).
#[derive(Debug, Clone, PartialEq)]
pub struct MetricRow {
    pub cell: usize,
    /// The grid point as `k=v;k=v`.
    pub grid: String,
    pub n: usize,
    pub estimator: EstimatorKind,
    pub parameter: &'static str,
    pub true_value: f64,
    /// `|mean(estimates) - truth| / |truth|`.
    pub rb: f64,
    /// `sqrt(mean((estimate - truth)^2))`.
    pub rmse: f64,
    pub n_effective: usize,
    pub failures: usize,
    pub flagged: bool,
}

/// One replication's result for one estimator; `None` values mark failures.
#[derive(Debug, Clone, PartialEq)]
pub struct EstimateRecord {
    pub cell: usize,
    pub replication: usize,
    pub estimator: EstimatorKind,
    pub values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloOutput {
    pub parameter_names: Vec<&'static str>,
    pub truths: Vec<Vec<f64>>,
    pub rows: Vec<MetricRow>,
    pub estimates: Vec<EstimateRecord>,
}

pub fn grid_label(point: &[(String, f64)]) -> String {
    point
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(";")
}

fn replicate(
    scenario: &Scenario,
    model: &ResolvedModel,
    n: usize,
    stream: SeededStream,
) -> Vec<Option<Vec<f64>>> {
    let spec = model.spec;
    let named = model.named;
    let sampler = FamilySampler::new(spec, model.params).expect("validated model");
    let mut rng = stream.child(0).rng();
    let data: Vec<f64> = (0..n).map(|_| sampler.draw(&mut rng)).collect();
    let points: Vec<HVector> = data.iter().map(|&x| HVector::at_point(spec, x)).collect();
    let raw = params_from_h(&mean_h(&points), spec.delta());

    scenario
        .estimators
        .iter()
        .map(|kind| match kind {
            EstimatorKind::Mom => raw
                .as_ref()
                .ok()
                .and_then(|p| target_values(spec, *p, named).ok()),
            EstimatorKind::MomBoot => {
                let p = raw.as_ref().ok()?;
                let cfg = BootstrapConfig::new(scenario.bootstrap, scenario.scheme, stream.child(1)).ok()?;
                bootstrap_from_points(&points, spec, *p, &cfg, named)
                    .ok()
                    .map(|b| b.reduced)
            }
            EstimatorKind::Mle => mle_numeric(&data, spec, raw.as_ref().ok().copied())
                .ok()
                .and_then(|fit| target_values(spec, fit.params, named).ok()),
        })
        .collect()
}

/// Runs the study on `threads` worker threads (`None` = all hardware threads).
pub fn run_monte_carlo(scenario: &Scenario, threads: Option<usize>) -> Result<MonteCarloOutput> {
    scenario.validate()?;
    let models: Vec<ResolvedModel> = scenario
        .grid
        .iter()
        .map(|p| scenario.model.resolve(p))
        .collect::<Result<_>>()?;
    let named = scenario.model.named();
    let parameter_names = target_names(named);
    let truths: Vec<Vec<f64>> = models
        .iter()
        .map(|m| target_values(m.spec, m.params, named))
        .collect::<Result<_>>()?;

    let reps = scenario.replications;
    let jobs = scenario.cell_count() * reps;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker threads: {e}")))?;
    let results: Vec<Vec<Option<Vec<f64>>>> = pool.install(|| {
        (0..jobs)
            .into_par_iter()
            .map(|job| {
                let (c, r) = (job / reps, job % reps);
                let (g, n) = scenario.cell(c);
                let stream = SeededStream::new(scenario.master_seed, c as u64).child(r as u64);
                replicate(scenario, &models[g], n, stream)
            })
            .collect()
    });

    let mut estimates = Vec::with_capacity(jobs * scenario.estimators.len());
    for (job, per_estimator) in results.iter().enumerate() {
        for (kind, values) in scenario.estimators.iter().zip(per_estimator) {
            estimates.push(EstimateRecord {
                cell: job / reps,
                replication: job % reps,
                estimator: *kind,
                values: values.clone(),
            });
        }
    }

    let mut rows = Vec::new();
    for c in 0..scenario.cell_count() {
        let (g, n) = scenario.cell(c);
        for (e, kind) in scenario.estimators.iter().enumerate() {
            let cell_results = &results[c * reps..(c + 1) * reps];
            let ok: Vec<&Vec<f64>> = cell_results.iter().filter_map(|r| r[e].as_ref()).collect();
            let failures = reps - ok.len();
            let flagged = failures as f64 > FAILURE_FLAG_FRACTION * reps as f64;
            for (k, name) in parameter_names.iter().enumerate() {
                let truth = truths[g][k];
                let (rb, rmse) = relative_bias_and_rmse(ok.iter().map(|v| v[k]), truth);
                rows.push(MetricRow {
                    cell: c,
                    grid: grid_label(&scenario.grid[g]),
                    n,
                    estimator: *kind,
                    parameter: name,
                    true_value: truth,
                    rb,
                    rmse,
                    n_effective: ok.len(),
                    failures,
                    flagged,
                });
            }
        }
    }

    Ok(MonteCarloOutput {
        parameter_names,
        truths,
        rows,
        estimates,
    })
}

/// `(|mean - truth| / |truth|, sqrt(mean((x - truth)^2)))`; NaN for no values.
pub fn relative_bias_and_rmse<I: IntoIterator<Item = f64>>(values: I, truth: f64) -> (f64, f64) {
    let (mut sum, mut sq, mut count) = (0.0, 0.0, 0usize);
    for v in values {
        sum += v;
        sq += (v - truth) * (v - truth);
        count += 1;
    }
    if count == 0 {
        return (f64::NAN, f64::NAN);
    }
    let n = count as f64;
    (((sum / n) - truth).abs() / truth.abs(), (sq / n).sqrt())
}
