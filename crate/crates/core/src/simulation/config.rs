//! Scenario config: `key = value` lines, `#` starts a comment, lists are
//! comma-separated.
//!
//! ```text
//! model = weighted-inverse-lindley
//! lambda = 1
//! phi = 0.5, 1, 3, 5, 9
//! n = 20, 50, 100, 200, 400, 1000
//! replications = 1000
//! bootstrap = 200
//! estimators = mom, mom_boot, mle
//! ```
//!
//! Keys other than the reserved ones below are model parameters; the grid is
//! their Cartesian product, first key outermost.

use super::{EstimatorKind, Scenario};
use crate::bootstrap::BootstrapScheme;
use crate::error::{Error, Result};
use crate::model::ModelChoice;

fn parse_list<T: std::str::FromStr>(key: &str, value: &str, line: usize) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|v| !v.is_empty())
        .map(|v| {
            v.parse()
                .map_err(|_| Error::Config(format!("line {line}: bad value '{v}' for '{key}'")))
        })
        .collect()
}

fn parse_one<T: std::str::FromStr>(key: &str, value: &str, line: usize) -> Result<T> {
    let mut items: Vec<T> = parse_list(key, value, line)?;
    if items.len() != 1 {
        return Err(Error::Config(format!("line {line}: '{key}' takes a single value")));
    }
    Ok(items.remove(0))
}

/// Parses a scenario. Missing keys default to the weighted inverse Lindley
/// study's settings, except `model` and the parameter values, which are
/// required.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let defaults = Scenario::weighted_inverse_lindley_study(0);
    let mut model = None;
    let mut n_grid = None;
    let mut replications = None;
    let mut bootstrap = None;
    let mut scheme = None;
    let mut seed = None;
    let mut estimators = None;
    let mut axes: Vec<(String, Vec<f64>)> = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {line}: expected 'key = value'")))?;
        let key = key.trim().to_ascii_lowercase();
        let value = value.trim();
        let seen = match key.as_str() {
            "model" => model.replace(value.parse::<ModelChoice>()?).is_some(),
            "n" => n_grid.replace(parse_list::<usize>(&key, value, line)?).is_some(),
            "replications" | "n_rep" => {
                replications.replace(parse_one::<usize>(&key, value, line)?).is_some()
            }
            "bootstrap" | "b" => bootstrap.replace(parse_one::<usize>(&key, value, line)?).is_some(),
            "scheme" => scheme.replace(value.parse::<BootstrapScheme>()?).is_some(),
            "seed" => seed.replace(parse_one::<u64>(&key, value, line)?).is_some(),
            "estimators" => estimators
                .replace(parse_list::<EstimatorKind>(&key, value, line)?)
                .is_some(),
            _ => {
                let values = parse_list::<f64>(&key, value, line)?;
                if values.is_empty() {
                    return Err(Error::Config(format!("line {line}: '{key}' has no values")));
                }
                let dup = axes.iter().any(|(k, _)| *k == key);
                if !dup {
                    axes.push((key.clone(), values));
                }
                dup
            }
        };
        if seen {
            return Err(Error::Config(format!("line {line}: '{key}' given twice")));
        }
    }

    let model = model.ok_or_else(|| Error::Config("missing 'model'".into()))?;
    if axes.is_empty() {
        return Err(Error::Config("no model parameters given".into()));
    }
    let mut grid: Vec<Vec<(String, f64)>> = vec![Vec::new()];
    for (key, values) in &axes {
        grid = grid
            .into_iter()
            .flat_map(|point| {
                values.iter().map(move |&v| {
                    let mut p = point.clone();
                    p.push((key.clone(), v));
                    p
                })
            })
            .collect();
    }

    let mut estimators = estimators.unwrap_or(defaults.estimators);
    estimators.dedup();
    let scenario = Scenario {
        model,
        grid,
        n_grid: n_grid.unwrap_or(defaults.n_grid),
        replications: replications.unwrap_or(defaults.replications),
        bootstrap: bootstrap.unwrap_or(defaults.bootstrap),
        scheme: scheme.unwrap_or(defaults.scheme),
        master_seed: seed.unwrap_or(defaults.master_seed),
        estimators,
    };
    scenario.validate()?;
    Ok(scenario)
}
