//! CSV output of a Monte Carlo run.

use std::fmt::Write as _;
use std::path::Path;

use super::{EstimatorKind, MonteCarloOutput, Scenario};
use crate::error::{Error, Result};

pub const METRICS_HEADER: &str =
    "cell,grid,n,estimator,parameter,true_value,rb,rmse,n_effective,failures,flagged";
/// Followed by one column per target parameter.
pub const ESTIMATES_HEADER: &str = "cell,grid,n,replication,estimator,status";

/// 17 significant digits, enough to round-trip any `f64`.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else {
        format!("{v:.16e}")
    }
}

fn quote(field: &str) -> String {
    if field.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

pub fn metrics_csv(out: &MonteCarloOutput) -> String {
    let mut s = String::new();
    s.push_str(METRICS_HEADER);
    s.push('\n');
    for r in &out.rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{}",
            r.cell,
            quote(&r.grid),
            r.n,
            r.estimator.as_str(),
            r.parameter,
            fmt_f64(r.true_value),
            fmt_f64(r.rb),
            fmt_f64(r.rmse),
            r.n_effective,
            r.failures,
            if r.flagged { "FLAGGED" } else { "" }
        );
    }
    s
}

pub fn estimates_csv(scenario: &Scenario, out: &MonteCarloOutput) -> String {
    let mut s = String::new();
    s.push_str(ESTIMATES_HEADER);
    for name in &out.parameter_names {
        s.push(',');
        s.push_str(name);
    }
    s.push('\n');
    for e in &out.estimates {
        let (g, n) = scenario.cell(e.cell);
        let _ = write!(
            s,
            "{},{},{},{},{},{}",
            e.cell,
            quote(&super::grid_label(&scenario.grid[g])),
            n,
            e.replication,
            e.estimator.as_str(),
            if e.values.is_some() { "ok" } else { "failed" }
        );
        for k in 0..out.parameter_names.len() {
            s.push(',');
            if let Some(v) = &e.values {
                s.push_str(&fmt_f64(v[k]));
            }
        }
        s.push('\n');
    }
    s
}

/// Writes `metrics.csv` and `estimates.csv` into `dir`, creating it if needed.
pub fn write_outputs(dir: &Path, scenario: &Scenario, out: &MonteCarloOutput) -> Result<()> {
    let io = |e: std::io::Error| Error::Config(format!("cannot write to {}: {e}", dir.display()));
    std::fs::create_dir_all(dir).map_err(io)?;
    std::fs::write(dir.join("metrics.csv"), metrics_csv(out)).map_err(io)?;
    std::fs::write(dir.join("estimates.csv"), estimates_csv(scenario, out)).map_err(io)?;
    Ok(())
}

impl std::fmt::Display for EstimatorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, 1e-300, 123456.789, f64::MIN_POSITIVE] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(fmt_f64(f64::NAN), "NaN");
    }

    #[test]
    fn grid_labels_are_quoted_only_when_needed() {
        assert_eq!(quote("lambda=1;phi=3"), "lambda=1;phi=3");
        assert_eq!(quote("a,b"), "\"a,b\"");
    }
}
