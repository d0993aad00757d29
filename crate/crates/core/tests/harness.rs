//! Re-aggregates the per-replication dump and compares with the metrics.

use std::collections::BTreeMap;

use weighted_expfam::bootstrap::BootstrapScheme;
use weighted_expfam::estimators::estimate;
use weighted_expfam::family::{from_named, ModelName};
use weighted_expfam::model::ModelChoice;
use weighted_expfam::sampling::{sample, SeededStream};
use weighted_expfam::simulation::{
    estimates_csv, metrics_csv, parse_scenario, run_monte_carlo, EstimatorKind, Scenario,
};

type Key = (usize, String, String);

/// Parses `estimates.csv` and computes `(sum, sum of squares about truth, count)`
/// per (cell, estimator, parameter) in a single pass.
fn reaggregate(csv: &str, truth: impl Fn(usize, &str) -> f64) -> BTreeMap<Key, (f64, f64, usize)> {
    let mut lines = csv.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let params = &header[6..];
    let mut acc: BTreeMap<Key, (f64, f64, usize)> = BTreeMap::new();
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        if f[5] != "ok" {
            continue;
        }
        let cell: usize = f[0].parse().unwrap();
        for (k, name) in params.iter().enumerate() {
            let v: f64 = f[6 + k].parse().unwrap();
            let t = truth(cell, name);
            let e = acc.entry((cell, f[4].to_string(), name.to_string())).or_default();
            e.0 += v;
            e.1 += (v - t) * (v - t);
            e.2 += 1;
        }
    }
    acc
}

fn check_against_metrics(scenario: &Scenario) {
    let out = run_monte_carlo(scenario, Some(2)).unwrap();
    let metrics = metrics_csv(&out);
    let dump = estimates_csv(scenario, &out);
    let truth = |cell: usize, name: &str| {
        let (g, _) = scenario.cell(cell);
        let k = out.parameter_names.iter().position(|p| *p == name).unwrap();
        out.truths[g][k]
    };
    let acc = reaggregate(&dump, truth);
    let mut checked = 0;
    for line in metrics.lines().skip(1) {
        let f: Vec<&str> = line.split(',').collect();
        let cell: usize = f[0].parse().unwrap();
        let t: f64 = f[5].parse().unwrap();
        let (rb, rmse): (f64, f64) = (f[6].parse().unwrap(), f[7].parse().unwrap());
        let n_eff: usize = f[8].parse().unwrap();
        let failures: usize = f[9].parse().unwrap();
        assert_eq!(n_eff + failures, scenario.replications);
        assert_eq!(f[10] == "FLAGGED", failures * 4 > scenario.replications);
        match acc.get(&(cell, f[3].to_string(), f[4].to_string())) {
            Some(&(sum, sq, count)) => {
                assert_eq!(count, n_eff);
                let n = count as f64;
                assert!((rb - ((sum / n - t) / t).abs()).abs() <= 1e-12 * rb.max(1e-300).max(1e-12));
                assert!((rmse - (sq / n).sqrt()).abs() <= 1e-12 * rmse.max(1e-12));
            }
            None => assert_eq!(n_eff, 0),
        }
        checked += 1;
    }
    assert_eq!(checked, out.rows.len());
}

#[test]
fn metrics_match_reaggregated_estimates() {
    let scenario = parse_scenario(
        "model = weighted-inverse-lindley\nlambda = 1\nphi = 0.5, 9\nn = 20, 60\n\
         replications = 40\nbootstrap = 30\nestimators = mom, mom_boot, mle\n",
    )
    .unwrap();
    check_against_metrics(&scenario);
}

#[test]
fn unweighted_gamma_metrics_match_reaggregation() {
    let scenario = parse_scenario("model = gamma\nalpha = 0.5, 4\nbeta = 2\nn = 15, 100\nreplications = 50\nestimators = mom\n").unwrap();
    check_against_metrics(&scenario);
}

#[test]
fn single_replication_is_recomputable_by_hand() {
    let scenario = Scenario {
        grid: vec![vec![("lambda".into(), 1.0), ("phi".into(), 3.0)]],
        n_grid: vec![50],
        replications: 1,
        bootstrap: 25,
        scheme: BootstrapScheme::Nonparametric,
        master_seed: 77,
        estimators: vec![EstimatorKind::Mom],
        model: ModelChoice::Named(ModelName::WeightedInverseLindley),
    };
    let out = run_monte_carlo(&scenario, Some(1)).unwrap();
    // replication 0 of cell 0 draws its data from child(0).child(0)
    let m = from_named(ModelName::WeightedInverseLindley, &[("lambda", 1.0), ("phi", 3.0)]).unwrap();
    let data = sample(m.spec, m.params, 50, SeededStream::new(77, 0).child(0).child(0)).unwrap();
    let e = estimate(&data, m.spec).unwrap();
    let (phi_hat, lambda_hat) = (e.mu_hat, e.mu_hat * e.sigma_hat);
    let row = |p: &str| out.rows.iter().find(|r| r.parameter == p).unwrap();
    assert_eq!(row("phi").rb, (phi_hat - 3.0).abs() / 3.0);
    assert_eq!(row("phi").rmse, (phi_hat - 3.0).abs());
    assert!((row("lambda").rb - (lambda_hat - 1.0).abs()).abs() < 1e-15);
}
