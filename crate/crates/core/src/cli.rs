//! The `simcli` command line.
//!
//! Exit codes: 0 success, 1 usage error, 2 data or config error,
//! 3 estimation failure.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::bootstrap::{bootstrap_bias_reduce, BootstrapConfig, BootstrapScheme};
use crate::error::Error;
use crate::estimators::{estimate_with, mle_numeric, EstimateOptions};
use crate::model::{parse_params, ModelChoice};
use crate::moments::{moment, population_h};
use crate::sampling::{sample, SeededStream};
use crate::simulation::{fmt_f64, parse_scenario, run_monte_carlo, write_outputs};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_ESTIMATION: i32 = 3;

/// Environment variable giving the default worker thread count.
pub const THREADS_ENV: &str = "SIMCLI_THREADS";

#[derive(Debug, Parser)]
#[command(name = "simcli", version, about = "Sampling, estimation and Monte Carlo studies for the weighted exponential family")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Draw a sample, one value per line.
    Sample {
        #[arg(long)]
        model: String,
        /// Parameters as `k=v,k=v`.
        #[arg(long, allow_hyphen_values = true)]
        params: String,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output file; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Fit a model to a data file and print a CSV report.
    Estimate {
        #[arg(long)]
        model: String,
        /// One positive number per line; `#` starts a comment.
        #[arg(long)]
        data: PathBuf,
        /// Generator parameters the model needs (e.g. `delta=2` for weibull,
        /// `s=..,delta=..` for family).
        #[arg(long, default_value = "", allow_hyphen_values = true)]
        params: String,
        /// Bootstrap replicates for bias reduction.
        #[arg(long)]
        bootstrap: Option<usize>,
        #[arg(long, default_value = "nonparametric")]
        scheme: String,
        /// Also fit by numerical maximum likelihood.
        #[arg(long)]
        mle: bool,
        /// Confidence level of the Wald intervals.
        #[arg(long, default_value_t = 0.95)]
        ci: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the population h-vector and moments `E[X^q]` as CSV.
    Moments {
        #[arg(long)]
        model: String,
        #[arg(long, allow_hyphen_values = true)]
        params: String,
        /// Comma-separated powers.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        q: Vec<f64>,
    },
    /// Run a Monte Carlo study and write metrics.csv and estimates.csv.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        seed: u64,
        /// Worker threads; defaults to all hardware threads.
        #[arg(long, env = THREADS_ENV)]
        threads: Option<usize>,
    },
}

/// A failure with its exit code.
#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn data(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_DATA,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidParameter(_)
            | Error::UnknownModel(_)
            | Error::ModelMismatch(_)
            | Error::Domain(_)
            | Error::MomentUndefined(_) => EXIT_USAGE,
            Error::Config(_) | Error::NonPositiveData { .. } | Error::EmptySample { .. } => EXIT_DATA,
            Error::EstimationFailed(_)
            | Error::BootstrapDegenerate { .. }
            | Error::OptimizationFailed { .. } => EXIT_ESTIMATION,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let stdout = std::io::stdout();
    match dispatch(cli.command, &mut stdout.lock()) {
        Ok(()) => EXIT_OK,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> Result<(), Failure> {
    match command {
        Command::Sample {
            model,
            params,
            n,
            seed,
            out: path,
        } => cmd_sample(&model, &params, n, seed, path.as_deref(), out),
        Command::Estimate {
            model,
            data,
            params,
            bootstrap,
            scheme,
            mle,
            ci,
            seed,
        } => cmd_estimate(&model, &data, &params, bootstrap, &scheme, mle, ci, seed, out),
        Command::Moments { model, params, q } => cmd_moments(&model, &params, &q, out),
        Command::Simulate {
            config,
            out: dir,
            seed,
            threads,
        } => cmd_simulate(&config, &dir, seed, threads, out),
    }
}

fn io_error(e: std::io::Error) -> Failure {
    Failure::data(format!("i/o error: {e}"))
}

fn parse_model(name: &str) -> Result<ModelChoice, Failure> {
    name.parse().map_err(|e: Error| Failure::usage(e.to_string()))
}

fn cmd_sample(
    model: &str,
    params: &str,
    n: usize,
    seed: u64,
    path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let choice = parse_model(model)?;
    let resolved = choice.resolve(&parse_params(params).map_err(|e| Failure::usage(e.to_string()))?)?;
    if n == 0 {
        return Err(Failure::usage("--n must be at least 1"));
    }
    let xs = sample(resolved.spec, resolved.params, n, SeededStream::new(seed, 0))?;
    let mut text = String::with_capacity(n * 24);
    for x in xs {
        text.push_str(&fmt_f64(x));
        text.push('\n');
    }
    match path {
        Some(p) => std::fs::write(p, text).map_err(io_error),
        None => out.write_all(text.as_bytes()).map_err(io_error),
    }
}

/// Reads one positive number per line; blank lines and `#` comments are
/// skipped. Errors cite the 1-based line number.
pub fn read_data(path: &Path) -> Result<Vec<f64>, String> {
    let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_data(&text)
}

pub fn parse_data(text: &str) -> Result<Vec<f64>, String> {
    let mut data = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let line = i + 1;
        let x: f64 = content
            .parse()
            .map_err(|_| format!("line {line}: '{content}' is not a number"))?;
        if !(x > 0.0 && x.is_finite()) {
            return Err(format!("line {line}: {content} is not a positive finite number"));
        }
        data.push(x);
    }
    Ok(data)
}

#[allow(clippy::too_many_arguments)]
fn cmd_estimate(
    model: &str,
    data_path: &Path,
    params: &str,
    bootstrap: Option<usize>,
    scheme: &str,
    mle: bool,
    ci: f64,
    seed: u64,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    let choice = parse_model(model)?;
    let params = parse_params(params).map_err(|e| Failure::usage(e.to_string()))?;
    let spec = choice.spec(&params).map_err(|e| Failure::usage(e.to_string()))?;
    let scheme: BootstrapScheme = scheme.parse().map_err(|e: Error| Failure::usage(e.to_string()))?;
    if !(ci > 0.0 && ci < 1.0) {
        return Err(Failure::usage(format!("--ci must lie in (0, 1), got {ci}")));
    }
    let boot_cfg = match bootstrap {
        Some(b) => Some(
            BootstrapConfig::new(b, scheme, SeededStream::new(seed, 1))
                .map_err(|e| Failure::usage(e.to_string()))?,
        ),
        None => None,
    };
    let data = read_data(data_path).map_err(Failure::data)?;

    let named = choice.named();
    let report = estimate_with(
        &data,
        spec,
        &EstimateOptions {
            ci_level: ci,
            model: named,
        },
    )?;

    let mut header: Vec<String> = vec!["n".into(), "mu_hat".into(), "sigma_hat".into()];
    let mut row: Vec<String> = vec![
        report.n.to_string(),
        fmt_f64(report.mu_hat),
        fmt_f64(report.sigma_hat),
    ];
    if let Some(native) = &report.native_estimates {
        for (k, v) in native {
            header.push(format!("{k}_hat"));
            row.push(fmt_f64(*v));
        }
    }
    header.extend(
        ["var_mu", "cov_mu_sigma", "var_sigma", "ci_level", "mu_lower", "mu_upper", "sigma_lower", "sigma_upper"]
            .map(String::from),
    );
    match &report.inference {
        Some(inf) => {
            row.extend([
                fmt_f64(inf.covariance[0][0]),
                fmt_f64(inf.covariance[0][1]),
                fmt_f64(inf.covariance[1][1]),
            ]);
            row.push(ci.to_string());
            row.extend([
                fmt_f64(inf.ci_mu.lower),
                fmt_f64(inf.ci_mu.upper),
                fmt_f64(inf.ci_sigma.lower),
                fmt_f64(inf.ci_sigma.upper),
            ]);
        }
        None => {
            row.extend(std::iter::repeat_n(String::new(), 3));
            row.push(ci.to_string());
            row.extend(std::iter::repeat_n(String::new(), 4));
        }
    }
    if let Some(cfg) = boot_cfg {
        let b = bootstrap_bias_reduce(&data, spec, &cfg, named)?;
        for (name, v) in b.names.iter().zip(&b.reduced) {
            header.push(format!("{name}_boot"));
            row.push(fmt_f64(*v));
        }
        header.extend(["boot_used", "boot_failures"].map(String::from));
        row.extend([b.replicates_used.to_string(), b.failures.to_string()]);
    }
    if mle {
        let fit = mle_numeric(&data, spec, Some(report.params()))?;
        header.extend(["mu_mle", "sigma_mle", "mle_mean_loglik"].map(String::from));
        row.extend([
            fmt_f64(fit.params.mu()),
            fmt_f64(fit.params.sigma()),
            fmt_f64(fit.mean_log_likelihood),
        ]);
    }
    writeln!(out, "{}\n{}", header.join(","), row.join(",")).map_err(io_error)
}

fn cmd_moments(model: &str, params: &str, qs: &[f64], out: &mut dyn Write) -> Result<(), Failure> {
    let choice = parse_model(model)?;
    let resolved = choice.resolve(&parse_params(params).map_err(|e| Failure::usage(e.to_string()))?)?;
    let h = population_h(resolved.spec, resolved.params);
    let mut text = String::from("quantity,value\n");
    for (name, v) in ["h1", "h2", "h3", "h4"].iter().zip(h.to_array()) {
        text.push_str(&format!("{name},{}\n", fmt_f64(v)));
    }
    for &q in qs {
        let m = moment(resolved.spec, resolved.params, q)?;
        text.push_str(&format!("E[X^{q}],{}\n", fmt_f64(m)));
    }
    out.write_all(text.as_bytes()).map_err(io_error)
}

fn cmd_simulate(
    config: &Path,
    dir: &Path,
    seed: u64,
    threads: Option<usize>,
    out: &mut dyn Write,
) -> Result<(), Failure> {
    if threads == Some(0) {
        return Err(Failure::usage("--threads must be at least 1"));
    }
    let text = std::fs::read_to_string(config)
        .map_err(|e| Failure::data(format!("cannot read {}: {e}", config.display())))?;
    let mut scenario = parse_scenario(&text)?;
    scenario.master_seed = seed;
    let result = run_monte_carlo(&scenario, threads)?;
    write_outputs(dir, &scenario, &result)?;
    let flagged = result.rows.iter().filter(|r| r.flagged).count();
    writeln!(
        out,
        "wrote {} metric rows and {} estimates to {} ({} flagged)",
        result.rows.len(),
        result.estimates.len(),
        dir.display(),
        flagged
    )
    .map_err(io_error)
}
