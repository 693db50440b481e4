//! Command-line front end: `estimate`, `entropy` and `sweep`.
//!
//! Exit codes are 0 on success, 1 for usage or data errors and 2 when the
//! estimator itself fails (for example on coincident points).

use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde::Serialize;

use crate::copula::{RankScaling, TiePolicy};
use crate::data::{self, SampleMatrix};
use crate::error::{Error, Result};
use crate::estimators::{self, EntropyEstimate, EstimatorConfig, MIEstimate, Method};
use crate::knn::{Backend, NormKind};
use crate::synth::{self, GaussianSpec};

/// Environment variable holding the worker-thread count. Unset or empty
/// means one thread per core.
pub const THREADS_ENV: &str = "COPENT_THREADS";

pub const SWEEP_CSV_HEADER: &str = "rho,analytic_mi,copent_mean,copent_sd,ksg_mean,ksg_sd";

#[derive(Debug, Parser)]
#[command(
    name = "copent",
    version,
    about = "Mutual information via copula entropy"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate mutual information between columns of a CSV file
    Estimate(EstimateArgs),
    /// Estimate differential entropy (or copula entropy) of a CSV file
    Entropy(EntropyArgs),
    /// Run the correlated-Gaussian benchmark sweep
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Args)]
pub struct EstimatorArgs {
    /// Neighbor order
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long, default_value = "chebyshev", value_parser = clap::value_parser!(NormKind))]
    pub norm: NormKind,
    /// Denominator for scaled ranks: T or T+1
    #[arg(long = "rank-scale", default_value = "T+1", value_parser = clap::value_parser!(RankScaling))]
    pub rank_scale: RankScaling,
    /// Tie handling in the rank transform: occurrence or average
    #[arg(long, default_value = "occurrence", value_parser = clap::value_parser!(TiePolicy))]
    pub ties: TiePolicy,
    #[arg(long, default_value = "kdtree", value_parser = clap::value_parser!(Backend))]
    pub backend: Backend,
}

impl EstimatorArgs {
    pub fn config(&self) -> EstimatorConfig {
        EstimatorConfig {
            k: self.k,
            norm: self.norm,
            rank_scaling: self.rank_scale,
            tie_policy: self.ties,
            backend: self.backend,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    pub input: PathBuf,
    /// Comma-separated 0-based column indices or header names
    #[arg(long)]
    pub columns: Option<String>,
    /// Treat the first data line as a header (detected automatically otherwise)
    #[arg(long, conflicts_with = "no_header")]
    pub header: bool,
    #[arg(long)]
    pub no_header: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SweepFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct EstimateArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value = "copent", value_parser = clap::value_parser!(Method))]
    pub method: Method,
    #[command(flatten)]
    pub estimator: EstimatorArgs,
    /// Also report the value in bits
    #[arg(long)]
    pub bits: bool,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    pub format: ReportFormat,
}

#[derive(Debug, Clone, Args)]
pub struct EntropyArgs {
    #[command(flatten)]
    pub input: InputArgs,
    /// Estimate the entropy of the empirical copula instead of the raw data
    #[arg(long)]
    pub copula: bool,
    #[command(flatten)]
    pub estimator: EstimatorArgs,
    #[arg(long)]
    pub bits: bool,
    #[arg(long, value_enum, default_value_t = ReportFormat::Text)]
    pub format: ReportFormat,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    /// Samples per trial
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = 30)]
    pub trials: usize,
    #[arg(long = "rho-min", default_value_t = 0.0, allow_negative_numbers = true)]
    pub rho_min: f64,
    #[arg(long = "rho-max", default_value_t = 0.9, allow_negative_numbers = true)]
    pub rho_max: f64,
    #[arg(long = "rho-step", default_value_t = 0.1)]
    pub rho_step: f64,
    /// Base seed; trial i uses seed + i
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[command(flatten)]
    pub estimator: EstimatorArgs,
    /// Output file (stdout when omitted)
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = SweepFormat::Csv)]
    pub format: SweepFormat,
    /// Report MI columns in bits instead of nats
    #[arg(long)]
    pub bits: bool,
}

/// Inclusive ρ grid from `min` to `max`. Values are rounded to 12 decimals
/// so that e.g. 0.1 * 3 prints as 0.3.
pub fn rho_grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    if step.is_nan() || step <= 0.0 || !min.is_finite() || !max.is_finite() || max < min {
        return Err(Error::InvalidArgument(format!(
            "invalid rho range {min}..={max} step {step}"
        )));
    }
    let count = ((max - min) / step + 1e-9).floor() as usize + 1;
    Ok((0..count)
        .map(|i| ((min + i as f64 * step) * 1e12).round() / 1e12)
        .collect())
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub rho_values: Vec<f64>,
    pub samples: usize,
    pub trials: usize,
    pub base_seed: u64,
    pub estimator: EstimatorConfig,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            rho_values: rho_grid(0.0, 0.9, 0.1).expect("default grid is valid"),
            samples: 1000,
            trials: 30,
            base_seed: 1,
            estimator: EstimatorConfig::default(),
        }
    }
}

impl SweepConfig {
    fn check(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidArgument("trials must be at least 1".into()));
        }
        if self.rho_values.is_empty() {
            return Err(Error::InvalidArgument("no rho values to sweep".into()));
        }
        for &rho in &self.rho_values {
            if rho.is_nan() || rho.abs() >= 1.0 {
                return Err(Error::InvalidRho(rho));
            }
        }
        if self.samples <= self.estimator.k {
            return Err(Error::TooFewSamples {
                k: self.estimator.k,
                samples: self.samples,
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub rho: f64,
    pub analytic_mi: f64,
    pub copent_mean: f64,
    pub copent_sd: f64,
    pub ksg_mean: f64,
    pub ksg_sd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepMetadata {
    pub samples: usize,
    pub k: usize,
    pub trials: usize,
    pub seed: u64,
    pub norm: NormKind,
    pub rank_scaling: RankScaling,
    pub tie_policy: TiePolicy,
    pub units: &'static str,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub metadata: SweepMetadata,
    pub rows: Vec<SweepRow>,
}

/// Mean and sample standard deviation (zero for a single value).
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Runs `trials` seeded samples per ρ and summarizes both estimators.
///
/// Trial `i` at every ρ draws from seed `base_seed + i`, so both estimators
/// see the same sample set and results do not depend on scheduling.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepResult> {
    config.check()?;
    let est = &config.estimator;
    // KSG is only defined for the chebyshev norm; the copula side follows
    // the configured norm.
    let ksg_config = EstimatorConfig {
        norm: NormKind::Chebyshev,
        ..*est
    };
    let mut rows = Vec::with_capacity(config.rho_values.len());
    for &rho in &config.rho_values {
        let pairs: Vec<(f64, f64)> = (0..config.trials)
            .into_par_iter()
            .map(|trial| {
                let spec = GaussianSpec::new(
                    rho,
                    config.samples,
                    config.base_seed.wrapping_add(trial as u64),
                )?;
                let m = synth::gaussian_sample(&spec)?;
                let c = estimators::mi_copula(&m, est)?.nats;
                let k = estimators::mi_ksg(&m, &ksg_config)?.nats;
                Ok((c, k))
            })
            .collect::<Result<_>>()?;
        let copent: Vec<f64> = pairs.iter().map(|p| p.0).collect();
        let ksg: Vec<f64> = pairs.iter().map(|p| p.1).collect();
        let (copent_mean, copent_sd) = mean_sd(&copent);
        let (ksg_mean, ksg_sd) = mean_sd(&ksg);
        rows.push(SweepRow {
            rho,
            analytic_mi: synth::gaussian_mi_analytic(rho)?,
            copent_mean,
            copent_sd,
            ksg_mean,
            ksg_sd,
        });
    }
    Ok(SweepResult {
        metadata: SweepMetadata {
            samples: config.samples,
            k: est.k,
            trials: config.trials,
            seed: config.base_seed,
            norm: est.norm,
            rank_scaling: est.rank_scaling,
            tie_policy: est.tie_policy,
            units: "nats",
        },
        rows,
    })
}

impl SweepResult {
    pub fn into_bits(mut self) -> Self {
        let f = std::f64::consts::LN_2;
        for r in &mut self.rows {
            r.analytic_mi /= f;
            r.copent_mean /= f;
            r.copent_sd /= f;
            r.ksg_mean /= f;
            r.ksg_sd /= f;
        }
        self.metadata.units = "bits";
        self
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from(SWEEP_CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                r.rho, r.analytic_mi, r.copent_mean, r.copent_sd, r.ksg_mean, r.ksg_sd
            )
            .unwrap();
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("sweep result serializes");
        s.push('\n');
        s
    }
}

fn load(input: &InputArgs) -> Result<SampleMatrix> {
    let text = std::fs::read_to_string(&input.input)
        .map_err(|e| Error::Io(format!("{}: {e}", input.input.display())))?;
    let has_header = if input.header {
        true
    } else if input.no_header {
        false
    } else {
        data::sniff_header(&text)
    };
    let columns = match &input.columns {
        Some(list) => {
            let header: Option<Vec<String>> = if has_header {
                text.lines()
                    .map(str::trim)
                    .find(|l| !l.is_empty() && !l.starts_with('#'))
                    .map(|l| l.split(',').map(|f| f.trim().to_string()).collect())
            } else {
                None
            };
            let specs = data::parse_column_list(list, header.as_deref())?;
            let mut seen = std::collections::HashSet::new();
            for s in &specs {
                if !seen.insert(s.index) {
                    return Err(Error::DuplicateColumn(s.index));
                }
            }
            Some(specs)
        }
        None => None,
    };
    let m = data::parse_csv(&text, has_header, columns.as_deref())?;
    for finding in data::validate(&m) {
        eprintln!("warning: {finding}");
    }
    Ok(m)
}

#[derive(Serialize)]
struct Report<'a> {
    method: Method,
    nats: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    bits: Option<f64>,
    samples: usize,
    variables: usize,
    k: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    config: Option<&'a EstimatorConfig>,
}

fn render(report: &Report<'_>, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => {
            let mut s = serde_json::to_string_pretty(report).expect("report serializes");
            s.push('\n');
            s
        }
        ReportFormat::Text => {
            let mut s = String::new();
            writeln!(s, "method: {}", report.method).unwrap();
            writeln!(s, "nats: {:.6}", report.nats).unwrap();
            if let Some(b) = report.bits {
                writeln!(s, "bits: {b:.6}").unwrap();
            }
            writeln!(s, "T: {}", report.samples).unwrap();
            writeln!(s, "N: {}", report.variables).unwrap();
            writeln!(s, "k: {}", report.k).unwrap();
            s
        }
    }
}

pub fn estimate(args: &EstimateArgs) -> Result<(MIEstimate, String)> {
    let m = load(&args.input)?;
    let config = args.estimator.config();
    let est = match args.method {
        Method::Ksg => estimators::mi_ksg(&m, &config)?,
        _ => estimators::mi_copula(&m, &config)?,
    };
    let report = Report {
        method: est.method,
        nats: est.nats,
        bits: args.bits.then(|| est.nats / std::f64::consts::LN_2),
        samples: m.rows(),
        variables: m.cols(),
        k: config.k,
        config: Some(&config),
    };
    let text = render(&report, args.format);
    Ok((est, text))
}

pub fn entropy(args: &EntropyArgs) -> Result<(EntropyEstimate, String)> {
    let m = load(&args.input)?;
    let config = args.estimator.config();
    let est = if args.copula {
        estimators::copula_entropy(&m, &config)?
    } else {
        estimators::kl_entropy(m.points(), &config)?
    };
    let report = Report {
        method: est.method,
        nats: est.nats,
        bits: args.bits.then(|| est.nats / std::f64::consts::LN_2),
        samples: est.samples,
        variables: est.dim,
        k: est.k,
        config: Some(&config),
    };
    let text = render(&report, args.format);
    Ok((est, text))
}

pub fn sweep(args: &SweepArgs) -> Result<SweepResult> {
    let config = SweepConfig {
        rho_values: rho_grid(args.rho_min, args.rho_max, args.rho_step)?,
        samples: args.samples,
        trials: args.trials,
        base_seed: args.seed,
        estimator: args.estimator.config(),
    };
    let mut result = run_sweep(&config)?;
    if args.bits {
        result = result.into_bits();
    }
    let body = match args.format {
        SweepFormat::Csv => result.to_csv(),
        SweepFormat::Json => result.to_json(),
    };
    write_output(args.output.as_deref(), &body)?;
    Ok(result)
}

fn write_output(path: Option<&Path>, body: &str) -> Result<()> {
    match path {
        Some(p) => std::fs::write(p, body).map_err(|e| Error::Io(format!("{}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(body.as_bytes())
            .map_err(Error::from),
    }
}

/// Worker-thread count from [`THREADS_ENV`], if set.
pub fn threads_from_env() -> Result<Option<usize>> {
    match std::env::var(THREADS_ENV) {
        Ok(v) if !v.trim().is_empty() => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(Error::InvalidArgument(format!(
                "{THREADS_ENV} must be a positive integer, got {v:?}"
            ))),
        },
        _ => Ok(None),
    }
}

fn exit_code(e: &Error) -> i32 {
    if e.is_estimation() {
        2
    } else {
        1
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match threads_from_env() {
        Ok(Some(n)) => {
            // Fails only if a pool already exists in this process.
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global();
        }
        Ok(None) => {}
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    }
    let outcome = match &cli.command {
        Command::Estimate(a) => estimate(a).and_then(|(_, text)| write_output(None, &text)),
        Command::Entropy(a) => entropy(a).and_then(|(_, text)| write_output(None, &text)),
        Command::Sweep(a) => sweep(a).map(|_| ()),
    };
    match outcome {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
