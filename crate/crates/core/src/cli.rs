//! Command-line interface: `estimate`, `simulate`, `study-normality`,
//! `study-covariance` and `eval-asymptotics`.
//!
//! Exit codes are 0 on success, 2 on usage errors and 1 on runtime errors.
//! Set `ZIPF_URN_THREADS` to choose the number of worker threads.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::asymptotics::{
    implicit_variance, sigma0_sq, sigma0_sq_indicator, sigma_k_sq, write_covariance_csv, CovarianceSpec,
    ImplicitKind,
};
use crate::estimators::{estimate, CModel, EstimateRecord, EstimatorId};
use crate::ingest::{load_counts, to_occupancy, tokenize_text};
use crate::law::PowerLaw;
use crate::montecarlo::{covariance_study, normality_study, ExperimentConfig, Manifest};
use crate::numfmt::fmt10;
use crate::occupancy::{summarize, OccupancyCounts, StatisticsSnapshot, DEFAULT_K_MAX};
use crate::sampler::{sample_fixed, sample_poissonized, sample_trajectory, SeedSpec};
use crate::{Error, Result};

/// Environment variable that sets the worker-thread count.
pub const THREADS_ENV: &str = "ZIPF_URN_THREADS";

#[derive(Parser, Debug)]
#[command(name = "zipf-urn", version, about = "Estimate the Zipf exponent of an infinite urn scheme and check its limit theorems by simulation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Estimate θ from a text, a token-count table or an urn-count table.
    Estimate(EstimateArgs),
    /// Draw a sample from a zeta law and write its urn counts.
    Simulate(SimulateArgs),
    /// Replicate estimators and compare their spread with the limiting variances.
    StudyNormality(StudyArgs),
    /// Replicate nested trajectories and compare covariances with the limit.
    StudyCovariance(StudyArgs),
    /// Tabulate limiting variances and the covariance function.
    EvalAsymptotics(AsymptoticsArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SampleMode {
    Fixed,
    Poissonized,
}

#[derive(Args, Debug)]
#[command(group(clap::ArgGroup::new("input").required(true).args(["text", "counts", "occupancy"])))]
pub struct EstimateArgs {
    /// UTF-8 text file; tokens are lowercased letter runs.
    #[arg(long, value_name = "PATH")]
    pub text: Option<PathBuf>,
    /// CSV with header `token,count`.
    #[arg(long, value_name = "PATH")]
    pub counts: Option<PathBuf>,
    /// CSV with header `urn_index,count`.
    #[arg(long, value_name = "PATH")]
    pub occupancy: Option<PathBuf>,
    /// Comma-separated estimators: implicit-r, implicit-u, implicit-rk(k),
    /// ratio-r1, ratio-k(k), log-ratio. [default: ratio-r1,ratio-k(1),log-ratio,
    /// plus implicit-r,implicit-u,implicit-rk(1) when --c-model is given]
    #[arg(long, value_name = "LIST")]
    pub estimators: Option<String>,
    /// Known constant c(θ) for implicit estimators: `zeta` (1/ζ(1/θ)),
    /// `const:<c>`, or `table:<path>` (CSV `theta,c`, linearly interpolated).
    #[arg(long, value_name = "MODEL")]
    pub c_model: Option<String>,
    /// Confidence level of the intervals (a probability).
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Output file [default: standard output].
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Largest k for which R_{n,k} is tabulated (count of balls).
    #[arg(long, default_value_t = DEFAULT_K_MAX)]
    pub k_max: u32,
}

#[derive(Args, Debug)]
pub struct SimulateArgs {
    /// Exponent θ of the zeta law, in (0,1).
    #[arg(long, default_value_t = 0.5, value_parser = parse_theta)]
    pub theta: f64,
    /// Index shift i0 of the zeta law (urns).
    #[arg(long, default_value_t = 0)]
    pub i0: u64,
    /// Number of balls (fixed mode) or Poisson mean (poissonized mode).
    #[arg(long)]
    pub n: f64,
    /// Master seed.
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Stream index under the master seed.
    #[arg(long, default_value_t = 0)]
    pub stream: u64,
    /// Fixed number of balls or Poisson number of balls.
    #[arg(long, value_enum, default_value_t = SampleMode::Fixed)]
    pub mode: SampleMode,
    /// Comma-separated times in (0,1] for trajectory snapshots (fixed mode).
    #[arg(long, value_name = "LIST")]
    pub grid: Option<String>,
    /// Tail mass left out of the cumulative table (probability).
    #[arg(long, default_value_t = 1e-6)]
    pub tail_epsilon: f64,
    /// Largest k in snapshot statistics (count of balls).
    #[arg(long, default_value_t = DEFAULT_K_MAX)]
    pub k_max: u32,
    /// Urn-count CSV output [default: standard output].
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Also write the statistics snapshot(s) as JSON to this file.
    #[arg(long, value_name = "PATH")]
    pub snapshot: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct StudyArgs {
    /// Config file of `key=value` lines (keys: theta, i0, n, replications,
    /// estimators, nu, grid, seed, level, tail_epsilon, k_max); flags override it.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Exponent θ of the zeta law. [default: 0.5]
    #[arg(long, value_parser = parse_theta)]
    pub theta: Option<f64>,
    /// Index shift of the zeta law. [default: 0]
    #[arg(long)]
    pub i0: Option<u64>,
    /// Comma-separated sample sizes (balls). [default: 100000]
    #[arg(long, value_name = "LIST")]
    pub n: Option<String>,
    /// Replications M (count; at least 100 for normality studies). [default: 2000]
    #[arg(long, short = 'm')]
    pub replications: Option<usize>,
    /// Comma-separated estimators. [default: all six with k = 1]
    #[arg(long, value_name = "LIST")]
    pub estimators: Option<String>,
    /// Number ν of R_{·,k} components in covariance studies. [default: 1]
    #[arg(long)]
    pub nu: Option<u32>,
    /// Comma-separated times in (0,1] for covariance studies. [default: 0.5,1]
    #[arg(long, value_name = "LIST")]
    pub grid: Option<String>,
    /// Master seed. [default: 1]
    #[arg(long)]
    pub seed: Option<u64>,
    /// Confidence level (probability). [default: 0.95]
    #[arg(long)]
    pub level: Option<f64>,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Report file; a `<file>.manifest.json` provenance record is written beside it.
    #[arg(long, value_name = "PATH")]
    pub output: PathBuf,
}

#[derive(Args, Debug)]
pub struct AsymptoticsArgs {
    /// Exponent θ, in (0,1).
    #[arg(long, value_parser = parse_theta)]
    pub theta: f64,
    /// Largest k for σ_k² and the implicit R_k variances.
    #[arg(long, default_value_t = 5)]
    pub k_max: u32,
    /// Number ν of R_{·,k} components of the covariance table.
    #[arg(long, default_value_t = 1)]
    pub nu: u32,
    /// Comma-separated times (> 0) for a covariance table c_ij(τ,t).
    #[arg(long, value_name = "LIST")]
    pub grid: Option<String>,
    /// Output format of the variance table.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Output file [default: standard output].
    #[arg(long, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// CSV file for the covariance table (rows i,j,tau,t,c_ij).
    #[arg(long, value_name = "PATH")]
    pub covariance_output: Option<PathBuf>,
}

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|e| Error::Input { location: path.display().to_string(), message: e.to_string() })
}

fn emit(output: Option<&Path>, bytes: &[u8], stdout: &mut dyn Write) -> Result<()> {
    match output {
        Some(p) => fs::write(p, bytes)?,
        None => stdout.write_all(bytes)?,
    }
    Ok(())
}

fn parse_theta(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v > 0.0 && v < 1.0 {
        Ok(v)
    } else {
        Err(format!("theta must lie in (0,1), got {v}"))
    }
}

fn parse_list<T: std::str::FromStr>(s: &str, what: &str) -> Result<Vec<T>> {
    s.split(',')
        .map(str::trim)
        .filter(|x| !x.is_empty())
        .map(|x| x.parse::<T>().map_err(|_| Error::usage(format!("invalid {what} `{x}`"))))
        .collect()
}

fn parse_c_model(s: &str) -> Result<CModel> {
    if s == "zeta" {
        return Ok(CModel::Zeta);
    }
    if let Some(v) = s.strip_prefix("const:") {
        let c: f64 = v.parse().map_err(|_| Error::usage(format!("invalid constant in `{s}`")))?;
        if !(c > 0.0 && c.is_finite()) {
            return Err(Error::usage("c must be positive"));
        }
        return Ok(CModel::Constant(c));
    }
    if let Some(p) = s.strip_prefix("table:") {
        return CModel::from_csv(read(Path::new(p))?.as_slice());
    }
    Err(Error::usage(format!("unknown c model `{s}` (expected zeta, const:<c> or table:<path>)")))
}

#[derive(Serialize)]
struct EstimateError {
    estimator: EstimatorId,
    error: String,
}

#[derive(Serialize)]
struct EstimateReport<'a> {
    snapshot: &'a StatisticsSnapshot,
    estimates: Vec<EstimateRecord>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    errors: Vec<EstimateError>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    warnings: Vec<String>,
}

fn cmd_estimate(args: &EstimateArgs, stdout: &mut dyn Write) -> Result<()> {
    let c_model = args.c_model.as_deref().map(parse_c_model).transpose()?;
    let ids: Vec<EstimatorId> = match &args.estimators {
        Some(list) => parse_list_estimators(list)?,
        None => {
            let mut v = Vec::new();
            if c_model.is_some() {
                v.extend([EstimatorId::ImplicitR, EstimatorId::ImplicitU, EstimatorId::ImplicitRk(1)]);
            }
            v.extend([EstimatorId::RatioR1, EstimatorId::RatioK(1), EstimatorId::LogRatio]);
            v
        }
    };
    if let Some(id) = ids.iter().find(|id| id.is_implicit()) {
        if c_model.is_none() {
            return Err(Error::usage(format!("{id} needs a known c(theta); pass --c-model")));
        }
    }
    let needed = ids.iter().map(|id| id.k_needed()).max().unwrap_or(0);
    if needed > args.k_max {
        return Err(Error::usage(format!("estimators need --k-max >= {needed}")));
    }
    crate::estimators::z_for_level(args.level)?;

    let mut warnings = Vec::new();
    let occupancy = if let Some(p) = &args.text {
        to_occupancy(&tokenize_text(read(p)?.as_slice())?)?
    } else if let Some(p) = &args.counts {
        let corpus = load_counts(read(p)?.as_slice())?;
        warnings.extend(corpus.warnings.iter().cloned());
        to_occupancy(&corpus)?
    } else {
        let p = args.occupancy.as_ref().expect("clap enforces one input");
        OccupancyCounts::read_csv(read(p)?.as_slice())?
    };
    for w in &warnings {
        eprintln!("warning: {w}");
    }
    let snapshot = summarize(&occupancy, args.k_max)?;
    let mut estimates = Vec::new();
    let mut errors = Vec::new();
    for &id in &ids {
        match estimate(id, &snapshot, c_model.as_ref(), args.level) {
            Ok(e) => estimates.push(e.record()),
            Err(e) => errors.push(EstimateError { estimator: id, error: e.to_string() }),
        }
    }
    let bytes = match args.format {
        Format::Json => {
            let report = EstimateReport { snapshot: &snapshot, estimates: estimates.clone(), errors, warnings };
            (serde_json::to_string_pretty(&report)? + "\n").into_bytes()
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["estimator", "theta_hat", "stderr", "ci_lo", "ci_hi", "level", "flags"])?;
            for e in &estimates {
                let flags: Vec<String> =
                    e.flags.iter().map(|f| serde_json::to_value(f).map(|v| v.as_str().unwrap_or("").to_owned())).collect::<std::result::Result<_, _>>()?;
                w.write_record([
                    e.estimator.to_string(),
                    fmt10(e.theta_hat),
                    fmt10(e.stderr),
                    fmt10(e.ci_lo),
                    fmt10(e.ci_hi),
                    fmt10(e.level),
                    flags.join(";"),
                ])?;
            }
            for e in &errors {
                eprintln!("error: {}: {}", e.estimator, e.error);
            }
            w.into_inner().map_err(|e| Error::Io(e.into_error()))?
        }
    };
    emit(args.output.as_deref(), &bytes, stdout)?;
    if estimates.is_empty() {
        return Err(Error::InsufficientData("no estimator produced a result".into()));
    }
    Ok(())
}

fn parse_list_estimators(list: &str) -> Result<Vec<EstimatorId>> {
    let ids: Vec<EstimatorId> = list
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::parse)
        .collect::<Result<_>>()?;
    if ids.is_empty() {
        return Err(Error::usage("no estimators selected"));
    }
    Ok(ids)
}

fn cmd_simulate(args: &SimulateArgs, stdout: &mut dyn Write) -> Result<()> {
    let law = PowerLaw::zipf(args.theta, args.i0, args.tail_epsilon)?;
    let seed = SeedSpec::new(args.seed, args.stream);
    let (counts, snapshots) = match args.mode {
        SampleMode::Fixed => {
            if !(args.n >= 1.0 && args.n.fract() == 0.0 && args.n < 2f64.powi(63)) {
                return Err(Error::usage(format!("--n must be a positive integer in fixed mode, got {}", args.n)));
            }
            let n = args.n as u64;
            let counts = sample_fixed(&law, n, seed)?;
            let snaps = match &args.grid {
                Some(g) => sample_trajectory(&law, n, &parse_list::<f64>(g, "grid value")?, seed, args.k_max)?,
                None => vec![summarize(&counts, args.k_max)?],
            };
            (counts, snaps)
        }
        SampleMode::Poissonized => {
            if args.grid.is_some() {
                return Err(Error::usage("--grid applies to fixed mode only"));
            }
            let counts = sample_poissonized(&law, args.n, seed)?;
            let snap = summarize(&counts, args.k_max)?;
            (counts, vec![snap])
        }
    };
    let mut buf = Vec::new();
    counts.write_csv(&mut buf)?;
    emit(args.output.as_deref(), &buf, stdout)?;
    if let Some(p) = &args.snapshot {
        let json = if snapshots.len() == 1 {
            serde_json::to_string_pretty(&snapshots[0])?
        } else {
            serde_json::to_string_pretty(&snapshots)?
        };
        fs::write(p, json + "\n")?;
    }
    Ok(())
}

fn study_config(args: &StudyArgs) -> Result<(ExperimentConfig, Vec<(String, Vec<u8>)>)> {
    let mut config = ExperimentConfig::default();
    let mut inputs = Vec::new();
    if let Some(p) = &args.config {
        let bytes = read(p)?;
        let text = String::from_utf8(bytes.clone())
            .map_err(|_| Error::Input { location: p.display().to_string(), message: "invalid UTF-8".into() })?;
        config.apply_config_text(&text)?;
        inputs.push((p.display().to_string(), bytes));
    }
    if let Some(v) = args.theta {
        config.theta = v;
    }
    if let Some(v) = args.i0 {
        config.i0 = v;
    }
    if let Some(v) = &args.n {
        config.set("n", v)?;
    }
    if let Some(v) = args.replications {
        config.replications = v;
    }
    if let Some(v) = &args.estimators {
        config.estimators = parse_list_estimators(v)?;
    }
    if let Some(v) = args.nu {
        config.nu = v;
    }
    if let Some(v) = &args.grid {
        config.set("grid", v)?;
    }
    if let Some(v) = args.seed {
        config.seed = v;
    }
    if let Some(v) = args.level {
        config.level = v;
    }
    Ok((config, inputs))
}

fn write_study<T: Serialize>(
    command: &str,
    args: &StudyArgs,
    config: &ExperimentConfig,
    inputs: &[(String, Vec<u8>)],
    report: &T,
    csv: impl FnOnce(&mut Vec<u8>) -> Result<()>,
) -> Result<()> {
    let bytes = match args.format {
        Format::Json => (serde_json::to_string_pretty(report)? + "\n").into_bytes(),
        Format::Csv => {
            let mut buf = Vec::new();
            csv(&mut buf)?;
            buf
        }
    };
    fs::write(&args.output, &bytes)?;
    let refs: Vec<(&str, &[u8])> = inputs.iter().map(|(n, b)| (n.as_str(), b.as_slice())).collect();
    Manifest::new(command, config, &refs)?.write_beside(&args.output)
}

fn cmd_study_normality(args: &StudyArgs) -> Result<()> {
    let (config, inputs) = study_config(args)?;
    let report = normality_study(&config)?;
    write_study("study-normality", args, &config, &inputs, &report, |b| report.write_csv(b))
}

fn cmd_study_covariance(args: &StudyArgs) -> Result<()> {
    let (mut config, inputs) = study_config(args)?;
    if args.n.is_none() && args.config.is_none() {
        config.n = vec![10_000];
    }
    let report = covariance_study(&config)?;
    write_study("study-covariance", args, &config, &inputs, &report, |b| report.write_csv(b))
}

#[derive(Serialize)]
struct AsymptoticsRow {
    quantity: String,
    k: Option<u32>,
    value: f64,
}

fn cmd_eval_asymptotics(args: &AsymptoticsArgs, stdout: &mut dyn Write) -> Result<()> {
    let th = args.theta;
    let mut rows = vec![
        AsymptoticsRow { quantity: "sigma0_sq".into(), k: None, value: sigma0_sq(th)? },
        AsymptoticsRow { quantity: "sigma0_sq_indicator".into(), k: None, value: sigma0_sq_indicator(th)? },
        AsymptoticsRow { quantity: "implicit_var_r".into(), k: None, value: implicit_variance(th, ImplicitKind::R)? },
        AsymptoticsRow { quantity: "implicit_var_u".into(), k: None, value: implicit_variance(th, ImplicitKind::U)? },
    ];
    for k in 1..=args.k_max {
        rows.push(AsymptoticsRow { quantity: "sigma_k_sq".into(), k: Some(k), value: sigma_k_sq(th, k)? });
        rows.push(AsymptoticsRow {
            quantity: "implicit_var_rk".into(),
            k: Some(k),
            value: implicit_variance(th, ImplicitKind::Rk(k))?,
        });
    }
    for r in &mut rows {
        r.value = crate::numfmt::round10(r.value);
    }
    let bytes = match args.format {
        Format::Json => (serde_json::to_string_pretty(&rows)? + "\n").into_bytes(),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(["quantity", "k", "value"])?;
            for r in &rows {
                w.write_record([r.quantity.clone(), r.k.map(|k| k.to_string()).unwrap_or_default(), fmt10(r.value)])?;
            }
            w.into_inner().map_err(|e| Error::Io(e.into_error()))?
        }
    };
    emit(args.output.as_deref(), &bytes, stdout)?;
    if let Some(g) = &args.grid {
        let grid = parse_list::<f64>(g, "grid value")?;
        let spec = CovarianceSpec::new(th, args.nu)?;
        let mut buf = Vec::new();
        write_covariance_csv(&spec, &grid, &mut buf)?;
        match &args.covariance_output {
            Some(p) => fs::write(p, buf)?,
            None => stdout.write_all(&buf)?,
        }
    }
    Ok(())
}

/// Runs a parsed command, writing primary output to `stdout` when no
/// output file is given.
pub fn run(cli: &Cli, stdout: &mut dyn Write) -> Result<()> {
    match &cli.command {
        Command::Estimate(a) => cmd_estimate(a, stdout),
        Command::Simulate(a) => cmd_simulate(a, stdout),
        Command::StudyNormality(a) => cmd_study_normality(a),
        Command::StudyCovariance(a) => cmd_study_covariance(a),
        Command::EvalAsymptotics(a) => cmd_eval_asymptotics(a, stdout),
    }
}

/// Configures the global worker pool from `ZIPF_URN_THREADS`, if set.
pub fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Error::usage(format!("{THREADS_ENV} must be a positive integer, got `{v}`")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::usage(format!("cannot configure worker pool: {e}")))?;
    }
    Ok(())
}

/// Process exit code for a result.
pub fn exit_code(result: &Result<()>) -> i32 {
    match result {
        Ok(()) => 0,
        Err(e) if e.is_usage() => 2,
        Err(_) => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_args(args: &[&str]) -> (Result<()>, String) {
        let cli = Cli::try_parse_from(std::iter::once("zipf-urn").chain(args.iter().copied())).unwrap();
        let mut out = Vec::new();
        let r = run(&cli, &mut out);
        (r, String::from_utf8(out).unwrap())
    }

    #[test]
    fn help_mentions_defaults() {
        for sub in ["estimate", "simulate", "study-normality", "study-covariance", "eval-asymptotics"] {
            let err = Cli::try_parse_from(["zipf-urn", sub, "--help"]).unwrap_err();
            let text = err.to_string();
            assert!(text.contains("default"), "{sub}");
        }
    }

    #[test]
    fn eval_asymptotics_row() {
        let (r, out) = run_args(&["eval-asymptotics", "--theta", "0.5"]);
        r.unwrap();
        assert!(out.contains("sigma0_sq,,0.8687184335\n"), "{out}");
    }

    #[test]
    fn implicit_without_c_model_is_usage_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("occ.csv");
        fs::write(&p, "urn_index,count\n1,3\n2,1\n").unwrap();
        let (r, _) = run_args(&["estimate", "--occupancy", p.to_str().unwrap(), "--estimators", "implicit-r"]);
        assert_eq!(exit_code(&r), 2);
    }

    #[test]
    fn estimate_ratio_from_counts() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("occ.csv");
        // 1000 urns: 500 singletons, 500 doubletons
        let mut s = String::from("urn_index,count\n");
        for i in 1..=1000 {
            s.push_str(&format!("{i},{}\n", if i <= 500 { 1 } else { 2 }));
        }
        fs::write(&p, s).unwrap();
        let (r, out) = run_args(&["estimate", "--occupancy", p.to_str().unwrap(), "--estimators", "ratio-r1"]);
        r.unwrap();
        let v: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["estimates"][0]["theta_hat"], 0.5);
    }

    #[test]
    fn simulate_single_ball() {
        let (r, out) = run_args(&["simulate", "--n", "1"]);
        r.unwrap();
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[1].ends_with(",1"));
    }

    #[test]
    fn study_refuses_small_m() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("r.json");
        let (r, _) = run_args(&["study-normality", "-m", "10", "--n", "1000", "--output", out.to_str().unwrap()]);
        assert_eq!(exit_code(&r), 2);
    }

    #[test]
    fn missing_input_file_is_runtime_error() {
        let (r, _) = run_args(&["estimate", "--counts", "/nonexistent/file.csv"]);
        assert_eq!(exit_code(&r), 1);
    }
}
