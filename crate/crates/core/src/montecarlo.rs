//! Replicated simulation studies that check the limit theorems at finite
//! `n`. Each study covers one of the following:
//!
//! - variance and shape of the standardized estimators;
//! - confidence-interval coverage;
//! - empirical covariances of the occupancy processes;
//! - decay of the expectation remainders.
//!
//! Replication `r` of sample size index `a` draws from the ChaCha stream
//! `(seed, a·2^32 + r)`. Results are collected in replication order, so a
//! report does not depend on the number of worker threads.

use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::asymptotics::{
    covariance_c, implicit_variance, indicator_covariance, sigma0_sq, sigma0_sq_indicator, sigma_k_sq,
    CovarianceSpec, ImplicitKind,
};
use crate::estimators::{
    log_ratio_estimate, ratio_estimate_k, ratio_estimate_r1, CModel, EstimateResult, EstimatorId, ImplicitSolver,
};
use crate::law::{Mode, PowerLaw, Statistic};
use crate::occupancy::{StatisticsSnapshot, StreamAccumulator, DEFAULT_K_MAX};
use crate::sampler::{checkpoints, run_trajectory, SeedSpec, UrnSampler};
use crate::specfun::normal_cdf;
use crate::{Error, Result};

/// Smallest replication count accepted by normality studies.
pub const MIN_REPLICATIONS: usize = 100;

/// Parameters of a simulation study.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub theta: f64,
    pub i0: u64,
    pub n: Vec<u64>,
    pub replications: usize,
    pub estimators: Vec<EstimatorId>,
    /// Components `1..=ν` of the covariance study.
    pub nu: u32,
    pub grid: Vec<f64>,
    pub seed: u64,
    pub level: f64,
    pub tail_epsilon: f64,
    pub k_max: u32,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            theta: 0.5,
            i0: 0,
            n: vec![100_000],
            replications: 2000,
            estimators: vec![
                EstimatorId::ImplicitR,
                EstimatorId::ImplicitU,
                EstimatorId::ImplicitRk(1),
                EstimatorId::RatioR1,
                EstimatorId::RatioK(1),
                EstimatorId::LogRatio,
            ],
            nu: 1,
            grid: vec![0.5, 1.0],
            seed: 1,
            level: 0.95,
            tail_epsilon: 1e-6,
            k_max: DEFAULT_K_MAX,
        }
    }
}

impl ExperimentConfig {
    fn law(&self) -> Result<PowerLaw> {
        PowerLaw::zipf(self.theta, self.i0, self.tail_epsilon)
    }

    fn check_common(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta < 1.0) {
            return Err(Error::usage(format!("theta must lie in (0,1), got {}", self.theta)));
        }
        if self.n.is_empty() || self.n.iter().any(|&n| n < 2) {
            return Err(Error::usage("every sample size must be >= 2"));
        }
        if self.grid.iter().any(|&t| !(t > 0.0 && t <= 1.0)) {
            return Err(Error::usage("time grid values must lie in (0,1]"));
        }
        if self.replications < 2 {
            return Err(Error::usage("at least two replications are needed"));
        }
        if self.k_max == 0 {
            return Err(Error::usage("k_max must be >= 1"));
        }
        crate::estimators::z_for_level(self.level)?;
        Ok(())
    }

    pub fn validate_normality(&self) -> Result<()> {
        self.check_common()?;
        if self.replications < MIN_REPLICATIONS {
            return Err(Error::usage(format!(
                "normality studies need at least {MIN_REPLICATIONS} replications, got {}",
                self.replications
            )));
        }
        if self.estimators.is_empty() {
            return Err(Error::usage("no estimators selected"));
        }
        for e in &self.estimators {
            if e.k_needed() > self.k_max {
                return Err(Error::usage(format!("{e} needs k_max >= {}", e.k_needed())));
            }
        }
        Ok(())
    }

    pub fn validate_covariance(&self) -> Result<()> {
        self.check_common()?;
        if self.grid.is_empty() {
            return Err(Error::usage("time grid is empty"));
        }
        if !(1..=3).contains(&self.nu) {
            return Err(Error::usage(format!("nu must lie in 1..=3, got {}", self.nu)));
        }
        if self.nu > self.k_max {
            return Err(Error::usage("nu must not exceed k_max"));
        }
        Ok(())
    }

    /// Applies one `key=value` setting (as in a config file).
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let bad = |what: &str| Error::usage(format!("invalid value `{value}` for `{key}`: expected {what}"));
        let list = |v: &str| v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect::<Vec<_>>();
        match key {
            "theta" => self.theta = value.parse().map_err(|_| bad("a real"))?,
            "i0" => self.i0 = value.parse().map_err(|_| bad("an integer"))?,
            "n" => {
                self.n = list(value)
                    .iter()
                    .map(|s| s.parse::<f64>().ok().filter(|x| x.fract() == 0.0 && *x >= 1.0).map(|x| x as u64))
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| bad("comma-separated positive integers"))?
            }
            "replications" | "m" => self.replications = value.parse().map_err(|_| bad("an integer"))?,
            "estimators" => {
                self.estimators = list(value).iter().map(|s| s.parse()).collect::<Result<Vec<_>>>()?
            }
            "nu" => self.nu = value.parse().map_err(|_| bad("an integer"))?,
            "grid" => {
                self.grid = list(value)
                    .iter()
                    .map(|s| s.parse::<f64>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .map_err(|_| bad("comma-separated reals"))?
            }
            "seed" => self.seed = value.parse().map_err(|_| bad("an integer"))?,
            "level" => self.level = value.parse().map_err(|_| bad("a real"))?,
            "tail_epsilon" => self.tail_epsilon = value.parse().map_err(|_| bad("a real"))?,
            "k_max" => self.k_max = value.parse().map_err(|_| bad("an integer"))?,
            _ => return Err(Error::usage(format!("unknown config key `{key}`"))),
        }
        Ok(())
    }

    /// Parses `key=value` lines; blank lines and `#` comments are ignored.
    pub fn apply_config_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Input {
                location: format!("line {}", i + 1),
                message: "expected key=value".into(),
            })?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }
}

/// Sample moments and normality diagnostics of one estimator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimatorSummary {
    pub estimator: EstimatorId,
    pub n: u64,
    pub included: usize,
    pub excluded: usize,
    pub flagged: usize,
    pub mean_theta_hat: f64,
    pub bias: f64,
    /// Moments of the standardized statistic (`θ̂ − θ` itself for log-ratio).
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
    pub ks_distance: f64,
    pub ks_p_value: f64,
    pub coverage: f64,
    /// Limiting variance of the standardized statistic, where one exists.
    pub target_variance: Option<f64>,
    pub variance_ratio: Option<f64>,
    /// Limiting variance implied by the indicator-sum covariance, where it
    /// differs from `target_variance`.
    pub indicator_target_variance: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StudyReport {
    pub config: ExperimentConfig,
    pub summaries: Vec<EstimatorSummary>,
}

impl StudyReport {
    pub fn summary(&self, estimator: EstimatorId, n: u64) -> Option<&EstimatorSummary> {
        self.summaries.iter().find(|s| s.estimator == estimator && s.n == n)
    }

    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        use crate::numfmt::fmt10;
        let opt = |x: Option<f64>| x.map(fmt10).unwrap_or_default();
        let mut w = csv::Writer::from_writer(writer);
        w.write_record([
            "estimator", "n", "included", "excluded", "flagged", "mean_theta_hat", "bias", "mean", "variance",
            "skewness", "excess_kurtosis", "ks_distance", "ks_p_value", "coverage", "target_variance",
            "variance_ratio", "indicator_target_variance",
        ])?;
        for s in &self.summaries {
            w.write_record([
                s.estimator.to_string(),
                s.n.to_string(),
                s.included.to_string(),
                s.excluded.to_string(),
                s.flagged.to_string(),
                fmt10(s.mean_theta_hat),
                fmt10(s.bias),
                fmt10(s.mean),
                fmt10(s.variance),
                fmt10(s.skewness),
                fmt10(s.excess_kurtosis),
                fmt10(s.ks_distance),
                fmt10(s.ks_p_value),
                fmt10(s.coverage),
                opt(s.target_variance),
                opt(s.variance_ratio),
                opt(s.indicator_target_variance),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Mean, variance, skewness and excess kurtosis (population moments
/// about the sample mean; variance with the `m−1` divisor).
pub fn moments(x: &[f64]) -> (f64, f64, f64, f64) {
    let m = x.len() as f64;
    let mean = x.iter().sum::<f64>() / m;
    let (mut s2, mut s3, mut s4) = (0.0, 0.0, 0.0);
    for &v in x {
        let d = v - mean;
        let d2 = d * d;
        s2 += d2;
        s3 += d2 * d;
        s4 += d2 * d2;
    }
    let (m2, m3, m4) = (s2 / m, s3 / m, s4 / m);
    let variance = s2 / (m - 1.0);
    (mean, variance, m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0)
}

/// One-sample Kolmogorov–Smirnov test against the standard normal.
/// Returns the distance and the asymptotic p-value.
pub fn ks_test(sample: &[f64]) -> Result<(f64, f64)> {
    if sample.len() < 100 {
        return Err(Error::usage(format!("KS test needs at least 100 values, got {}", sample.len())));
    }
    if sample.iter().any(|x| !x.is_finite()) {
        return Err(Error::domain("KS test sample contains non-finite values"));
    }
    let mut x = sample.to_vec();
    x.sort_by(f64::total_cmp);
    let m = x.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &v) in x.iter().enumerate() {
        let f = normal_cdf(v);
        d = d.max((i as f64 + 1.0) / m - f).max(f - i as f64 / m);
    }
    let sq = m.sqrt();
    Ok((d, kolmogorov_q((sq + 0.12 + 0.11 / sq) * d)))
}

/// Kolmogorov survival function `Q(λ) = 2Σ(−1)^{k−1}e^{−2k²λ²}`, summed
/// over 100 terms. For small `λ`, where the alternating series converges
/// slowly, the equivalent theta-function form is used.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda <= 0.0 {
        return 1.0;
    }
    if lambda < 1.18 {
        let c = -std::f64::consts::PI.powi(2) / (8.0 * lambda * lambda);
        let s: f64 = (1..=100).map(|k| ((2 * k - 1) as f64).powi(2) * c).map(f64::exp).sum();
        return (1.0 - (2.0 * std::f64::consts::PI).sqrt() / lambda * s).clamp(0.0, 1.0);
    }
    let mut s = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        s += if k % 2 == 1 { term } else { -term };
    }
    (2.0 * s).clamp(0.0, 1.0)
}

struct EstimatorPlan {
    id: EstimatorId,
    solver: Option<ImplicitSolver>,
}

/// `(standardized statistic, estimate)` for one replication.
fn standardize(id: EstimatorId, e: &EstimateResult, s: &StatisticsSnapshot, theta: f64) -> f64 {
    let dev = e.theta_hat - theta;
    let ln_n = (s.n as f64).ln();
    let sqrt = |v: u64| (v as f64).sqrt();
    match id {
        EstimatorId::ImplicitR => ln_n * sqrt(s.r) * dev,
        EstimatorId::ImplicitU => ln_n * sqrt(s.u) * dev,
        EstimatorId::ImplicitRk(k) => ln_n * sqrt(s.r_k[k as usize - 1]) * dev,
        EstimatorId::RatioR1 => sqrt(s.r) * dev,
        EstimatorId::RatioK(k) => sqrt(s.r_k[k as usize - 1]) * dev,
        EstimatorId::LogRatio => dev,
    }
}

fn targets(id: EstimatorId, theta: f64) -> Result<(Option<f64>, Option<f64>)> {
    Ok(match id {
        EstimatorId::ImplicitR => (Some(implicit_variance(theta, ImplicitKind::R)?), None),
        EstimatorId::ImplicitU => (Some(implicit_variance(theta, ImplicitKind::U)?), None),
        EstimatorId::ImplicitRk(k) => (Some(implicit_variance(theta, ImplicitKind::Rk(k))?), None),
        EstimatorId::RatioR1 => (Some(sigma0_sq(theta)?), Some(sigma0_sq_indicator(theta)?)),
        EstimatorId::RatioK(k) => (Some(sigma_k_sq(theta, k)?), None),
        EstimatorId::LogRatio => (None, None),
    })
}

fn run_estimator(plan: &EstimatorPlan, s: &StatisticsSnapshot, level: f64) -> Result<EstimateResult> {
    match (&plan.solver, plan.id) {
        (Some(solver), id) => {
            let value = match id {
                EstimatorId::ImplicitR => s.r,
                EstimatorId::ImplicitU => s.u,
                EstimatorId::ImplicitRk(k) => s.r_exact(k)?,
                _ => unreachable!("solver only for implicit estimators"),
            };
            let baseline = log_ratio_estimate(s, level)?.theta_hat;
            solver.estimate_resolved(value as f64, level, baseline)
        }
        (None, EstimatorId::RatioR1) => ratio_estimate_r1(s, level),
        (None, EstimatorId::RatioK(k)) => ratio_estimate_k(s, k, level),
        (None, EstimatorId::LogRatio) => log_ratio_estimate(s, level),
        (None, id) => unreachable!("{id} has no solver"),
    }
}

/// Per-replication outcome of one estimator: `(standardized, θ̂, covered, flagged)`.
type Outcome = Option<(f64, f64, bool, bool)>;

/// Standardized estimators over `M` replications at each sample size.
///
/// Replications where an estimator fails (no root, insufficient data) are
/// excluded for that estimator and counted. Implicit equations with several
/// roots keep the root nearest the log-ratio estimate and count as flagged.
pub fn normality_study(config: &ExperimentConfig) -> Result<StudyReport> {
    config.validate_normality()?;
    let law = config.law()?;
    let sampler = UrnSampler::new(&law);
    let theta = config.theta;
    let mut summaries = Vec::new();
    for (a, &n) in config.n.iter().enumerate() {
        let plans: Vec<EstimatorPlan> = config
            .estimators
            .iter()
            .map(|&id| {
                let solver = match id {
                    EstimatorId::ImplicitR => Some(ImplicitKind::R),
                    EstimatorId::ImplicitU => Some(ImplicitKind::U),
                    EstimatorId::ImplicitRk(k) => Some(ImplicitKind::Rk(k)),
                    _ => None,
                }
                .map(|kind| ImplicitSolver::new(kind, n as f64, CModel::Zeta))
                .transpose()?;
                Ok(EstimatorPlan { id, solver })
            })
            .collect::<Result<_>>()?;
        let outcomes: Vec<Vec<Outcome>> = (0..config.replications)
            .into_par_iter()
            .map_init(
                || StreamAccumulator::new(config.k_max).expect("k_max validated"),
                |acc, r| {
                    let mut rng = SeedSpec::new(config.seed, ((a as u64) << 32) + r as u64).rng();
                    run_trajectory(&sampler, &mut rng, &[n], acc, |_, _| {});
                    let snap = acc.snapshot();
                    plans
                        .iter()
                        .map(|plan| {
                            run_estimator(plan, &snap, config.level).ok().map(|e| {
                                let z = standardize(plan.id, &e, &snap, theta);
                                let covered = e.ci.0 <= theta && theta <= e.ci.1;
                                (z, e.theta_hat, covered, !e.flags.is_empty() && plan.solver.is_some())
                            })
                        })
                        .collect()
                },
            )
            .collect();
        for (p, plan) in plans.iter().enumerate() {
            let ok: Vec<(f64, f64, bool, bool)> = outcomes.iter().filter_map(|o| o[p]).collect();
            summaries.push(summarize_estimator(plan.id, n, theta, &ok, config.replications)?);
        }
    }
    Ok(StudyReport { config: config.clone(), summaries })
}

fn summarize_estimator(
    id: EstimatorId,
    n: u64,
    theta: f64,
    ok: &[(f64, f64, bool, bool)],
    m: usize,
) -> Result<EstimatorSummary> {
    let included = ok.len();
    let (target, indicator) = targets(id, theta)?;
    let z: Vec<f64> = ok.iter().map(|o| o.0).collect();
    let (mean, variance, skewness, excess_kurtosis) =
        if included >= 2 { moments(&z) } else { (f64::NAN, f64::NAN, f64::NAN, f64::NAN) };
    let (ks_distance, ks_p_value) = if included >= 100 && variance > 0.0 {
        let sd = variance.sqrt();
        let standardized: Vec<f64> = z.iter().map(|v| (v - mean) / sd).collect();
        ks_test(&standardized)?
    } else {
        (f64::NAN, f64::NAN)
    };
    let mean_theta_hat = ok.iter().map(|o| o.1).sum::<f64>() / included as f64;
    Ok(EstimatorSummary {
        estimator: id,
        n,
        included,
        excluded: m - included,
        flagged: ok.iter().filter(|o| o.3).count(),
        mean_theta_hat,
        bias: mean_theta_hat - theta,
        mean,
        variance,
        skewness,
        excess_kurtosis,
        ks_distance,
        ks_p_value,
        coverage: ok.iter().filter(|o| o.2).count() as f64 / included as f64,
        target_variance: target,
        variance_ratio: target.map(|t| variance / t),
        indicator_target_variance: indicator,
    })
}

/// Empirical versus limiting covariance of one pair of process entries.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovarianceRow {
    pub i: u32,
    pub j: u32,
    pub tau: f64,
    pub t: f64,
    pub empirical: f64,
    pub std_error: f64,
    pub theoretical: f64,
    pub z_score: f64,
    /// Limit of the covariance of the indicator sums and its z-score.
    pub indicator: f64,
    pub z_indicator: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CovarianceReport {
    pub config: ExperimentConfig,
    pub n: u64,
    pub alpha_n: u64,
    pub rows: Vec<CovarianceRow>,
}

impl CovarianceReport {
    pub fn row(&self, i: u32, j: u32, tau: f64, t: f64) -> Option<&CovarianceRow> {
        self.rows.iter().find(|r| r.i == i && r.j == j && r.tau == tau && r.t == t)
    }

    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        use crate::numfmt::fmt10;
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["i", "j", "tau", "t", "empirical", "std_error", "theoretical", "z_score", "indicator", "z_indicator"])?;
        for r in &self.rows {
            w.write_record([
                r.i.to_string(),
                r.j.to_string(),
                fmt10(r.tau),
                fmt10(r.t),
                fmt10(r.empirical),
                fmt10(r.std_error),
                fmt10(r.theoretical),
                fmt10(r.z_score),
                fmt10(r.indicator),
                fmt10(r.z_indicator),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Covariances of `Y_0(t) = (R_{⌊nt⌋} − E R_{⌊nt⌋})/√α(n)` and
/// `Y_j(t) = (R_{⌊nt⌋,j} − E R_{⌊nt⌋,j})/√α(n)` over the time grid, from nested
/// trajectories centered by the exact fixed-n expectations. Uses the first
/// sample size of the config.
pub fn covariance_study(config: &ExperimentConfig) -> Result<CovarianceReport> {
    config.validate_covariance()?;
    let law = config.law()?;
    let n = config.n[0];
    let marks = checkpoints(n, &config.grid)?;
    let comps = config.nu as usize + 1;
    let alpha = law.alpha(n as f64)?;
    if alpha == 0 {
        return Err(Error::InsufficientData(format!("alpha(n) = 0 at n = {n}")));
    }
    let scale = 1.0 / (alpha as f64).sqrt();
    let mut centers = Vec::with_capacity(marks.len() * comps);
    for &m in &marks {
        for c in 0..comps {
            let stat = if c == 0 { Statistic::R } else { Statistic::Rk(c as u32) };
            centers.push(if m == 0 { 0.0 } else { law.expected_statistic(m as f64, stat, Mode::Fixed)? });
        }
    }
    let sampler = UrnSampler::new(&law);
    let dim = marks.len() * comps;
    let samples: Vec<Vec<f64>> = (0..config.replications)
        .into_par_iter()
        .map_init(
            || StreamAccumulator::new(config.k_max).expect("k_max validated"),
            |acc, r| {
                let mut rng = SeedSpec::new(config.seed, r as u64).rng();
                let mut y = vec![0.0; dim];
                run_trajectory(&sampler, &mut rng, &marks, acc, |a, st| {
                    let s = st.snapshot();
                    for c in 0..comps {
                        let v = if c == 0 { s.r } else { s.r_k[c - 1] };
                        y[a * comps + c] = (v as f64 - centers[a * comps + c]) * scale;
                    }
                });
                y
            },
        )
        .collect();
    let spec = CovarianceSpec::new(config.theta, config.nu)?;
    let m = samples.len() as f64;
    let mut rows = Vec::new();
    for a in 0..marks.len() {
        for b in a..marks.len() {
            for i in 0..comps {
                for j in 0..comps {
                    if a == b && j < i {
                        continue;
                    }
                    let (p, q) = (a * comps + i, b * comps + j);
                    let prods: Vec<f64> = samples.iter().map(|y| y[p] * y[q]).collect();
                    let mean = prods.iter().sum::<f64>() / m;
                    let var = prods.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (m - 1.0);
                    let se = (var / m).sqrt();
                    let (tau, t) = (config.grid[a], config.grid[b]);
                    let theo = covariance_c(&spec, i as u32, j as u32, tau, t)?;
                    let ind = indicator_covariance(&spec, i as u32, j as u32, tau, t)?;
                    rows.push(CovarianceRow {
                        i: i as u32,
                        j: j as u32,
                        tau,
                        t,
                        empirical: mean,
                        std_error: se,
                        theoretical: theo,
                        z_score: (mean - theo) / se,
                        indicator: ind,
                        z_indicator: (mean - ind) / se,
                    });
                }
            }
        }
    }
    Ok(CovarianceReport { config: config.clone(), n, alpha_n: alpha, rows })
}

/// Exact expectation versus Karlin leading term at one sample size.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RemainderRow {
    pub n: f64,
    /// `R`, `U`, `R1`, … or `alpha` for Karlin's counting function.
    pub statistic: String,
    pub exact: f64,
    pub leading: f64,
    /// `|exact − leading| / n^{θ/2}`.
    pub normalized_remainder: f64,
}

/// Remainders `|E S_n − leading term|/n^{θ/2}` for `S ∈ {R, U, R_1..R_kmax}`
/// and `|α(n) − (cn)^θ|/n^{θ/2}`, at each `n` of an increasing list.
pub fn remainder_study(law: &PowerLaw, n_list: &[f64], k_max: u32) -> Result<Vec<RemainderRow>> {
    if n_list.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::usage("sample sizes must be increasing"));
    }
    let half = law.theta() / 2.0;
    let mut rows = Vec::new();
    let mut stats = vec![Statistic::R, Statistic::U];
    stats.extend((1..=k_max).map(Statistic::Rk));
    for &n in n_list {
        let norm = n.powf(half);
        for &stat in &stats {
            let exact = law.expected_statistic(n, stat, Mode::Fixed)?;
            let leading = law.karlin_leading_term(n, stat)?;
            rows.push(RemainderRow {
                n,
                statistic: stat.to_string(),
                exact,
                leading,
                normalized_remainder: (exact - leading).abs() / norm,
            });
        }
        let a = law.alpha(n)? as f64;
        let lead = law.alpha_leading_term(n);
        rows.push(RemainderRow {
            n,
            statistic: "alpha".into(),
            exact: a,
            leading: lead,
            normalized_remainder: (a - lead).abs() / norm,
        });
    }
    Ok(rows)
}

/// Git-style content hash: SHA-256 of `"blob <len>\0" ‖ content`.
pub fn content_hash(content: &[u8]) -> String {
    let mut h = Sha256::new();
    h.update(format!("blob {}\0", content.len()).as_bytes());
    h.update(content);
    hex::encode(h.finalize())
}

/// Provenance record written next to every study output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config: serde_json::Value,
    pub inputs: Vec<(String, String)>,
    pub config_hash: String,
    pub created_unix: u64,
}

impl Manifest {
    /// `inputs` pairs a name with the file contents to hash.
    pub fn new<C: Serialize>(command: &str, config: &C, inputs: &[(&str, &[u8])]) -> Result<Self> {
        let config = serde_json::to_value(config)?;
        let config_hash = content_hash(serde_json::to_string(&config)?.as_bytes());
        let created_unix = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        Ok(Manifest {
            tool: env!("CARGO_PKG_NAME").into(),
            version: env!("CARGO_PKG_VERSION").into(),
            command: command.into(),
            config,
            inputs: inputs.iter().map(|(name, bytes)| (name.to_string(), content_hash(bytes))).collect(),
            config_hash,
            created_unix,
        })
    }

    /// Writes the manifest as `<output>.manifest.json`.
    pub fn write_beside(&self, output: &Path) -> Result<()> {
        let mut name = output.as_os_str().to_owned();
        name.push(".manifest.json");
        std::fs::write(name, serde_json::to_string_pretty(self)? + "\n")?;
        Ok(())
    }
}
