//! Estimators of θ from occupancy statistics.
//!
//! - Implicit estimators solve `S_n = g_S(θ)` where `g_S` is the Karlin
//!   leading term of `E S_n` with a known `c(θ)`. They use `S ∈ {R, U, R_k}`.
//! - Ratio estimators need no `c`. They are `R_{n,1}/R_n` and
//!   `(kR_{n,k} − (k+1)R_{n,k+1})/R_{n,k}`.
//! - The baseline `ln R_n / ln n` is consistent but has no normal limit.
//!
//! Standard errors plug the estimate into the limiting variances from
//! [`crate::asymptotics`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::asymptotics::{implicit_variance, sigma0_sq, sigma_k_sq, ImplicitKind};
use crate::numfmt::round10;
use crate::occupancy::StatisticsSnapshot;
use crate::specfun::{ln_factorial, ln_gamma_unchecked, normal_quantile, zeta};
use crate::{Error, Result};

/// Two-sided 95% standard normal quantile.
pub const Z95: f64 = 1.959963985;

const GRID_POINTS: usize = 2000;
const GRID_LO: f64 = 1e-4;
const GRID_HI: f64 = 1.0 - 1e-4;
const BISECTION_TOL: f64 = 1e-10;
const STDERR_CLAMP: (f64, f64) = (0.01, 0.99);

/// Estimator identity; parses from and prints as `implicit-r`, `implicit-u`,
/// `implicit-rk(k)`, `ratio-r1`, `ratio-k(k)` and `log-ratio`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EstimatorId {
    ImplicitR,
    ImplicitU,
    ImplicitRk(u32),
    RatioR1,
    RatioK(u32),
    LogRatio,
}

impl EstimatorId {
    pub fn is_implicit(&self) -> bool {
        matches!(self, EstimatorId::ImplicitR | EstimatorId::ImplicitU | EstimatorId::ImplicitRk(_))
    }

    /// Largest `k` of `R_{n,k}` the estimator reads from a snapshot.
    pub fn k_needed(&self) -> u32 {
        match *self {
            EstimatorId::ImplicitRk(k) => k,
            EstimatorId::RatioK(k) => k + 1,
            EstimatorId::RatioR1 => 1,
            _ => 0,
        }
    }
}

impl fmt::Display for EstimatorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EstimatorId::ImplicitR => write!(f, "implicit-r"),
            EstimatorId::ImplicitU => write!(f, "implicit-u"),
            EstimatorId::ImplicitRk(k) => write!(f, "implicit-rk({k})"),
            EstimatorId::RatioR1 => write!(f, "ratio-r1"),
            EstimatorId::RatioK(k) => write!(f, "ratio-k({k})"),
            EstimatorId::LogRatio => write!(f, "log-ratio"),
        }
    }
}

impl FromStr for EstimatorId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        let with_k = |prefix: &str| -> Option<Result<u32>> {
            let rest = lower.strip_prefix(prefix)?.strip_prefix('(')?.strip_suffix(')')?;
            Some(match rest.parse::<u32>() {
                Ok(k) if k >= 1 => Ok(k),
                _ => Err(Error::usage(format!("invalid k in estimator `{s}`"))),
            })
        };
        match lower.as_str() {
            "implicit-r" => return Ok(EstimatorId::ImplicitR),
            "implicit-u" => return Ok(EstimatorId::ImplicitU),
            "ratio-r1" => return Ok(EstimatorId::RatioR1),
            "log-ratio" => return Ok(EstimatorId::LogRatio),
            _ => {}
        }
        if let Some(k) = with_k("implicit-rk") {
            return Ok(EstimatorId::ImplicitRk(k?));
        }
        if let Some(k) = with_k("ratio-k") {
            return Ok(EstimatorId::RatioK(k?));
        }
        Err(Error::usage(format!(
            "unknown estimator `{s}` (expected implicit-r, implicit-u, implicit-rk(k), ratio-r1, ratio-k(k), log-ratio)"
        )))
    }
}

impl Serialize for EstimatorId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for EstimatorId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Qualifiers attached to an estimate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flag {
    /// Point estimate outside the open interval (0,1).
    Degenerate,
    /// The estimator has no normal limit; the interval is degenerate.
    NoNormality,
    /// `c(θ)` is not differentiable, so the interval lacks asymptotic support.
    CiUnjustified,
    /// Several roots were found; the one closest to the log-ratio baseline
    /// was kept.
    AmbiguousRoot,
}

/// Root-finding details of implicit estimators.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Diagnostics {
    pub iterations: u32,
    pub bracket: Option<(f64, f64)>,
    pub roots: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub estimator: EstimatorId,
    pub theta_hat: f64,
    pub stderr: f64,
    pub ci: (f64, f64),
    pub level: f64,
    pub flags: Vec<Flag>,
    pub diagnostics: Diagnostics,
}

/// Exported form of an estimate, with every number rounded to ten
/// significant digits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EstimateRecord {
    pub estimator: EstimatorId,
    pub theta_hat: f64,
    pub stderr: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
    pub level: f64,
    pub flags: Vec<Flag>,
}

impl EstimateResult {
    pub fn record(&self) -> EstimateRecord {
        EstimateRecord {
            estimator: self.estimator,
            theta_hat: round10(self.theta_hat),
            stderr: round10(self.stderr),
            ci_lo: round10(self.ci.0),
            ci_hi: round10(self.ci.1),
            level: round10(self.level),
            flags: self.flags.clone(),
        }
    }
}

/// Normal quantile for a two-sided interval at `level`.
pub fn z_for_level(level: f64) -> Result<f64> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::usage(format!("confidence level must lie in (0,1), got {level}")));
    }
    if (level - 0.95).abs() < 1e-12 {
        return Ok(Z95);
    }
    normal_quantile(0.5 + 0.5 * level)
}

fn interval(theta: f64, stderr: f64, level: f64) -> Result<(f64, f64)> {
    let z = z_for_level(level)?;
    Ok(((theta - z * stderr).max(0.0), (theta + z * stderr).min(1.0)))
}

/// The known constant `c(θ)` the implicit estimators need.
#[derive(Clone, Debug, PartialEq)]
pub enum CModel {
    /// `c(θ) = 1/ζ(1/θ)`, the zeta law.
    Zeta,
    /// A constant `c`.
    Constant(f64),
    /// Piecewise-linear interpolation through `(θ, c)` knots, held constant
    /// beyond the end knots.
    Tabulated(Vec<(f64, f64)>),
}

impl CModel {
    pub fn tabulated(mut knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::usage("a c(theta) table needs at least two rows"));
        }
        knots.sort_by(|a, b| a.0.total_cmp(&b.0));
        for w in knots.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::usage(format!("duplicate theta {} in c(theta) table", w[0].0)));
            }
        }
        if knots.iter().any(|&(t, c)| !(t > 0.0 && t < 1.0 && c > 0.0 && c.is_finite())) {
            return Err(Error::usage("c(theta) table needs theta in (0,1) and positive c"));
        }
        Ok(CModel::Tabulated(knots))
    }

    /// Reads `theta,c` CSV rows.
    pub fn from_csv<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let mut knots = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let line = rec.position().map(|p| p.line()).unwrap_or(0);
            let bad = || Error::Input { location: format!("line {line}"), message: "expected numeric theta,c".into() };
            if rec.len() != 2 {
                return Err(bad());
            }
            let t: f64 = rec[0].parse().map_err(|_| bad())?;
            let c: f64 = rec[1].parse().map_err(|_| bad())?;
            knots.push((t, c));
        }
        Self::tabulated(knots)
    }

    pub fn c(&self, theta: f64) -> f64 {
        match self {
            CModel::Zeta => 1.0 / zeta(1.0 / theta).expect("theta in (0,1) gives s > 1"),
            CModel::Constant(c) => *c,
            CModel::Tabulated(knots) => {
                let pos = knots.partition_point(|k| k.0 <= theta);
                if pos == 0 {
                    knots[0].1
                } else if pos == knots.len() {
                    knots[knots.len() - 1].1
                } else {
                    let (a, b) = (knots[pos - 1], knots[pos]);
                    a.1 + (b.1 - a.1) * (theta - a.0) / (b.0 - a.0)
                }
            }
        }
    }

    /// Whether `c(θ)` is differentiable, as the normal limit requires.
    pub fn is_smooth(&self) -> bool {
        !matches!(self, CModel::Tabulated(_))
    }
}

/// `ln g(θ)` for the implicit equation of `kind`.
fn ln_leading(kind: ImplicitKind, theta: f64, ln_cn: f64) -> f64 {
    let coef = match kind {
        ImplicitKind::R => ln_gamma_unchecked(1.0 - theta),
        ImplicitKind::U => (theta - 1.0) * std::f64::consts::LN_2 + ln_gamma_unchecked(1.0 - theta),
        ImplicitKind::Rk(k) => {
            theta.ln() + ln_gamma_unchecked(k as f64 - theta) - ln_factorial(k as u64)
        }
    };
    coef + theta * ln_cn
}

/// Leading-term expectation `g(θ)` used by the implicit estimator.
pub fn implicit_equation(kind: ImplicitKind, theta: f64, n: f64, c_model: &CModel) -> f64 {
    ln_leading(kind, theta, (c_model.c(theta) * n).ln()).exp()
}

/// Solver for one implicit equation at fixed `n` and `c(θ)`. Caches the
/// bracketing grid so that repeated solves (Monte Carlo) are cheap.
#[derive(Clone, Debug)]
pub struct ImplicitSolver {
    kind: ImplicitKind,
    n: f64,
    c_model: CModel,
    grid: Vec<f64>,
    ln_g: Vec<f64>,
}

impl ImplicitSolver {
    pub fn new(kind: ImplicitKind, n: f64, c_model: CModel) -> Result<Self> {
        if !(n.is_finite() && n >= 2.0) {
            return Err(Error::domain(format!("implicit estimators need n >= 2, got {n}")));
        }
        if let ImplicitKind::Rk(0) = kind {
            return Err(Error::usage("implicit-rk needs k >= 1"));
        }
        let grid: Vec<f64> = (0..GRID_POINTS)
            .map(|i| GRID_LO + (GRID_HI - GRID_LO) * i as f64 / (GRID_POINTS - 1) as f64)
            .collect();
        let ln_g = grid.iter().map(|&t| ln_leading(kind, t, (c_model.c(t) * n).ln())).collect();
        Ok(ImplicitSolver { kind, n, c_model, grid, ln_g })
    }

    fn ln_g_at(&self, theta: f64) -> f64 {
        ln_leading(self.kind, theta, (self.c_model.c(theta) * self.n).ln())
    }

    /// All roots of `g(θ) = value` on the grid range, each with its
    /// bisection iteration count and final bracket.
    pub fn roots(&self, value: f64) -> Result<Vec<(f64, u32, (f64, f64))>> {
        if !(value.is_finite() && value >= 1.0) {
            return Err(Error::InsufficientData(format!(
                "implicit estimators need a statistic >= 1, got {value}"
            )));
        }
        let target = value.ln();
        let h: Vec<f64> = self.ln_g.iter().map(|g| g - target).collect();
        let mut out = Vec::new();
        if h[0] == 0.0 {
            out.push((self.grid[0], 0, (self.grid[0], self.grid[0])));
        }
        for i in 0..h.len() - 1 {
            let (ha, hb) = (h[i], h[i + 1]);
            if hb == 0.0 {
                out.push((self.grid[i + 1], 0, (self.grid[i + 1], self.grid[i + 1])));
            } else if ha != 0.0 && (ha < 0.0) != (hb < 0.0) {
                let (mut a, mut b, mut fa) = (self.grid[i], self.grid[i + 1], ha);
                let mut iterations = 0;
                while b - a >= BISECTION_TOL {
                    let m = 0.5 * (a + b);
                    let fm = self.ln_g_at(m) - target;
                    iterations += 1;
                    if fm == 0.0 {
                        a = m;
                        b = m;
                        break;
                    }
                    if (fm < 0.0) == (fa < 0.0) {
                        a = m;
                        fa = fm;
                    } else {
                        b = m;
                    }
                }
                out.push((0.5 * (a + b), iterations, (a, b)));
            }
        }
        if out.is_empty() {
            return Err(Error::NoRoot {
                theta_lo: GRID_LO,
                theta_hi: GRID_HI,
                g_lo: self.ln_g[0].exp(),
                g_hi: self.ln_g[self.ln_g.len() - 1].exp(),
                target: value,
            });
        }
        Ok(out)
    }

    /// Implicit estimate; several roots give [`Error::AmbiguousRoots`].
    pub fn estimate(&self, value: f64, level: f64) -> Result<EstimateResult> {
        let roots = self.roots(value)?;
        if roots.len() > 1 {
            return Err(Error::AmbiguousRoots { roots: roots.iter().map(|r| r.0).collect() });
        }
        self.finish(value, level, roots[0], Vec::new(), vec![roots[0].0])
    }

    /// Like [`ImplicitSolver::estimate`], but resolves several roots by
    /// keeping the one closest to `baseline` and flagging the result.
    pub fn estimate_resolved(&self, value: f64, level: f64, baseline: f64) -> Result<EstimateResult> {
        let roots = self.roots(value)?;
        let all: Vec<f64> = roots.iter().map(|r| r.0).collect();
        let best = *roots
            .iter()
            .min_by(|a, b| (a.0 - baseline).abs().total_cmp(&(b.0 - baseline).abs()))
            .expect("at least one root");
        let flags = if roots.len() > 1 { vec![Flag::AmbiguousRoot] } else { Vec::new() };
        self.finish(value, level, best, flags, all)
    }

    fn finish(
        &self,
        value: f64,
        level: f64,
        root: (f64, u32, (f64, f64)),
        mut flags: Vec<Flag>,
        roots: Vec<f64>,
    ) -> Result<EstimateResult> {
        let theta = root.0;
        let sigma2 = implicit_variance(theta, self.kind)?;
        let stderr = sigma2.sqrt() / (self.n.ln() * value.sqrt());
        if !self.c_model.is_smooth() {
            flags.push(Flag::CiUnjustified);
        }
        let estimator = match self.kind {
            ImplicitKind::R => EstimatorId::ImplicitR,
            ImplicitKind::U => EstimatorId::ImplicitU,
            ImplicitKind::Rk(k) => EstimatorId::ImplicitRk(k),
        };
        Ok(EstimateResult {
            estimator,
            theta_hat: theta,
            stderr,
            ci: interval(theta, stderr, level)?,
            level,
            flags,
            diagnostics: Diagnostics { iterations: root.1, bracket: Some(root.2), roots },
        })
    }
}

/// Solves `g(θ) = stat_value` for the implicit equation of `kind`.
pub fn implicit_estimate(
    stat_value: f64,
    n: f64,
    kind: ImplicitKind,
    c_model: &CModel,
    level: f64,
) -> Result<EstimateResult> {
    ImplicitSolver::new(kind, n, c_model.clone())?.estimate(stat_value, level)
}

fn ratio_result(
    estimator: EstimatorId,
    theta: f64,
    denominator: u64,
    variance: impl Fn(f64) -> Result<f64>,
    level: f64,
) -> Result<EstimateResult> {
    let mut flags = Vec::new();
    if !(theta > 0.0 && theta < 1.0) {
        flags.push(Flag::Degenerate);
    }
    let plug = theta.clamp(STDERR_CLAMP.0, STDERR_CLAMP.1);
    let stderr = (variance(plug)? / denominator as f64).sqrt();
    Ok(EstimateResult {
        estimator,
        theta_hat: theta,
        stderr,
        ci: interval(theta, stderr, level)?,
        level,
        flags,
        diagnostics: Diagnostics::default(),
    })
}

/// `θ̂ = R_{n,1}/R_n` with standard error `σ₀(θ̂)/√R_n`.
pub fn ratio_estimate_r1(snapshot: &StatisticsSnapshot, level: f64) -> Result<EstimateResult> {
    if snapshot.r == 0 {
        return Err(Error::InsufficientData("ratio-r1 needs at least one occupied urn".into()));
    }
    let theta = snapshot.r_exact(1)? as f64 / snapshot.r as f64;
    ratio_result(EstimatorId::RatioR1, theta, snapshot.r, sigma0_sq, level)
}

/// `θ̂_k = (kR_{n,k} − (k+1)R_{n,k+1})/R_{n,k}` with standard error
/// `σ_k(θ̂)/√R_{n,k}`.
pub fn ratio_estimate_k(snapshot: &StatisticsSnapshot, k: u32, level: f64) -> Result<EstimateResult> {
    if k == 0 {
        return Err(Error::usage("ratio-k needs k >= 1"));
    }
    if k + 1 > snapshot.k_max() {
        return Err(Error::usage(format!(
            "ratio-k({k}) needs R_{{n,{}}}, but the snapshot stops at k={}",
            k + 1,
            snapshot.k_max()
        )));
    }
    let rk = snapshot.r_exact(k)?;
    if rk == 0 {
        return Err(Error::InsufficientData(format!("ratio-k({k}) needs R_{{n,{k}}} >= 1")));
    }
    let rk1 = snapshot.r_exact(k + 1)?;
    let theta = (k as f64 * rk as f64 - (k + 1) as f64 * rk1 as f64) / rk as f64;
    ratio_result(EstimatorId::RatioK(k), theta, rk, |t| sigma_k_sq(t, k), level)
}

/// `θ̂ = ln R_n / ln n`; consistent but without a normal limit, so the
/// interval collapses to the point.
pub fn log_ratio_estimate(snapshot: &StatisticsSnapshot, level: f64) -> Result<EstimateResult> {
    z_for_level(level)?;
    if snapshot.n < 2 || snapshot.r == 0 {
        return Err(Error::InsufficientData("log-ratio needs n >= 2 and R_n >= 1".into()));
    }
    let theta = (snapshot.r as f64).ln() / (snapshot.n as f64).ln();
    let mut flags = vec![Flag::NoNormality];
    if !(theta > 0.0 && theta < 1.0) {
        flags.insert(0, Flag::Degenerate);
    }
    Ok(EstimateResult {
        estimator: EstimatorId::LogRatio,
        theta_hat: theta,
        stderr: 0.0,
        ci: (theta, theta),
        level,
        flags,
        diagnostics: Diagnostics::default(),
    })
}

/// Runs one estimator on a snapshot. Implicit estimators need `c_model`; a
/// multi-root implicit equation is resolved toward the log-ratio estimate.
pub fn estimate(
    id: EstimatorId,
    snapshot: &StatisticsSnapshot,
    c_model: Option<&CModel>,
    level: f64,
) -> Result<EstimateResult> {
    let implicit = |kind: ImplicitKind, value: u64| -> Result<EstimateResult> {
        let c_model = c_model.ok_or_else(|| {
            Error::usage(format!("{id} needs a known c(theta); pass a c model"))
        })?;
        let baseline = log_ratio_estimate(snapshot, level)?.theta_hat;
        ImplicitSolver::new(kind, snapshot.n as f64, c_model.clone())?.estimate_resolved(value as f64, level, baseline)
    };
    match id {
        EstimatorId::ImplicitR => implicit(ImplicitKind::R, snapshot.r),
        EstimatorId::ImplicitU => implicit(ImplicitKind::U, snapshot.u),
        EstimatorId::ImplicitRk(k) => implicit(ImplicitKind::Rk(k), snapshot.r_exact(k)?),
        EstimatorId::RatioR1 => ratio_estimate_r1(snapshot, level),
        EstimatorId::RatioK(k) => ratio_estimate_k(snapshot, k, level),
        EstimatorId::LogRatio => log_ratio_estimate(snapshot, level),
    }
}
