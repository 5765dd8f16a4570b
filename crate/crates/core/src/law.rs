//! Urn probability laws with power-law decay, Karlin's counting function
//! `α(x) = max{j : p_j ≥ 1/x}`, and exact finite-`n` moment oracles.
//!
//! Analytic laws (`zipf`, `mandelbrot`) have the form
//! `p_i = scale · (i + shift)^{-1/θ}` on `i ≥ first`. Their cumulative table
//! covers the head of the support; the rest is represented analytically, so
//! that sampling stays exact on the infinite support and the moment oracles
//! add the tail through Hurwitz-zeta power sums instead of a truncation bound.
//! Table laws carry an explicit finite probability vector.

use std::io::Read;

use serde::{Deserialize, Serialize};

use crate::specfun::{hurwitz_unchecked, ln_factorial, ln_gamma_unchecked, ln_hurwitz, zeta};
use crate::{Error, Result};

/// Largest number of urns held in the cumulative table.
pub const MAX_TABLE: usize = 1 << 22;

/// Number of buckets in the inverse-CDF guide table.
const GUIDE_BUCKETS: usize = 1 << 18;

/// Oracles sum urns explicitly while `n·p_i` exceeds this, then switch to the
/// power-series tail.
const SERIES_SWITCH: f64 = 0.05;
const SERIES_TERMS: u32 = 14;

/// Relative slack when deciding `p_j ≥ 1/x`.
const ALPHA_TOL: f64 = 1e-14;

/// Occupancy statistic of a sample.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Statistic {
    /// Number of occupied urns, `R_n`.
    R,
    /// Number of urns with an odd count, `U_n`.
    U,
    /// Number of urns with exactly `k` balls, `R_{n,k}`.
    Rk(u32),
    /// Number of urns with at least `k` balls, `R*_{n,k}`.
    RStar(u32),
}

impl Statistic {
    fn check(self) -> Result<()> {
        match self {
            Statistic::Rk(0) | Statistic::RStar(0) => {
                Err(Error::usage("count statistics need k >= 1"))
            }
            _ => Ok(()),
        }
    }
}

impl std::fmt::Display for Statistic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Statistic::R => write!(f, "R"),
            Statistic::U => write!(f, "U"),
            Statistic::Rk(k) => write!(f, "R{k}"),
            Statistic::RStar(k) => write!(f, "RStar{k}"),
        }
    }
}

/// Fixed number of balls, or a Poisson number of balls with the given mean.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Fixed,
    Poissonized,
}

#[derive(Clone, Debug)]
enum Shape {
    /// `p_i = scale · (i + shift)^{-s}` for `i ≥ first`.
    Power { scale: f64, shift: f64, s: f64 },
    /// Explicit probabilities of urns `first..first+len`.
    Table { probs: Vec<f64> },
}

/// An urn probability law `p_1 ≥ p_2 ≥ … > 0` with exponent θ.
///
/// Immutable after construction and cheap to share between threads by
/// reference.
#[derive(Clone, Debug)]
pub struct PowerLaw {
    theta: f64,
    i0: u64,
    c: f64,
    first: u64,
    shape: Shape,
    cutoff: u64,
    cdf: Vec<f64>,
    guide: Vec<u32>,
    tail_mass: f64,
    discarded_mass: f64,
}

fn check_theta(theta: f64) -> Result<()> {
    if theta.is_finite() && theta > 0.0 && theta < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("theta must lie in (0,1), got {theta}")))
    }
}

impl PowerLaw {
    /// Shifted zeta law `p_i = (i − i0)^{-1/θ} / ζ(1/θ)` for `i > i0`.
    ///
    /// `cutoff` is the smallest index beyond which less than `tail_epsilon`
    /// of the mass remains. The cumulative table stops at
    /// `min(cutoff, i0 + MAX_TABLE)`.
    pub fn zipf(theta: f64, i0: u64, tail_epsilon: f64) -> Result<Self> {
        check_theta(theta)?;
        let s = 1.0 / theta;
        let scale = 1.0 / zeta(s)?;
        Self::power(theta, i0, i0 + 1, scale, -(i0 as f64), tail_epsilon)
    }

    /// Mandelbrot law `p_i = c·(i + β)^{-1/θ}` for `i ≥ 1`, normalized
    /// numerically through the Hurwitz zeta function.
    pub fn mandelbrot(theta: f64, beta: f64, tail_epsilon: f64) -> Result<Self> {
        check_theta(theta)?;
        if !(beta.is_finite() && beta >= 0.0) {
            return Err(Error::domain(format!("beta must be finite and >= 0, got {beta}")));
        }
        let s = 1.0 / theta;
        let scale = 1.0 / hurwitz_unchecked(s, 1.0 + beta);
        Self::power(theta, 0, 1, scale, beta, tail_epsilon)
    }

    fn power(
        theta: f64,
        i0: u64,
        first: u64,
        scale: f64,
        shift: f64,
        tail_epsilon: f64,
    ) -> Result<Self> {
        if !(tail_epsilon > 0.0 && tail_epsilon <= 1e-6) {
            return Err(Error::domain(format!(
                "tail_epsilon must lie in (0, 1e-6], got {tail_epsilon}"
            )));
        }
        let s = 1.0 / theta;
        // mass strictly beyond index i
        let beyond = |i: u64| scale * hurwitz_unchecked(s, i as f64 + 1.0 + shift);

        // integral bound gives a starting point, then bisect on the exact tail
        let a0 = first as f64 + shift;
        let estimate = ((s - 1.0) * tail_epsilon / scale).powf(-1.0 / (s - 1.0)) - shift + a0;
        let cutoff = if !(estimate < 1e18) {
            u64::MAX
        } else {
            let mut hi = (estimate.ceil() as u64 + 2).max(first);
            while beyond(hi) >= tail_epsilon {
                hi = hi.saturating_mul(2);
            }
            let mut lo = first - 1;
            // invariant: beyond(lo) >= eps (or lo below support), beyond(hi) < eps
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                if beyond(mid) < tail_epsilon {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            hi
        };

        let len = ((cutoff - first + 1) as u128).min(MAX_TABLE as u128) as usize;
        let mut cdf = Vec::with_capacity(len);
        let mut acc = NeumaierSum::default();
        for m in 0..len {
            let p = scale * (first as f64 + m as f64 + shift).powf(-s);
            acc.add(p);
            cdf.push(acc.value());
        }
        let tail_mass = beyond(first + len as u64 - 1);
        let guide = build_guide(&cdf);
        Ok(PowerLaw {
            theta,
            i0,
            c: scale,
            first,
            shape: Shape::Power { scale, shift, s },
            cutoff,
            cdf,
            guide,
            tail_mass,
            discarded_mass: 0.0,
        })
    }

    /// Law given by an explicit probability table for urns `1..=len`.
    ///
    /// Probabilities must be positive and non-increasing. They are
    /// renormalized to sum to one; any missing mass (`1 − Σ p`) is recorded
    /// in [`PowerLaw::discarded_mass`]. `theta` and `c` are the nominal
    /// exponent and constant the leading-term formulas use.
    pub fn from_table(probs: Vec<f64>, theta: f64, c: f64) -> Result<Self> {
        check_theta(theta)?;
        if !(c.is_finite() && c > 0.0) {
            return Err(Error::domain(format!("c must be positive, got {c}")));
        }
        if probs.is_empty() {
            return Err(Error::domain("probability table is empty"));
        }
        for (i, &p) in probs.iter().enumerate() {
            if !(p.is_finite() && p > 0.0) {
                return Err(Error::domain(format!("probability of urn {} is not positive", i + 1)));
            }
            if i > 0 && p > probs[i - 1] {
                return Err(Error::domain(format!(
                    "probabilities must be non-increasing; urn {} exceeds urn {}",
                    i + 1,
                    i
                )));
            }
        }
        let mut total = NeumaierSum::default();
        probs.iter().for_each(|&p| total.add(p));
        let total = total.value();
        let probs: Vec<f64> = probs.iter().map(|p| p / total).collect();
        let mut acc = NeumaierSum::default();
        let cdf: Vec<f64> = probs
            .iter()
            .map(|&p| {
                acc.add(p);
                acc.value()
            })
            .collect();
        let guide = build_guide(&cdf);
        Ok(PowerLaw {
            theta,
            i0: 0,
            c,
            first: 1,
            cutoff: probs.len() as u64,
            shape: Shape::Table { probs },
            cdf,
            guide,
            tail_mass: 0.0,
            discarded_mass: (1.0 - total).max(0.0),
        })
    }

    /// Reads a table law from CSV with header `index,probability`; indices
    /// must be exactly `1..=len` in any order.
    pub fn from_csv<R: Read>(reader: R, theta: f64, c: f64) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "index" || &headers[1] != "probability" {
            return Err(Error::Input {
                location: "line 1".into(),
                message: "expected header `index,probability`".into(),
            });
        }
        let mut rows: Vec<(u64, f64)> = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let line = rec.position().map(|p| p.line()).unwrap_or(0);
            let bad = |m: &str| Error::Input { location: format!("line {line}"), message: m.into() };
            if rec.len() != 2 {
                return Err(bad("expected two columns"));
            }
            let idx: u64 = rec[0].parse().map_err(|_| bad("index is not a positive integer"))?;
            let p: f64 = rec[1].parse().map_err(|_| bad("probability is not a number"))?;
            rows.push((idx, p));
        }
        rows.sort_by_key(|r| r.0);
        for (pos, &(idx, _)) in rows.iter().enumerate() {
            if idx != pos as u64 + 1 {
                return Err(Error::Input {
                    location: format!("index {idx}"),
                    message: "indices must be exactly 1..=len without gaps or duplicates".into(),
                });
            }
        }
        Self::from_table(rows.into_iter().map(|r| r.1).collect(), theta, c)
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    /// Index shift `i0` of the zeta law (0 for other laws).
    pub fn i0(&self) -> u64 {
        self.i0
    }

    /// Constant `c` in `p_i ~ c·i^{-1/θ}`.
    pub fn c(&self) -> f64 {
        self.c
    }

    /// Smallest index with positive probability.
    pub fn first_index(&self) -> u64 {
        self.first
    }

    /// Index beyond which less than the requested tail mass remains
    /// (saturates at `u64::MAX` when that index is not representable).
    pub fn cutoff(&self) -> u64 {
        self.cutoff
    }

    /// Number of urns in the cumulative table.
    pub fn table_len(&self) -> usize {
        self.cdf.len()
    }

    /// Cumulative probability up to and including the last tabulated urn.
    pub fn head_mass(&self) -> f64 {
        *self.cdf.last().expect("non-empty table")
    }

    /// Probability beyond the last tabulated urn (sampled analytically).
    pub fn tail_mass(&self) -> f64 {
        self.tail_mass
    }

    /// Mass a table law lost to renormalization.
    pub fn discarded_mass(&self) -> f64 {
        self.discarded_mass
    }

    pub fn is_table(&self) -> bool {
        matches!(self.shape, Shape::Table { .. })
    }

    pub(crate) fn cdf(&self) -> &[f64] {
        &self.cdf
    }

    pub(crate) fn guide(&self) -> &[u32] {
        &self.guide
    }

    /// `(scale, shift, s)` of the analytic tail, if any.
    pub(crate) fn power_tail(&self) -> Option<(f64, f64, f64)> {
        match self.shape {
            Shape::Power { scale, shift, s } => Some((scale, shift, s)),
            Shape::Table { .. } => None,
        }
    }

    /// `p_i`; zero outside the support.
    pub fn probability(&self, i: u64) -> f64 {
        if i < self.first {
            return 0.0;
        }
        match &self.shape {
            Shape::Power { scale, shift, s } => scale * (i as f64 + shift).powf(-s),
            Shape::Table { probs } => probs.get((i - self.first) as usize).copied().unwrap_or(0.0),
        }
    }

    /// Karlin's `α(x) = max{j : p_j ≥ 1/x}`, or 0 when no urn qualifies.
    ///
    /// Ties within a relative `1e-14` count as `p_j ≥ 1/x`.
    pub fn alpha(&self, x: f64) -> Result<u64> {
        if !(x.is_finite() && x > 0.0) {
            return Err(Error::domain(format!("alpha requires finite x > 0, got {x}")));
        }
        let ok = |j: u64| j >= self.first && self.probability(j) * x >= 1.0 - ALPHA_TOL;
        match &self.shape {
            Shape::Power { scale, shift, .. } => {
                let y = (scale * x).powf(self.theta) - shift;
                let mut j = if y < 0.0 {
                    0
                } else if y >= 9e18 {
                    u64::MAX - 1
                } else {
                    y.floor() as u64
                };
                while j > 0 && !ok(j) {
                    j -= 1;
                }
                while ok(j + 1) {
                    j += 1;
                }
                Ok(if ok(j) { j } else { 0 })
            }
            Shape::Table { probs } => {
                let count = probs.partition_point(|&p| p * x >= 1.0 - ALPHA_TOL);
                Ok(if count == 0 { 0 } else { self.first - 1 + count as u64 })
            }
        }
    }

    /// Leading term `(c x)^θ` of `α(x)`.
    pub fn alpha_leading_term(&self, x: f64) -> f64 {
        (self.c * x).powf(self.theta)
    }

    /// Closed-form leading term of the expectation of `stat` at sample size `n`:
    /// `Γ(1−θ)(cn)^θ` for R, `2^{θ−1}Γ(1−θ)(cn)^θ` for U,
    /// `θΓ(k−θ)/k!·(cn)^θ` for `R_{n,k}` and `Γ(k−θ)/(k−1)!·(cn)^θ` for `R*_{n,k}`.
    pub fn karlin_leading_term(&self, n: f64, stat: Statistic) -> Result<f64> {
        stat.check()?;
        if !(n.is_finite() && n > 0.0) {
            return Err(Error::domain(format!("n must be positive, got {n}")));
        }
        let th = self.theta;
        let scale = (self.c * n).powf(th);
        let coef = match stat {
            Statistic::R => ln_gamma_unchecked(1.0 - th).exp(),
            Statistic::U => (2f64.powf(th - 1.0)) * ln_gamma_unchecked(1.0 - th).exp(),
            Statistic::Rk(k) => {
                let k = k as f64;
                th * (ln_gamma_unchecked(k - th) - ln_gamma_unchecked(k + 1.0)).exp()
            }
            Statistic::RStar(k) => {
                let k = k as f64;
                (ln_gamma_unchecked(k - th) - ln_gamma_unchecked(k)).exp()
            }
        };
        Ok(coef * scale)
    }

    /// Exact expectation of `stat` for `n` balls (`Mode::Fixed`, integer `n`)
    /// or a Poisson(`n`) number of balls.
    ///
    /// Urns with `n·p_i > 0.05` are summed term by term; the remaining urns of
    /// an analytic law are added through the power series of the per-urn
    /// expectation in `n·p`, whose power sums are Hurwitz zeta values.
    pub fn expected_statistic(&self, n: f64, stat: Statistic, mode: Mode) -> Result<f64> {
        stat.check()?;
        if !(n.is_finite() && n >= 1.0) {
            return Err(Error::domain(format!("n must be >= 1, got {n}")));
        }
        if mode == Mode::Fixed && n.fract() != 0.0 {
            return Err(Error::domain(format!("fixed-n mode needs an integer n, got {n}")));
        }
        if let Statistic::RStar(k) = stat {
            let mut v = self.expected_statistic(n, Statistic::R, mode)?;
            for m in 1..k {
                v -= self.expected_statistic(n, Statistic::Rk(m), mode)?;
            }
            return Ok(v.max(0.0));
        }
        let per_urn = UrnExpectation::new(stat, mode, n);
        let mut acc = NeumaierSum::default();
        match &self.shape {
            Shape::Table { probs } => {
                probs.iter().for_each(|&p| acc.add(per_urn.value(p)));
            }
            &Shape::Power { scale, shift, s } => {
                let th = self.theta;
                let last_explicit = ((n * scale / SERIES_SWITCH).powf(th) - shift).ceil() - 1.0;
                let last = if last_explicit < self.first as f64 {
                    self.first - 1
                } else {
                    last_explicit as u64
                };
                // smallest terms first
                let mut i = last;
                while i >= self.first {
                    acc.add(per_urn.value(scale * (i as f64 + shift).powf(-s)));
                    i -= 1;
                }
                let a = last as f64 + 1.0 + shift;
                let ln_ns = (n * scale).ln();
                for (j, b) in per_urn.series() {
                    if b == 0.0 {
                        continue;
                    }
                    // Σ_{i>last} (n p_i)^j, with every n p_i ≤ SERIES_SWITCH
                    let power_sum = (j as f64 * ln_ns + ln_hurwitz(j as f64 * s, a)).exp();
                    acc.add(b * power_sum);
                }
            }
        }
        Ok(acc.value())
    }
}

fn build_guide(cdf: &[f64]) -> Vec<u32> {
    let buckets = GUIDE_BUCKETS.min(cdf.len().max(1));
    let mut guide = Vec::with_capacity(buckets + 1);
    let mut idx = 0usize;
    for b in 0..=buckets {
        let edge = b as f64 / buckets as f64;
        while idx < cdf.len() && cdf[idx] <= edge {
            idx += 1;
        }
        guide.push(idx as u32);
    }
    guide
}

/// Per-urn expectation of a statistic as a function of the urn probability.
struct UrnExpectation {
    stat: Statistic,
    mode: Mode,
    n: f64,
}

impl UrnExpectation {
    fn new(stat: Statistic, mode: Mode, n: f64) -> Self {
        UrnExpectation { stat, mode, n }
    }

    fn value(&self, p: f64) -> f64 {
        let n = self.n;
        match (self.mode, self.stat) {
            (Mode::Fixed, Statistic::R) => -(n * (-p).ln_1p()).exp_m1(),
            (Mode::Fixed, Statistic::U) => {
                if 2.0 * p <= 1.0 {
                    -0.5 * (n * (-2.0 * p).ln_1p()).exp_m1()
                } else {
                    // (1−2p)^n with a negative base
                    let mag = (n * (2.0 * p - 1.0).ln()).exp();
                    let sign = if (n as u64).is_multiple_of(2) { 1.0 } else { -1.0 };
                    0.5 * (1.0 - sign * mag)
                }
            }
            (Mode::Fixed, Statistic::Rk(k)) => {
                let k = k as f64;
                if k > n {
                    0.0
                } else if p >= 1.0 {
                    if k == n { 1.0 } else { 0.0 }
                } else {
                    let ln_choose =
                        ln_gamma_unchecked(n + 1.0) - ln_gamma_unchecked(k + 1.0) - ln_gamma_unchecked(n - k + 1.0);
                    (ln_choose + k * p.ln() + (n - k) * (-p).ln_1p()).exp()
                }
            }
            (Mode::Poissonized, Statistic::R) => -(-n * p).exp_m1(),
            (Mode::Poissonized, Statistic::U) => -0.5 * (-2.0 * n * p).exp_m1(),
            (Mode::Poissonized, Statistic::Rk(k)) => {
                let lam = n * p;
                (-lam + k as f64 * lam.ln() - ln_factorial(k as u64)).exp()
            }
            (_, Statistic::RStar(_)) => unreachable!("RStar is reduced to R and Rk"),
        }
    }

    /// Coefficients `b_j` with `E = Σ_j b_j (n p)^j`, as `(j, b_j)`.
    fn series(&self) -> Vec<(u32, f64)> {
        let n = self.n;
        // falling(n, j) / n^j for fixed n; 1 when poissonized
        let shrink = |j: u32| -> f64 {
            match self.mode {
                Mode::Poissonized => 1.0,
                Mode::Fixed => (0..j).map(|r| ((n - r as f64) / n).max(0.0)).product(),
            }
        };
        let sign = |l: u32| if l.is_multiple_of(2) { 1.0 } else { -1.0 };
        let inv_fact = |j: u32| (-ln_factorial(j as u64)).exp();
        match self.stat {
            Statistic::R => (1..=SERIES_TERMS)
                .map(|j| (j, sign(j + 1) * shrink(j) * inv_fact(j)))
                .collect(),
            Statistic::U => (1..=SERIES_TERMS)
                .map(|j| (j, sign(j + 1) * 2f64.powi(j as i32 - 1) * shrink(j) * inv_fact(j)))
                .collect(),
            Statistic::Rk(k) => (0..=SERIES_TERMS)
                .map(|l| (k + l, sign(l) * shrink(k + l) * inv_fact(k) * inv_fact(l)))
                .collect(),
            Statistic::RStar(_) => unreachable!("RStar is reduced to R and Rk"),
        }
    }
}

/// Compensated summation.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct NeumaierSum {
    sum: f64,
    comp: f64,
}

impl NeumaierSum {
    pub(crate) fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}
