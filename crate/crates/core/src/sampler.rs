//! Drawing balls from a [`PowerLaw`]: fixed-n samples, nested trajectories
//! over a time grid, and poissonized samples.
//!
//! Head urns are drawn by inverse CDF over the cumulative table, with a guide
//! table narrowing the binary search. Urns past the table are drawn exactly
//! by rejection from a discretized Pareto proposal. Tail indices too large
//! for a `u64` get an opaque label `2^63 | bits(ln y)` instead. That label is
//! unique and preserves order, which is all the statistics need.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::law::{Mode, PowerLaw};
use crate::occupancy::{OccupancyCounts, StatisticsSnapshot, StreamAccumulator};
use crate::{Error, Result};

/// Largest tail index returned as a plain integer.
const LABEL_LN_THRESHOLD: f64 = 62.0 * std::f64::consts::LN_2;
const LABEL_BIT: u64 = 1 << 63;

/// Master seed plus stream index. Each `(master, stream)` pair selects an
/// independent ChaCha8 keystream.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SeedSpec {
    pub master: u64,
    pub stream: u64,
}

impl SeedSpec {
    pub fn new(master: u64, stream: u64) -> Self {
        SeedSpec { master, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.master);
        rng.set_stream(self.stream);
        rng
    }
}

#[derive(Clone, Debug)]
struct TailSampler {
    first: u64,
    y0: f64,
    ln_y0: f64,
    inv_s1: f64,
    s: f64,
    r0: f64,
}

impl TailSampler {
    /// Ratio of the target mass to the proposal mass at `y`, up to a constant;
    /// decreasing in `y`, tending to 1.
    fn ratio(&self, y: f64) -> f64 {
        if y > 1e15 {
            return 1.0;
        }
        (self.s - 1.0) / (y * -((1.0 - self.s) * (1.0 / y).ln_1p()).exp_m1())
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        loop {
            let v: f64 = 1.0 - rng.random::<f64>();
            let ln_x = self.ln_y0 - v.ln() * self.inv_s1;
            let accept: f64 = rng.random();
            if ln_x > LABEL_LN_THRESHOLD {
                let x = ln_x.exp();
                if accept * self.r0 <= self.ratio(x) {
                    return LABEL_BIT | ln_x.to_bits();
                }
            } else {
                let offset = (ln_x.exp() - self.y0).floor().max(0.0);
                if accept * self.r0 <= self.ratio(self.y0 + offset) {
                    return self.first + offset as u64;
                }
            }
        }
    }
}

/// Per-ball sampler for one law; cheap to build and shareable by reference.
#[derive(Clone, Debug)]
pub struct UrnSampler<'a> {
    law: &'a PowerLaw,
    head_mass: f64,
    tail: Option<TailSampler>,
}

impl<'a> UrnSampler<'a> {
    pub fn new(law: &'a PowerLaw) -> Self {
        let tail = law.power_tail().and_then(|(_, shift, s)| {
            if law.tail_mass() <= 0.0 {
                return None;
            }
            let first = law.first_index() + law.table_len() as u64;
            let y0 = first as f64 + shift;
            let mut t = TailSampler { first, y0, ln_y0: y0.ln(), inv_s1: 1.0 / (s - 1.0), s, r0: 1.0 };
            t.r0 = t.ratio(y0);
            Some(t)
        });
        UrnSampler { law, head_mass: law.head_mass(), tail }
    }

    /// Urn index of one ball.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let u: f64 = rng.random();
        match &self.tail {
            Some(tail) if u >= self.head_mass => tail.draw(rng),
            _ => self.law.first_index() + self.head_index(u) as u64,
        }
    }

    fn head_index(&self, u: f64) -> usize {
        let cdf = self.law.cdf();
        let guide = self.law.guide();
        let buckets = guide.len() - 1;
        let b = ((u * buckets as f64) as usize).min(buckets - 1);
        let lo = guide[b] as usize;
        let hi = (guide[b + 1] as usize + 1).min(cdf.len());
        let idx = lo + cdf[lo..hi].partition_point(|&c| c <= u);
        idx.min(cdf.len() - 1)
    }
}

/// `n` independent balls.
pub fn sample_fixed(law: &PowerLaw, n: u64, seed: SeedSpec) -> Result<OccupancyCounts> {
    if n == 0 {
        return Err(Error::domain("sample size must be >= 1"));
    }
    let sampler = UrnSampler::new(law);
    let mut rng = seed.rng();
    let mut map: FxHashMap<u64, u64> = FxHashMap::default();
    for _ in 0..n {
        *map.entry(sampler.draw(&mut rng)).or_insert(0) += 1;
    }
    Ok(OccupancyCounts::new_unchecked(map.into_iter().collect(), n, None, Mode::Fixed))
}

/// Ball counts at which a trajectory over `grid` takes snapshots.
pub fn checkpoints(n: u64, grid: &[f64]) -> Result<Vec<u64>> {
    if grid.is_empty() {
        return Err(Error::usage("time grid is empty"));
    }
    for (i, &t) in grid.iter().enumerate() {
        if !(t > 0.0 && t <= 1.0) {
            return Err(Error::usage(format!("time grid values must lie in (0,1], got {t}")));
        }
        if i > 0 && t <= grid[i - 1] {
            return Err(Error::usage("time grid must be strictly increasing"));
        }
    }
    Ok(grid.iter().map(|&t| (n as f64 * t).floor() as u64).collect())
}

/// Runs one nested trajectory of `n` balls into `acc` (which is cleared
/// first), calling `emit` at every checkpoint. Checkpoints must be
/// non-decreasing and at most `n`.
pub(crate) fn run_trajectory<R: Rng + ?Sized>(
    sampler: &UrnSampler<'_>,
    rng: &mut R,
    marks: &[u64],
    acc: &mut StreamAccumulator,
    mut emit: impl FnMut(usize, &StreamAccumulator),
) {
    acc.clear();
    for (i, &mark) in marks.iter().enumerate() {
        while acc.balls() < mark {
            acc.add_ball(sampler.draw(rng));
        }
        emit(i, acc);
    }
}

/// One pass of `n` sequential balls with a snapshot at each `⌊n·t⌋`. The
/// first `⌊nτ⌋` balls are a prefix of the first `⌊nt⌋` for `τ < t`.
pub fn sample_trajectory(
    law: &PowerLaw,
    n: u64,
    grid: &[f64],
    seed: SeedSpec,
    k_max: u32,
) -> Result<Vec<StatisticsSnapshot>> {
    if n == 0 {
        return Err(Error::domain("sample size must be >= 1"));
    }
    let marks = checkpoints(n, grid)?;
    let sampler = UrnSampler::new(law);
    let mut rng = seed.rng();
    let mut acc = StreamAccumulator::new(k_max)?;
    let mut out = Vec::with_capacity(marks.len());
    run_trajectory(&sampler, &mut rng, &marks, &mut acc, |_, a| out.push(a.snapshot()));
    Ok(out)
}

/// Poisson(`t`) balls. Equivalently, independent Poisson(`t·p_i`) counts per urn.
pub fn sample_poissonized(law: &PowerLaw, t: f64, seed: SeedSpec) -> Result<OccupancyCounts> {
    if !(t.is_finite() && t > 0.0) {
        return Err(Error::domain(format!("poisson horizon must be positive, got {t}")));
    }
    let mut rng = seed.rng();
    let total = Poisson::new(t).map_err(|e| Error::domain(e.to_string()))?.sample(&mut rng) as u64;
    let sampler = UrnSampler::new(law);
    let mut map: BTreeMap<u64, u64> = BTreeMap::new();
    for _ in 0..total {
        *map.entry(sampler.draw(&mut rng)).or_insert(0) += 1;
    }
    Ok(OccupancyCounts::new_unchecked(map, total, Some(t), Mode::Poissonized))
}
