//! Occupancy statistics: `R_n`, `R_{n,k}`, `R*_{n,k}` and `U_n`, either from
//! a finished urn→count map or incrementally, one ball at a time.

use std::collections::BTreeMap;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::law::Mode;
use crate::{Error, Result};

/// Default number of exact-count statistics kept in a snapshot.
pub const DEFAULT_K_MAX: u32 = 8;

/// Urn → ball count for one realized sample. Empty urns are absent.
#[derive(Clone, Debug, PartialEq)]
pub struct OccupancyCounts {
    counts: BTreeMap<u64, u64>,
    balls: u64,
    horizon: Option<f64>,
    mode: Mode,
}

impl OccupancyCounts {
    /// Builds a fixed-n configuration from urn counts; zero counts are rejected.
    pub fn from_counts(counts: BTreeMap<u64, u64>) -> Result<Self> {
        if let Some((urn, _)) = counts.iter().find(|(_, &c)| c == 0) {
            return Err(Error::domain(format!("urn {urn} has a zero count")));
        }
        let balls = counts.values().sum();
        Ok(OccupancyCounts { counts, balls, horizon: None, mode: Mode::Fixed })
    }

    pub(crate) fn new_unchecked(
        counts: BTreeMap<u64, u64>,
        balls: u64,
        horizon: Option<f64>,
        mode: Mode,
    ) -> Self {
        OccupancyCounts { counts, balls, horizon, mode }
    }

    pub fn counts(&self) -> &BTreeMap<u64, u64> {
        &self.counts
    }

    /// Number of balls actually placed.
    pub fn balls(&self) -> u64 {
        self.balls
    }

    /// Poisson horizon `t` for poissonized samples.
    pub fn horizon(&self) -> Option<f64> {
        self.horizon
    }

    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// Writes `urn_index,count` rows sorted by urn index.
    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        w.write_record(["urn_index", "count"])?;
        for (urn, count) in &self.counts {
            w.write_record([urn.to_string(), count.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Reads `urn_index,count` rows.
    pub fn read_csv<R: std::io::Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers()?.clone();
        if headers.len() != 2 || &headers[0] != "urn_index" || &headers[1] != "count" {
            return Err(Error::Input {
                location: "line 1".into(),
                message: "expected header `urn_index,count`".into(),
            });
        }
        let mut counts = BTreeMap::new();
        for rec in rdr.records() {
            let rec = rec?;
            let line = rec.position().map(|p| p.line()).unwrap_or(0);
            let bad = |m: &str| Error::Input { location: format!("line {line}"), message: m.into() };
            if rec.len() != 2 {
                return Err(bad("expected two columns"));
            }
            let urn: u64 = rec[0].parse().map_err(|_| bad("urn_index is not an integer"))?;
            let count: u64 = rec[1].parse().map_err(|_| bad("count is not an integer"))?;
            if count == 0 {
                return Err(bad("count must be positive"));
            }
            if counts.insert(urn, count).is_some() {
                return Err(bad("duplicate urn_index"));
            }
        }
        Self::from_counts(counts)
    }
}

/// Occupancy statistics of one sample (or one point of a trajectory).
///
/// `r_k[k-1] = R_{n,k}` for `k = 1..=K` and `r_star_k[k-1] = R*_{n,k}` for
/// `k = 1..=K+1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StatisticsSnapshot {
    pub n: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
    pub r: u64,
    pub r_k: Vec<u64>,
    pub r_star_k: Vec<u64>,
    pub u: u64,
}

impl StatisticsSnapshot {
    pub fn k_max(&self) -> u32 {
        self.r_k.len() as u32
    }

    /// `R_{n,k}`.
    pub fn r_exact(&self, k: u32) -> Result<u64> {
        if k == 0 || k > self.k_max() {
            return Err(Error::usage(format!(
                "R_k requested for k={k}, snapshot holds k=1..={}",
                self.k_max()
            )));
        }
        Ok(self.r_k[k as usize - 1])
    }

    /// `R*_{n,k}`.
    pub fn r_at_least(&self, k: u32) -> Result<u64> {
        if k == 0 || k as usize > self.r_star_k.len() {
            return Err(Error::usage(format!(
                "R*_k requested for k={k}, snapshot holds k=1..={}",
                self.r_star_k.len()
            )));
        }
        Ok(self.r_star_k[k as usize - 1])
    }

    fn from_parts(n: u64, t: Option<f64>, distinct: u64, low: &[u64], odd: u64) -> Self {
        // low[c-1] = urns with exactly c balls, c = 1..=K
        let r_k = low.to_vec();
        let mut r_star_k = Vec::with_capacity(low.len() + 1);
        let mut at_least = distinct;
        r_star_k.push(at_least);
        for &exact in low {
            at_least -= exact;
            r_star_k.push(at_least);
        }
        StatisticsSnapshot { n, t, r: distinct, r_k, r_star_k, u: odd }
    }
}

/// Exact statistics of a realized configuration.
pub fn summarize(counts: &OccupancyCounts, k_max: u32) -> Result<StatisticsSnapshot> {
    if k_max == 0 {
        return Err(Error::usage("k_max must be >= 1"));
    }
    let mut low = vec![0u64; k_max as usize];
    let mut odd = 0;
    for &c in counts.counts.values() {
        if c <= k_max as u64 {
            low[c as usize - 1] += 1;
        }
        odd += c & 1;
    }
    Ok(StatisticsSnapshot::from_parts(
        counts.balls,
        counts.horizon,
        counts.counts.len() as u64,
        &low,
        odd,
    ))
}

/// Incremental occupancy state with O(1) insertion and O(K) snapshots.
#[derive(Clone, Debug)]
pub struct StreamAccumulator {
    k_max: u32,
    counts: FxHashMap<u64, u64>,
    /// `low[c-1]` = urns with exactly `c` balls for `c ≤ k_max`.
    low: Vec<u64>,
    odd: u64,
    balls: u64,
}

impl StreamAccumulator {
    pub fn new(k_max: u32) -> Result<Self> {
        if k_max == 0 {
            return Err(Error::usage("k_max must be >= 1"));
        }
        Ok(StreamAccumulator {
            k_max,
            counts: FxHashMap::default(),
            low: vec![0; k_max as usize],
            odd: 0,
            balls: 0,
        })
    }

    pub fn add_ball(&mut self, urn: u64) {
        let c = self.counts.entry(urn).or_insert(0);
        let old = *c;
        *c += 1;
        let k = self.k_max as u64;
        if old >= 1 && old <= k {
            self.low[old as usize - 1] -= 1;
        }
        if old < k {
            self.low[old as usize] += 1;
        }
        if old.is_multiple_of(2) {
            self.odd += 1;
        } else {
            self.odd -= 1;
        }
        self.balls += 1;
    }

    pub fn balls(&self) -> u64 {
        self.balls
    }

    pub fn snapshot(&self) -> StatisticsSnapshot {
        StatisticsSnapshot::from_parts(self.balls, None, self.counts.len() as u64, &self.low, self.odd)
    }

    /// Empties the state while keeping allocations for reuse.
    pub fn clear(&mut self) {
        self.counts.clear();
        self.low.iter_mut().for_each(|x| *x = 0);
        self.odd = 0;
        self.balls = 0;
    }

    /// Converts the accumulated state into a fixed-n configuration.
    pub fn into_counts(self) -> OccupancyCounts {
        let balls = self.balls;
        OccupancyCounts::new_unchecked(self.counts.into_iter().collect(), balls, None, Mode::Fixed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn counts(pairs: &[(u64, u64)]) -> OccupancyCounts {
        OccupancyCounts::from_counts(pairs.iter().copied().collect()).unwrap()
    }

    #[test]
    fn enumeration_example() {
        let s = summarize(&counts(&[(1, 3), (2, 1), (5, 1)]), 8).unwrap();
        assert_eq!(s.r, 3);
        assert_eq!(s.r_exact(1).unwrap(), 2);
        assert_eq!(s.r_exact(2).unwrap(), 0);
        assert_eq!(s.r_exact(3).unwrap(), 1);
        assert_eq!(s.r_at_least(2).unwrap(), 1);
        assert_eq!(s.u, 3);
        assert_eq!(s.n, 5);
    }

    #[test]
    fn empty_and_singletons() {
        let s = summarize(&counts(&[]), 4).unwrap();
        assert_eq!((s.r, s.u, s.n), (0, 0, 0));
        assert!(s.r_k.iter().chain(&s.r_star_k).all(|&x| x == 0));
        let singles: Vec<(u64, u64)> = (1..=50).map(|i| (i, 1)).collect();
        let s = summarize(&counts(&singles), 4).unwrap();
        assert_eq!((s.r, s.r_k[0], s.u), (50, 50, 50));
    }

    #[test]
    fn k_max_zero_is_usage_error() {
        assert!(summarize(&counts(&[(1, 1)]), 0).unwrap_err().is_usage());
        assert!(StreamAccumulator::new(0).is_err());
    }

    #[test]
    fn parity_flip() {
        let mut acc = StreamAccumulator::new(8).unwrap();
        acc.add_ball(7);
        let s = acc.snapshot();
        assert_eq!((s.r, s.u), (1, 1));
        acc.add_ball(7);
        let s = acc.snapshot();
        assert_eq!((s.r, s.r_k[1], s.u), (1, 1, 0));
    }

    #[test]
    fn big_counts_contribute_parity_and_tail() {
        let s = summarize(&counts(&[(1, 11), (2, 12), (3, 2)]), 3).unwrap();
        assert_eq!(s.u, 1);
        assert_eq!(s.r_star_k, vec![3, 3, 2, 2]);
        assert_eq!(s.r_k, vec![0, 1, 0]);
    }

    #[test]
    fn csv_round_trip() {
        let c = counts(&[(3, 2), (1, 5), (10, 1)]);
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "urn_index,count\n1,5\n3,2\n10,1\n");
        assert_eq!(OccupancyCounts::read_csv(buf.as_slice()).unwrap(), c);
        assert!(OccupancyCounts::read_csv("urn_index,count\n1,0\n".as_bytes()).is_err());
    }

    #[test]
    fn snapshot_json_shape() {
        let s = summarize(&counts(&[(1, 2), (2, 1)]), 2).unwrap();
        let v: serde_json::Value = serde_json::to_value(&s).unwrap();
        assert_eq!(v, serde_json::json!({"n": 3, "r": 2, "r_k": [1, 1], "r_star_k": [2, 1, 0], "u": 1}));
    }

    fn check_invariants(s: &StatisticsSnapshot, c: &OccupancyCounts) {
        assert_eq!(s.r_star_k[0], s.r);
        for k in 0..s.r_k.len() {
            assert_eq!(s.r_k[k], s.r_star_k[k] - s.r_star_k[k + 1]);
        }
        // U = number of urns with an odd count, from the full count-of-counts
        let mut by_count: BTreeMap<u64, u64> = BTreeMap::new();
        for &v in c.counts().values() {
            *by_count.entry(v).or_default() += 1;
        }
        let odd: u64 = by_count.iter().filter(|(k, _)| *k % 2 == 1).map(|(_, m)| m).sum();
        assert_eq!(s.u, odd);
        let weighted: u64 = by_count.iter().map(|(k, m)| k * m).sum();
        assert_eq!(weighted, s.n);
    }

    proptest! {
        #[test]
        fn stream_matches_summarize(balls in prop::collection::vec(0u64..40, 0..400), k_max in 1u32..10) {
            let mut acc = StreamAccumulator::new(k_max).unwrap();
            let mut map: BTreeMap<u64, u64> = BTreeMap::new();
            for &b in &balls {
                acc.add_ball(b);
                *map.entry(b).or_default() += 1;
            }
            let c = OccupancyCounts::from_counts(map).unwrap();
            let s = summarize(&c, k_max).unwrap();
            prop_assert_eq!(&acc.snapshot(), &s);
            check_invariants(&s, &c);
        }

        #[test]
        fn prefix_monotonicity(balls in prop::collection::vec(0u64..25, 1..300), k_max in 1u32..6) {
            let mut acc = StreamAccumulator::new(k_max).unwrap();
            let mut prev = acc.snapshot();
            for &b in &balls {
                acc.add_ball(b);
                let cur = acc.snapshot();
                prop_assert!(cur.r >= prev.r);
                for k in 0..cur.r_star_k.len() {
                    prop_assert!(cur.r_star_k[k] >= prev.r_star_k[k]);
                }
                prev = cur;
            }
        }
    }

    #[test]
    fn clear_resets_state() {
        let mut acc = StreamAccumulator::new(3).unwrap();
        (0..100).for_each(|i| acc.add_ball(i % 7));
        acc.clear();
        assert_eq!(acc.snapshot(), StreamAccumulator::new(3).unwrap().snapshot());
    }
}
