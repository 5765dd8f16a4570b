//! Estimation of the Zipf exponent θ in the infinite urn scheme.
//!
//! Balls are thrown independently into infinitely many urns, urn `i` being hit
//! with probability `p_i ~ c·i^{-1/θ}`. From one sample of `n` balls the crate
//! computes the occupancy statistics (number of occupied urns `R_n`, urns with
//! exactly `k` balls `R_{n,k}`, urns with an odd count `U_n`) and turns them
//! into point estimates of θ with asymptotic standard errors:
//!
//! * implicit estimators solving `S_n = l(θ)·(c n)^θ` for a known `c(θ)`,
//!   based on `R_n`, `U_n` or `R_{n,k}`;
//! * explicit ratio estimators `R_{n,1}/R_n` and
//!   `(k R_{n,k} − (k+1) R_{n,k+1}) / R_{n,k}` which need no knowledge of `c`;
//! * the log-ratio baseline `ln R_n / ln n`.
//!
//! Around the estimators sit the pieces needed to check the limit theory
//! numerically: exact finite-`n` moment oracles ([`law`]), nested and
//! poissonized samplers ([`sampler`]), closed-form limiting variances and the
//! covariance function of the limiting Gaussian process ([`asymptotics`]), and
//! a replicated-experiment harness ([`montecarlo`]).
//!
//! ```
//! use zipf_urn::law::PowerLaw;
//! use zipf_urn::sampler::{sample_fixed, SeedSpec};
//! use zipf_urn::occupancy::summarize;
//! use zipf_urn::estimators::ratio_estimate_r1;
//!
//! # fn main() -> zipf_urn::Result<()> {
//! let law = PowerLaw::zipf(0.5, 0, 1e-6)?;
//! let counts = sample_fixed(&law, 100_000, SeedSpec::new(7, 0))?;
//! let snap = summarize(&counts, 8)?;
//! let est = ratio_estimate_r1(&snap, 0.95)?;
//! assert!((est.theta_hat - 0.5).abs() < 0.1);
//! # Ok(())
//! # }
//! ```

#![forbid(unsafe_code)]

pub mod asymptotics;
pub mod cli;
mod error;
pub mod estimators;
pub mod ingest;
pub mod law;
pub mod montecarlo;
pub mod numfmt;
pub mod occupancy;
pub mod sampler;
pub mod specfun;

pub use error::{Error, Result};
