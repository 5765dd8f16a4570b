//! Limiting variances of the estimators and the covariance function
//! `c_ij(τ,t)` of the Gaussian limit of the occupancy processes.
//!
//! Component 0 of the process is the occupied-urn count `R` and component
//! `j ≥ 1` is `R_{·,j}`. All processes are centered by their expectations and
//! scaled by `√α(n)`. The limit is self-similar with Hurst index `θ/2`.
//!
//! [`covariance_c`] returns the function in its published form. On the
//! diagonal `i = j ≥ 1` the first term is `θτ^i t^{θ−i}Γ(i−θ)/i!`, not
//! `θt^θΓ(i−θ)/i!`. The `τ`-free form is not positive semidefinite off
//! `τ = t` and disagrees with the indicator-sum limit; both forms agree at
//! `τ = t`. Note that the published cross terms between component 0 and
//! components `j ≥ 1` have the opposite sign to the covariance of the
//! indicator sums (`R` and `R_{·,j}` are positively correlated).
//! [`indicator_covariance`] returns that version, and
//! [`sigma0_sq_indicator`] gives the matching variance of the `R_{n,1}/R_n`
//! estimator.

use crate::specfun::{ln_beta, ln_factorial, ln_gamma_unchecked};
use crate::{Error, Result};

fn check_theta(theta: f64) -> Result<()> {
    if theta.is_finite() && theta > 0.0 && theta < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("theta must lie in (0,1), got {theta}")))
    }
}

fn lgamma(x: f64) -> f64 {
    ln_gamma_unchecked(x)
}

/// Limiting variance of `√R_n (R_{n,1}/R_n − θ)` in its published form,
/// `θ((9θ−1)2^{θ−2} + 1 − θ)`.
pub fn sigma0_sq(theta: f64) -> Result<f64> {
    check_theta(theta)?;
    Ok(theta * ((9.0 * theta - 1.0) * 2f64.powf(theta - 2.0) + 1.0 - theta))
}

/// Variance of the same limit computed from the indicator-sum covariance,
/// `θ(1−θ)(1 − 2^{θ−2})`.
pub fn sigma0_sq_indicator(theta: f64) -> Result<f64> {
    check_theta(theta)?;
    Ok(theta * (1.0 - theta) * (1.0 - 2f64.powf(theta - 2.0)))
}

/// Limiting variance of `√R_{n,k}(θ̂_k − θ)` for the ratio estimator
/// `θ̂_k = (kR_{n,k} − (k+1)R_{n,k+1})/R_{n,k}`:
/// `(k−θ)(2k+1−θ) − (2k−θ+θ²)/(k·2^{2k+2−θ}·B(k−θ,k))`.
pub fn sigma_k_sq(theta: f64, k: u32) -> Result<f64> {
    check_theta(theta)?;
    if k == 0 {
        return Err(Error::domain("k must be >= 1"));
    }
    let kf = k as f64;
    let ln_den = kf.ln() + (2.0 * kf + 2.0 - theta) * std::f64::consts::LN_2 + ln_beta(kf - theta, kf)?;
    Ok((kf - theta) * (2.0 * kf + 1.0 - theta) - (2.0 * kf - theta + theta * theta) * (-ln_den).exp())
}

/// Which implicit equation an estimator solves.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ImplicitKind {
    R,
    U,
    Rk(u32),
}

/// Limiting variance of `ln n·√S_n·(θ* − θ)` for the implicit estimators:
/// `2^θ − 1` (R), `2^{θ−1}` (U), `1 − 2^θΓ(2k−θ)/(2^{2k}k!Γ(k−θ))` (R_k).
pub fn implicit_variance(theta: f64, kind: ImplicitKind) -> Result<f64> {
    check_theta(theta)?;
    Ok(match kind {
        ImplicitKind::R => 2f64.powf(theta) - 1.0,
        ImplicitKind::U => 2f64.powf(theta - 1.0),
        ImplicitKind::Rk(0) => return Err(Error::domain("k must be >= 1")),
        ImplicitKind::Rk(k) => {
            let kf = k as f64;
            let ln = theta * std::f64::consts::LN_2 + lgamma(2.0 * kf - theta)
                - 2.0 * kf * std::f64::consts::LN_2
                - ln_factorial(k as u64)
                - lgamma(kf - theta);
            1.0 - ln.exp()
        }
    })
}

/// Covariance function of the `(ν+1)`-component limit process.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CovarianceSpec {
    theta: f64,
    nu: u32,
}

impl CovarianceSpec {
    pub fn new(theta: f64, nu: u32) -> Result<Self> {
        check_theta(theta)?;
        if nu == 0 {
            return Err(Error::domain("nu must be >= 1"));
        }
        Ok(CovarianceSpec { theta, nu })
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn nu(&self) -> u32 {
        self.nu
    }

    fn check(&self, i: u32, j: u32, tau: f64, t: f64) -> Result<()> {
        if i > self.nu || j > self.nu {
            return Err(Error::usage(format!(
                "component index out of range: ({i},{j}) with nu={}",
                self.nu
            )));
        }
        if !(tau.is_finite() && tau > 0.0 && t.is_finite() && t > 0.0) {
            return Err(Error::domain(format!("times must be positive, got ({tau},{t})")));
        }
        Ok(())
    }

    /// `θ τ^a t^b (t+τ)^e Γ(g) / D`, with `ln D = ln_div`, in log space.
    fn term(&self, tau: f64, a: f64, t: f64, b: f64, e: f64, g: f64, ln_div: f64) -> f64 {
        (self.theta.ln() + a * tau.ln() + b * t.ln() + e * (t + tau).ln() + lgamma(g) - ln_div).exp()
    }

    /// Branches for `τ ≤ t` with the published signs.
    fn ordered(&self, i: u32, j: u32, tau: f64, t: f64) -> f64 {
        let th = self.theta;
        let (fi, fj) = (i as f64, j as f64);
        let lf = |k: u32| ln_factorial(k as u64);
        // θ τ^i t^j (t+τ)^{θ−i−j} Γ(i+j−θ)/(i! j!)
        let joint = |i: u32, j: u32| {
            self.term(tau, i as f64, t, j as f64, th - (i + j) as f64, (i + j) as f64 - th, lf(i) + lf(j))
        };
        match (i, j) {
            (0, 0) => ((t + tau).powf(th) - t.powf(th)) * lgamma(1.0 - th).exp(),
            (0, j) => {
                let near = if tau < t {
                    self.term(t - tau, fj, t, th - fj, 0.0, fj - th, lf(j))
                } else {
                    0.0
                };
                near - self.term(tau, 0.0, t, fj, th - fj, fj - th, lf(j))
            }
            (i, 0) => -self.term(tau, fi, t, 0.0, th - fi, fi - th, lf(i)),
            (i, j) if i == j => self.term(tau, fi, t, th - fi, 0.0, fi - th, lf(i)) - joint(i, i),
            (i, j) if i < j => {
                let near = if tau < t {
                    // θ τ^i (t−τ)^{j−i} t^{θ−j} Γ(j−θ)/(i!(j−i)!)
                    (th.ln() + fi * tau.ln() + (fj - fi) * (t - tau).ln() + (th - fj) * t.ln()
                        + lgamma(fj - th)
                        - lf(i)
                        - lf(j - i))
                        .exp()
                } else {
                    0.0
                };
                near - joint(i, j)
            }
            (i, j) => -joint(i, j),
        }
    }
}

/// `c_ij(τ,t)` in its published form; `c_ij(τ,t) = c_ji(t,τ)` for `τ > t`.
pub fn covariance_c(spec: &CovarianceSpec, i: u32, j: u32, tau: f64, t: f64) -> Result<f64> {
    spec.check(i, j, tau, t)?;
    Ok(if tau <= t { spec.ordered(i, j, tau, t) } else { spec.ordered(j, i, t, tau) })
}

/// Covariance of the limit of the indicator sums themselves: identical to
/// [`covariance_c`] except that entries pairing component 0 with a
/// component `j ≥ 1` change sign.
pub fn indicator_covariance(spec: &CovarianceSpec, i: u32, j: u32, tau: f64, t: f64) -> Result<f64> {
    let v = covariance_c(spec, i, j, tau, t)?;
    Ok(if (i == 0) != (j == 0) { -v } else { v })
}

/// Limiting covariance matrix of `(R, R_{·,1})` at `t = 1`, scaled by
/// `α(n)`: `Γ(1−θ)·[[2^θ−1, −θ2^{θ−1}], [−θ2^{θ−1}, θ(1−2^{θ−2}(1−θ))]]`.
pub fn unit_time_matrix(theta: f64) -> Result<[[f64; 2]; 2]> {
    check_theta(theta)?;
    let g = lgamma(1.0 - theta).exp();
    let off = -theta * 2f64.powf(theta - 1.0) * g;
    Ok([
        [(2f64.powf(theta) - 1.0) * g, off],
        [off, theta * (1.0 - 2f64.powf(theta - 2.0) * (1.0 - theta)) * g],
    ])
}

/// Full covariance matrix over a time grid, indexed by
/// `a·(ν+1) + i` for grid point `a` and component `i`.
pub fn grid_matrix(
    spec: &CovarianceSpec,
    grid: &[f64],
    cov: fn(&CovarianceSpec, u32, u32, f64, f64) -> Result<f64>,
) -> Result<Vec<Vec<f64>>> {
    let comps = spec.nu as usize + 1;
    let dim = grid.len() * comps;
    let mut m = vec![vec![0.0; dim]; dim];
    for (a, &ta) in grid.iter().enumerate() {
        for (b, &tb) in grid.iter().enumerate() {
            for i in 0..comps {
                for j in 0..comps {
                    m[a * comps + i][b * comps + j] = cov(spec, i as u32, j as u32, ta, tb)?;
                }
            }
        }
    }
    Ok(m)
}

/// Writes CSV rows `i,j,tau,t,c_ij` for every component pair and every
/// ordered pair of grid points.
pub fn write_covariance_csv<W: std::io::Write>(spec: &CovarianceSpec, grid: &[f64], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["i", "j", "tau", "t", "c_ij"])?;
    for &tau in grid {
        for &t in grid {
            for i in 0..=spec.nu {
                for j in 0..=spec.nu {
                    let c = covariance_c(spec, i, j, tau, t)?;
                    w.write_record([
                        i.to_string(),
                        j.to_string(),
                        crate::numfmt::fmt10(tau),
                        crate::numfmt::fmt10(t),
                        crate::numfmt::fmt10(c),
                    ])?;
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}
