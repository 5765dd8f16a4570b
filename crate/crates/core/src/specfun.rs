//! Special functions: log-Gamma, Gamma, Beta, Riemann and Hurwitz zeta,
//! and the standard normal distribution.
//!
//! All arguments the estimators need are of the form `1−θ`, `k−θ`, `2k−θ`
//! or `1/θ` with `θ ∈ (0,1)`, so only the positive real axis is supported.

use std::f64::consts::PI;

use crate::{Error, Result};

const LANCZOS_G: f64 = 7.0;

// Lanczos coefficients for g = 7, n = 9.
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

// ln √(2π)
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_7;

/// Natural logarithm of Γ(x) for `x > 0`.
pub fn ln_gamma(x: f64) -> Result<f64> {
    if !(x.is_finite() && x > 0.0) {
        return Err(Error::domain(format!("ln_gamma requires finite x > 0, got {x}")));
    }
    Ok(ln_gamma_unchecked(x))
}

/// Γ(x) for `x > 0`.
pub fn gamma(x: f64) -> Result<f64> {
    ln_gamma(x).map(f64::exp)
}

/// ln B(a, b) = ln Γ(a) + ln Γ(b) − ln Γ(a+b).
pub fn ln_beta(a: f64, b: f64) -> Result<f64> {
    Ok(ln_gamma(a)? + ln_gamma(b)? - ln_gamma(a + b)?)
}

pub(crate) fn ln_gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        // reflection: Γ(x)Γ(1−x) = π / sin(πx)
        return PI.ln() - (PI * x).sin().ln() - ln_gamma_unchecked(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, &coef) in LANCZOS.iter().enumerate().skip(1) {
        acc += coef / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    LN_SQRT_2PI + (x + 0.5) * t.ln() - t + acc.ln()
}

/// ln k! for non-negative integer `k`.
pub(crate) fn ln_factorial(k: u64) -> f64 {
    if k < 2 {
        0.0
    } else {
        ln_gamma_unchecked(k as f64 + 1.0)
    }
}

// B_2, B_4, ..., B_18 divided by (2k)!.
const BERNOULLI_OVER_FACTORIAL: [f64; 9] = [
    1.0 / 6.0 / 2.0,
    -1.0 / 30.0 / 24.0,
    1.0 / 42.0 / 720.0,
    -1.0 / 30.0 / 40_320.0,
    5.0 / 66.0 / 3_628_800.0,
    -691.0 / 2730.0 / 479_001_600.0,
    7.0 / 6.0 / 87_178_291_200.0,
    -3617.0 / 510.0 / 20_922_789_888_000.0,
    43_867.0 / 798.0 / 6_402_373_705_728_000.0,
];

const ZETA_TOL: f64 = 1e-12;

/// Riemann zeta function ζ(s) for real `s > 1`.
pub fn zeta(s: f64) -> Result<f64> {
    hurwitz_zeta(s, 1.0)
}

/// Hurwitz zeta ζ(s, a) = Σ_{m≥0} (m + a)^{−s} for `s > 1`, `a > 0`.
///
/// A partial sum followed by an Euler–Maclaurin tail. The start of the tail
/// is pushed out until the first omitted correction term drops below
/// `1e-12` relative to the result.
pub fn hurwitz_zeta(s: f64, a: f64) -> Result<f64> {
    if !(s.is_finite() && s > 1.0) {
        return Err(Error::domain(format!("zeta requires finite s > 1, got {s}")));
    }
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::domain(format!("hurwitz_zeta requires finite a > 0, got {a}")));
    }
    Ok(hurwitz_unchecked(s, a))
}

pub(crate) fn hurwitz_unchecked(s: f64, a: f64) -> f64 {
    a.powf(-s) * hurwitz_scaled(s, a)
}

/// `ln ζ(s, a)`, finite even where `ζ(s, a)` itself underflows.
pub(crate) fn ln_hurwitz(s: f64, a: f64) -> f64 {
    -s * a.ln() + hurwitz_scaled(s, a).ln()
}

/// `a^s ζ(s, a) = Σ_{m≥0} (1 + m/a)^{−s}`, which lies in `[1, 1 + a/(s−1)]`.
fn hurwitz_scaled(s: f64, a: f64) -> f64 {
    let mut n_terms = if a >= 10.0 { 0usize } else { (10.0 - a).ceil() as usize };
    loop {
        let x = a + n_terms as f64;
        let (tail, last_term) = euler_maclaurin_tail(s, x, a);
        let mut head = 0.0;
        for m in (0..n_terms).rev() {
            head += ((a + m as f64) / a).powf(-s);
        }
        let total = head + tail;
        if last_term.abs() <= ZETA_TOL * total || n_terms > 1 << 20 {
            return total;
        }
        n_terms = (n_terms + 8) * 2;
    }
}

/// `a^s Σ_{m≥0} (x+m)^{−s}` via Euler–Maclaurin; also returns the size of the
/// first omitted correction, which bounds the remainder for real s.
fn euler_maclaurin_tail(s: f64, x: f64, a: f64) -> (f64, f64) {
    let x_pow = (x / a).powf(-s);
    let mut sum = x * x_pow / (s - 1.0) + 0.5 * x_pow;
    // rising factorial s(s+1)...(s+2k-2) times x^{-s-2k+1}
    let mut factor = s * x_pow / x;
    let inv_x2 = 1.0 / (x * x);
    let last = BERNOULLI_OVER_FACTORIAL.len() - 1;
    for (k, b) in BERNOULLI_OVER_FACTORIAL.iter().enumerate() {
        let term = b * factor;
        if k == last {
            return (sum, term);
        }
        sum += term;
        let two_k = 2.0 * (k as f64 + 1.0);
        factor *= (s + two_k - 1.0) * (s + two_k) * inv_x2;
    }
    unreachable!()
}

/// Standard normal CDF Φ(x).
pub fn normal_cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let z = x / std::f64::consts::SQRT_2;
    if z < -2.5 {
        0.5 * erfc_large(-z)
    } else if z > 2.5 {
        1.0 - 0.5 * erfc_large(z)
    } else {
        0.5 * (1.0 + erf_series(z))
    }
}

/// Standard normal quantile Φ^{-1}(p) for `p ∈ (0,1)`.
///
/// Acklam's rational approximation polished by two Halley steps.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("normal_quantile requires p in (0,1), got {p}")));
    }
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    let p_low = 0.024_25;
    let mut x = if p < p_low {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - p_low {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    };
    for _ in 0..2 {
        let e = normal_cdf(x) - p;
        let u = e * (2.0 * PI).sqrt() * (0.5 * x * x).exp();
        x -= u / (1.0 + 0.5 * x * u);
    }
    Ok(x)
}

fn erf_series(z: f64) -> f64 {
    // erf(z) = 2/√π Σ (−1)^n z^{2n+1} / (n! (2n+1))
    let z2 = z * z;
    let mut term = z;
    let mut sum = z;
    let mut n = 0.0;
    loop {
        n += 1.0;
        term *= -z2 / n;
        let add = term / (2.0 * n + 1.0);
        sum += add;
        if add.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum * 2.0 / PI.sqrt()
}

fn erfc_large(z: f64) -> f64 {
    // continued fraction erfc(z) = e^{-z²}/√π · 1/(z + 1/2/(z + 1/(z + 3/2/(z + ...))))
    // evaluated with the modified Lentz method
    let tiny = 1e-300;
    let mut f = z;
    let mut c = z;
    let mut d = 0.0;
    for k in 1..500 {
        let a = k as f64 / 2.0;
        d = z + a * d;
        if d.abs() < tiny {
            d = tiny;
        }
        c = z + a / c;
        if c.abs() < tiny {
            c = tiny;
        }
        d = 1.0 / d;
        let delta = c * d;
        f *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    (-z * z).exp() / PI.sqrt() / f
}
