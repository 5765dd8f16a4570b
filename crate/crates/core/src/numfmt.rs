//! Ten-significant-digit rounding so that text and JSON output are stable
//! across platforms and runs.

/// Rounds `x` to 10 significant digits; non-finite values pass through and
/// negative zero becomes zero.
pub fn round10(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return if x == 0.0 { 0.0 } else { x };
    }
    format!("{x:.9e}").parse().expect("formatted float parses")
}

/// Shortest decimal form of `round10(x)`.
pub fn fmt10(x: f64) -> String {
    format!("{}", round10(x))
}
