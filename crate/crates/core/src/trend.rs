//! Dyadic trend diagnostics shared by every "limit as |z| → 1" estimate.
//!
//! None of these certify a limit. They classify a finite sequence sampled
//! on `r_j = 1 - 2^{-j}` as decaying, stabilizing or growing.

use serde::{Deserialize, Serialize};

/// Three-valued outcome used by all numerical verdicts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Yes,
    No,
    Inconclusive,
}

/// Aitken's Δ² extrapolation of the last three terms; `None` when the second
/// difference vanishes or the terms are not finite.
pub fn aitken(x0: f64, x1: f64, x2: f64) -> Option<f64> {
    let d1 = x1 - x0;
    let d2 = x2 - x1;
    let dd = d2 - d1;
    if !(x0.is_finite() && x1.is_finite() && x2.is_finite()) || dd == 0.0 {
        return None;
    }
    // only meaningful for geometric-like convergence (same-sign, shrinking steps)
    if d1 * d2 <= 0.0 || d2.abs() >= d1.abs() {
        return None;
    }
    Some(x2 - d2 * d2 / dd)
}

/// Largest over smallest of the last `k` entries.
pub fn spread_ratio(xs: &[f64], k: usize) -> f64 {
    let tail = &xs[xs.len().saturating_sub(k)..];
    let max = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let min = tail.iter().cloned().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

/// Last three values agree within the factor `1 + rel`.
pub fn stabilized(xs: &[f64], rel: f64) -> bool {
    xs.len() >= 3 && spread_ratio(xs, 3) <= 1.0 + rel
}

/// Least-squares slope of `log2 |x_j|` against `j` over the last `k` entries.
/// Negative slope means decay; `-1` is one halving per dyadic level.
pub fn log2_slope(xs: &[f64], k: usize) -> Option<f64> {
    let start = xs.len().saturating_sub(k);
    let pts: Vec<(f64, f64)> = xs[start..]
        .iter()
        .enumerate()
        .filter(|(_, v)| v.is_finite() && **v > 0.0)
        .map(|(i, v)| (i as f64, v.log2()))
        .collect();
    linear_fit(&pts).map(|(slope, _)| slope)
}

/// Ordinary least squares `y = slope * x + intercept`.
pub fn linear_fit(pts: &[(f64, f64)]) -> Option<(f64, f64)> {
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Non-increasing up to a relative slack.
pub fn non_increasing(xs: &[f64], slack: f64) -> bool {
    xs.windows(2)
        .all(|w| w[1] <= w[0] * (1.0 + slack) + f64::MIN_POSITIVE)
}

/// Limit estimate for a dyadic profile: Aitken on the last three levels when
/// applicable, otherwise the last value. The second field is the spread of the
/// last three levels, used as an uncertainty band.
pub fn extrapolate(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::INFINITY);
    }
    if n < 3 {
        return (xs[n - 1], f64::INFINITY);
    }
    let tail = &xs[n - 3..];
    let band = tail.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        - tail.iter().cloned().fold(f64::INFINITY, f64::min);
    let est = aitken(tail[0], tail[1], tail[2]).unwrap_or(tail[2]);
    (est, band)
}
