//! Adaptive Gauss–Kronrod integration and the boundary-clustered variants
//! every weight functional is built on.
//!
//! Integrands on `[r, 1)` receive both `s` and `1 - s` so that weights like
//! `(1 - s^2)^alpha` keep full relative precision next to the unit circle.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error: f64,
}

/// Single 15-point Kronrod panel with the embedded 7-point Gauss estimate.
pub fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> QuadResult {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut resk = fc * WGK[7];
    let mut resg = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        resk += WGK[j] * (f1 + f2);
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    QuadResult {
        value: resk * half,
        error: ((resk - resg) * half).abs(),
    }
}

/// Globally adaptive bisection driven by the largest panel error.
pub fn adaptive<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> Result<QuadResult> {
    adaptive_from(&mut f, &[a, b], abs_tol, rel_tol, max_panels)
}

/// Adaptive integration starting from a fixed set of breakpoints.
pub fn adaptive_from<F: FnMut(f64) -> f64>(
    f: &mut F,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
    max_panels: usize,
) -> Result<QuadResult> {
    let mut panels: Vec<(f64, f64, QuadResult)> = breaks
        .windows(2)
        .map(|w| (w[0], w[1], gk15(f, w[0], w[1])))
        .collect();
    loop {
        let value: f64 = panels.iter().map(|p| p.2.value).sum();
        let error: f64 = panels.iter().map(|p| p.2.error).sum();
        let tol = abs_tol.max(rel_tol * value.abs());
        if error <= tol {
            return Ok(QuadResult { value, error });
        }
        if panels.len() >= max_panels {
            return Err(Error::QuadratureNonConvergence {
                partial: value,
                achieved: error,
            });
        }
        let (idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .2.error.total_cmp(&y.1 .2.error))
            .expect("non-empty panel list");
        let (a, b, _) = panels.swap_remove(idx);
        let m = 0.5 * (a + b);
        if !(m > a && m < b) {
            // interval exhausted at machine resolution
            return Err(Error::QuadratureNonConvergence {
                partial: value,
                achieved: error,
            });
        }
        panels.push((a, m, gk15(f, a, m)));
        panels.push((m, b, gk15(f, m, b)));
    }
}

/// Tolerances for [`integrate_to_one`].
#[derive(Debug, Clone, Copy)]
pub struct TailTolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Default for TailTolerance {
    fn default() -> Self {
        TailTolerance {
            rel: 1e-13,
            abs: 1e-300,
        }
    }
}

/// Integrates `f(s, 1 - s)` over `s` in `[1 - width, 1)`, using panels that
/// halve in width towards the circle. `width` is `1 - lower limit`.
pub fn integrate_to_one<F: FnMut(f64, f64) -> f64>(
    mut f: F,
    width: f64,
    tol: TailTolerance,
) -> Result<QuadResult> {
    if width <= 0.0 {
        return Ok(QuadResult {
            value: 0.0,
            error: 0.0,
        });
    }
    let mut total: f64 = 0.0;
    let mut err = 0.0;
    let mut prev: Option<f64> = None;
    let mut small_run = 0;
    let mut hi = width;
    for k in 0..1100 {
        let lo = hi * 0.5;
        // panel in u = 1 - s runs over [lo, hi]
        let mut g = |u: f64| f(1.0 - u, u);
        let panel_tol = (tol.rel * total.abs()).max(tol.abs) * 0.25;
        let q = adaptive(&mut g, lo, hi, panel_tol, tol.rel * 0.25, 400)?;
        total += q.value;
        err += q.error;
        let v = q.value.abs();
        if v <= 0.1 * tol.rel * total.abs() || (total == 0.0 && v == 0.0 && k > 60) {
            small_run += 1;
        } else {
            small_run = 0;
        }
        if small_run >= 3 && k >= 6 {
            // geometric remainder estimate from the last panel ratio
            let q_ratio = prev
                .map(|p| if p > 0.0 { v / p } else { 0.0 })
                .unwrap_or(0.5);
            let tail = if q_ratio < 1.0 {
                v * q_ratio / (1.0 - q_ratio)
            } else {
                v
            };
            return Ok(QuadResult {
                value: total,
                error: err + tail,
            });
        }
        prev = Some(v);
        hi = lo;
        if hi < f64::MIN_POSITIVE * 1e10 {
            break;
        }
    }
    Err(Error::QuadratureNonConvergence {
        partial: total,
        achieved: err.max(prev.unwrap_or(f64::INFINITY)),
    })
}

/// Mean of a `2π`-periodic function by the trapezoidal rule, doubling the node
/// count from `start` until the relative change drops below `rel_tol`.
pub fn periodic_mean<F: FnMut(f64) -> f64>(
    mut f: F,
    start: usize,
    rel_tol: f64,
    max_nodes: usize,
) -> Result<f64> {
    let mut m = start.max(4);
    let step = |m: usize| std::f64::consts::TAU / m as f64;
    let mut sum: f64 = (0..m).map(|j| f(j as f64 * step(m))).sum();
    let mut mean = sum / m as f64;
    loop {
        if 2 * m > max_nodes {
            return Err(Error::QuadratureNonConvergence {
                partial: mean,
                achieved: f64::NAN,
            });
        }
        let h = step(2 * m);
        let extra: f64 = (0..m).map(|j| f((2 * j + 1) as f64 * h)).sum();
        sum += extra;
        m *= 2;
        let new_mean = sum / m as f64;
        let change = (new_mean - mean).abs();
        mean = new_mean;
        if change <= rel_tol * mean.abs() || (mean == 0.0 && change == 0.0) {
            return Ok(mean);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let q = adaptive(|x| x.powi(5) - 3.0 * x, 0.0, 2.0, 1e-14, 1e-14, 50).unwrap();
        assert!((q.value - (64.0 / 6.0 - 6.0)).abs() < 1e-12);
    }

    #[test]
    fn endpoint_singularity_to_one() {
        // ∫_0^1 (1-s)^{-1/2} ds = 2
        let q = integrate_to_one(|_, u| u.powf(-0.5), 1.0, TailTolerance::default()).unwrap();
        assert!((q.value - 2.0).abs() < 1e-11, "{}", q.value);
    }

    #[test]
    fn nonintegrable_reports_partial() {
        let r = integrate_to_one(|_, u| 1.0 / u, 1.0, TailTolerance::default());
        assert!(matches!(r, Err(Error::QuadratureNonConvergence { .. })));
    }

    #[test]
    fn periodic_trapezoid_spectral() {
        // mean of 1/(1 - 0.5 cos θ) = 1/sqrt(1 - 0.25)
        let m = periodic_mean(|t| 1.0 / (1.0 - 0.5 * t.cos()), 8, 1e-14, 1 << 12).unwrap();
        assert!((m - 1.0 / 0.75f64.sqrt()).abs() < 1e-13);
    }
}
