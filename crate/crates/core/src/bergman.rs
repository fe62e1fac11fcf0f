//! Integral means, A^p_ω norms, membership of Koenigs powers and the
//! standard test functions.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{self, periodic_mean};
use crate::semigroup::SpiralGeometry;
use crate::series::{builtin, AnalyticSeries};
use crate::trend;
use crate::weights::RadialWeight;

/// Relative accuracy demanded of circle means.
const MEAN_TOL: f64 = 1e-10;
/// Largest FFT used for a circle mean.
const MAX_NODES: usize = 1 << 22;

/// `p` in `(0, ∞]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

fn check_p(p: f64) -> Result<()> {
    if !(p > 0.0) || !p.is_finite() {
        return Err(Error::domain(format!(
            "exponent p must be positive and finite, got {p}"
        )));
    }
    Ok(())
}

/// Radius beyond which a series is not trusted at relative level `MEAN_TOL`.
fn trusted(f: &AnalyticSeries, r: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::domain(format!("radius {r} outside [0, 1]")));
    }
    let scale: f64 = f
        .coeffs()
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max)
        .max(1e-300);
    let bound = f.error_bound(r);
    if bound > MEAN_TOL * scale {
        return Err(Error::Precision(format!(
            "series of order {} is not accurate at radius {r} (tail bound {bound:e})",
            f.len()
        )));
    }
    Ok(())
}

/// `M_p(r, f)`, or `M_∞(r, f)` for `Exponent::Infinity`.
pub fn integral_mean(f: &AnalyticSeries, p: Exponent, r: f64) -> Result<f64> {
    trusted(f, r)?;
    match p {
        Exponent::Infinity => Ok(max_modulus(f, r)),
        Exponent::Finite(p) => {
            check_p(p)?;
            Ok(mean_pow(f, p, r)?.powf(1.0 / p))
        }
    }
}

/// `M_p^p(r, f)` by trapezoid sums computed with FFTs of doubling size.
fn mean_pow(f: &AnalyticSeries, p: f64, r: f64) -> Result<f64> {
    let mut m = (f.len() + 1).next_power_of_two().max(64);
    let mean = |m: usize| -> f64 {
        f.values_on_circle(r, m)
            .iter()
            .map(|v| v.norm().powf(p))
            .sum::<f64>()
            / m as f64
    };
    let mut prev = mean(m);
    loop {
        m *= 2;
        if m > MAX_NODES {
            return Err(Error::QuadratureNonConvergence {
                partial: prev,
                achieved: f64::NAN,
            });
        }
        let cur = mean(m);
        if (cur - prev).abs() <= MEAN_TOL * cur.abs() || cur == prev {
            return Ok(cur);
        }
        prev = cur;
    }
}

/// Maximum of `|f|` on the circle of radius `r`, polished by one Newton step
/// on the critical angle of `|f|^2`.
fn max_modulus(f: &AnalyticSeries, r: f64) -> f64 {
    let m = (4 * f.len()).next_power_of_two().max(1024);
    let vals = f.values_on_circle(r, m);
    let (j, best) = vals
        .iter()
        .enumerate()
        .map(|(j, v)| (j, v.norm()))
        .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
    if r == 0.0 || best == 0.0 {
        return best;
    }
    let d1 = f.derivative();
    let d2 = d1.derivative();
    let theta = TAU * j as f64 / m as f64;
    let z = Complex64::from_polar(r, theta);
    let (fz, f1, f2) = (f.eval(z), d1.eval(z), d2.eval(z));
    let iz = Complex64::new(0.0, 1.0) * z;
    let dtheta = iz * f1;
    let ddtheta = iz * f1 + iz * iz * f2;
    let g1 = 2.0 * (fz.conj() * dtheta).re;
    let g2 = 2.0 * (dtheta.norm_sqr() + (fz.conj() * ddtheta).re);
    if g2 < 0.0 {
        let step = (-g1 / g2).clamp(-TAU / m as f64, TAU / m as f64);
        let polished = f.eval(Complex64::from_polar(r, theta + step)).norm();
        return polished.max(best);
    }
    best
}

/// `M_p(r, f)` for a function given pointwise.
pub fn integral_mean_fn<F: Fn(Complex64) -> Complex64>(f: F, p: f64, r: f64) -> Result<f64> {
    check_p(p)?;
    let m = periodic_mean(
        |t| f(Complex64::from_polar(r, t)).norm().powf(p),
        64,
        MEAN_TOL,
        MAX_NODES,
    )?;
    Ok(m.powf(1.0 / p))
}

/// A^p_ω norm with the bookkeeping of how it was obtained.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct NormReport {
    /// `‖f‖`
    pub value: f64,
    /// `‖f‖^p`
    pub pth_power: f64,
    /// bound (or extrapolated estimate) on the discarded part of `‖f‖^p`
    pub tail_bound: f64,
    pub shells: usize,
    pub method: String,
    pub tolerance: f64,
}

/// Contribution of each dyadic shell `1 - 2^{-j} <= r < 1 - 2^{-j-1}` to a
/// radial integral, stopping once the remainder is negligible or the radial
/// function can no longer be trusted.
struct ShellSum {
    total: f64,
    shells: Vec<f64>,
}

enum Remainder<'a> {
    /// integrand bounded by `bound * ω(r) 2r` on the remaining annulus
    Bounded {
        bound: f64,
        weight: &'a RadialWeight,
    },
    /// fit geometric decay of the shell contributions
    Extrapolate,
}

const SHELL_REL: f64 = 1e-10;
const MIN_DECAY: f64 = 0.05;

fn shell_integral<G>(
    mut g: G,
    max_shells: usize,
    limit_u: f64,
    remainder: Remainder<'_>,
) -> Result<(f64, f64, usize)>
where
    G: FnMut(f64, f64) -> Result<f64>,
{
    let mut acc = ShellSum {
        total: 0.0,
        shells: Vec::new(),
    };
    for j in 0..max_shells {
        let hi_u = 0.5f64.powi(j as i32);
        let lo_u = 0.5 * hi_u;
        if lo_u < limit_u {
            break;
        }
        let mut failure = None;
        let mut integrand = |u: f64| match g(1.0 - u, u) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                0.0
            }
        };
        let q = quadrature::adaptive(&mut integrand, lo_u, hi_u, 1e-300, SHELL_REL * 0.1, 200)?;
        if let Some(e) = failure {
            return Err(e);
        }
        acc.total += q.value;
        acc.shells.push(q.value);
        match &remainder {
            Remainder::Bounded { bound, weight } => {
                let rest = bound * 2.0 * weight.hat_u(lo_u)?;
                if rest <= SHELL_REL * acc.total.abs() || rest == 0.0 {
                    return Ok((acc.total, rest, j + 1));
                }
            }
            Remainder::Extrapolate => {
                if acc.shells.len() >= 4 {
                    if let Some(slope) = trend::log2_slope(&acc.shells, 4) {
                        let beta = -slope;
                        if beta > MIN_DECAY {
                            let q = 2f64.powf(-beta);
                            let last = *acc.shells.last().unwrap();
                            let tail = last * q / (1.0 - q);
                            if tail <= SHELL_REL * acc.total.abs() {
                                return Ok((acc.total + tail, tail, j + 1));
                            }
                        }
                    }
                }
            }
        }
    }
    // ran out of trusted radii
    let n = acc.shells.len();
    if n >= 4 {
        if let Some(slope) = trend::log2_slope(&acc.shells, 4) {
            let beta = -slope;
            if beta <= MIN_DECAY {
                return Err(Error::PossiblyInfinite { exponent: beta });
            }
            let q = 2f64.powf(-beta);
            let tail = acc.shells[n - 1] * q / (1.0 - q);
            return Ok((acc.total + tail, tail, n));
        }
    }
    Err(Error::Precision(format!(
        "only {n} dyadic shells are resolvable; raise the truncation order"
    )))
}

/// `‖f‖_{A^p_ω}` with `‖f‖^p = ∫ M_p^p(r, f) ω(r) 2r dr`.
pub fn bergman_norm(f: &AnalyticSeries, p: f64, w: &RadialWeight) -> Result<NormReport> {
    check_p(p)?;
    let scale: f64 = f
        .coeffs()
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max)
        .max(1e-300);
    let bounded = f.is_polynomial() || f.error_bound(1.0) <= MEAN_TOL * scale;
    let (value, tail, shells, method) = if bounded {
        let top = mean_pow(f, p, 1.0)?;
        let (v, t, n) = shell_integral(
            |s, u| Ok(mean_pow(f, p, s)? * w.density_su(s, u) * 2.0 * s),
            60,
            0.0,
            Remainder::Bounded {
                bound: top,
                weight: w,
            },
        )?;
        (v, t, n, "dyadic shells, bounded remainder")
    } else {
        let limit = 1.0 - f.accurate_radius(MEAN_TOL * scale);
        let (v, t, n) = shell_integral(
            |s, u| Ok(mean_pow(f, p, s)? * w.density_su(s, u) * 2.0 * s),
            60,
            limit,
            Remainder::Extrapolate,
        )?;
        (v, t, n, "dyadic shells, geometric extrapolation")
    };
    Ok(NormReport {
        value: value.powf(1.0 / p),
        pth_power: value,
        tail_bound: tail,
        shells,
        method: method.into(),
        tolerance: SHELL_REL,
    })
}

/// Norm of a function given pointwise; shells are followed up to
/// `1 - 2^{-max_shells}`.
pub fn bergman_norm_fn<F: Fn(Complex64) -> Complex64>(
    f: F,
    p: f64,
    w: &RadialWeight,
    max_shells: usize,
) -> Result<NormReport> {
    check_p(p)?;
    let (v, t, n) = shell_integral(
        |s, u| {
            let m = periodic_mean(
                |th| f(Complex64::from_polar(s, th)).norm().powf(p),
                64,
                MEAN_TOL,
                MAX_NODES,
            )?;
            Ok(m * w.density_su(s, u) * 2.0 * s)
        },
        max_shells,
        0.5f64.powi(max_shells as i32),
        Remainder::Extrapolate,
    )?;
    Ok(NormReport {
        value: v.powf(1.0 / p),
        pth_power: v,
        tail_bound: t,
        shells: n,
        method: "dyadic shells, pointwise trapezoid".into(),
        tolerance: SHELL_REL,
    })
}

/// `∫_0^1 M_∞^p(r, f) (∫_r^1 ω(t) t dt) dr`, a surrogate comparable to
/// `‖f‖^p` for univalent `f`.
pub fn univalent_norm(f: &AnalyticSeries, p: f64, w: &RadialWeight) -> Result<NormReport> {
    check_p(p)?;
    let inner = |s: f64, u: f64| -> Result<f64> {
        match w.standard_alpha() {
            // ∫_r^1 (α+1)(1-t^2)^α t dt = (1-r^2)^{α+1}/2
            Some(a) => Ok(0.5 * (u * (1.0 + s)).powf(a + 1.0)),
            None => w.integrate_tail(s, |t, _| t),
        }
    };
    let scale: f64 = f
        .coeffs()
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max)
        .max(1e-300);
    let bounded = f.is_polynomial() || f.error_bound(1.0) <= MEAN_TOL * scale;
    let integrand =
        |s: f64, u: f64| -> Result<f64> { Ok(max_modulus(f, s).powf(p) * inner(s, u)?) };
    let (v, t, n) = if bounded {
        // M_∞ ≤ Σ|a_n| and ∫_r^1 ∫_t^1 ω s ds dt ≤ ω̂(r)(1 - r)
        let top: f64 = f.coeffs().iter().map(|c| c.norm()).sum::<f64>().powf(p);
        let mut total = 0.0;
        let mut rest = f64::INFINITY;
        let mut count = 0;
        for j in 0..60 {
            let hi_u = 0.5f64.powi(j);
            let lo_u = 0.5 * hi_u;
            let mut failure = None;
            let mut g = |u: f64| match integrand(1.0 - u, u) {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            };
            total += quadrature::adaptive(&mut g, lo_u, hi_u, 1e-300, SHELL_REL * 0.1, 200)?.value;
            if let Some(e) = failure {
                return Err(e);
            }
            count += 1;
            rest = top * w.hat_u(lo_u)? * lo_u;
            if rest <= SHELL_REL * total {
                break;
            }
        }
        (total, rest, count)
    } else {
        let limit = 1.0 - f.accurate_radius(MEAN_TOL * scale);
        shell_integral(integrand, 60, limit, Remainder::Extrapolate)?
    };
    Ok(NormReport {
        value: v.powf(1.0 / p),
        pth_power: v,
        tail_bound: t,
        shells: n,
        method: "comparability surrogate: ∫ M_∞^p(r) ∫_r^1 ω(t) t dt dr".into(),
        tolerance: SHELL_REL,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    In,
    Out,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MembershipMethod {
    /// `k = 0` or a polynomial `h`
    Trivial,
    /// opening `η = 0`
    ZeroOpening,
    ClosedFormClassifier,
    TruncatedIntegralGrowth,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MembershipVerdict {
    pub verdict: Membership,
    pub method: MembershipMethod,
    /// classifier exponent `k p η cos²α / π`, or fitted shell decay rate
    pub witness: f64,
    pub note: String,
}

/// `k p η cos²(arg μ) / π`.
pub fn opening_exponent(k: usize, p: f64, geo: &SpiralGeometry) -> f64 {
    let c = geo.alpha().cos();
    k as f64 * p * geo.eta * c * c / PI
}

/// Decides `h^k ∈ A^p_ω` from the spiral opening of `h(𝔻)`.
pub fn membership_test(
    h: &AnalyticSeries,
    k: usize,
    p: f64,
    w: &RadialWeight,
    geo: &SpiralGeometry,
) -> Result<MembershipVerdict> {
    check_p(p)?;
    if k == 0 || h.is_polynomial() {
        return Ok(MembershipVerdict {
            verdict: Membership::In,
            method: MembershipMethod::Trivial,
            witness: 0.0,
            note: if k == 0 { "constants" } else { "polynomial" }.into(),
        });
    }
    let scale: f64 = h
        .coeffs()
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max)
        .max(1e-300);
    if h.error_bound(1.0) <= 1e-12 * scale {
        return Ok(MembershipVerdict {
            verdict: Membership::In,
            method: MembershipMethod::Trivial,
            witness: 0.0,
            note: "bounded on the closed disk".into(),
        });
    }
    if geo.eta == 0.0 {
        return Ok(MembershipVerdict {
            verdict: Membership::In,
            method: MembershipMethod::ZeroOpening,
            witness: 0.0,
            note: "opening 0: every power belongs".into(),
        });
    }
    let e = opening_exponent(k, p, geo);
    if let Some(alpha) = w.standard_alpha() {
        let threshold = alpha + 2.0;
        let verdict = if (e - threshold).abs() <= 1e-12 * threshold.abs().max(1.0) {
            Membership::Inconclusive
        } else if e < threshold {
            Membership::In
        } else {
            Membership::Out
        };
        return Ok(MembershipVerdict {
            verdict,
            method: MembershipMethod::ClosedFormClassifier,
            witness: e,
            note: format!("exponent {e} against {threshold}"),
        });
    }
    let (verdict, beta) = growth_verdict(w, e)?;
    Ok(MembershipVerdict {
        verdict,
        method: MembershipMethod::TruncatedIntegralGrowth,
        witness: beta,
        note: format!("dyadic shells of ∫ ω̂(r)(1-r)^(-{e}) dr decay at rate 2^(-{beta} j)"),
    })
}

/// Shell contributions `∫ ω̂(r)(1-r)^{-e} dr` over `[1-2^{-j}, 1-2^{-j-1}]`.
fn growth_shells(w: &RadialWeight, e: f64, levels: usize) -> Result<Vec<f64>> {
    (0..levels)
        .map(|j| {
            let hi = 0.5f64.powi(j as i32);
            let mut failure = None;
            let mut g = |u: f64| match w.hat_u(u) {
                Ok(v) => v * u.powf(-e),
                Err(err) => {
                    failure.get_or_insert(err);
                    0.0
                }
            };
            let q = quadrature::adaptive(&mut g, 0.5 * hi, hi, 1e-300, 1e-10, 100)?;
            match failure {
                Some(err) => Err(err),
                None => Ok(q.value),
            }
        })
        .collect()
}

fn growth_verdict(w: &RadialWeight, e: f64) -> Result<(Membership, f64)> {
    let shells = growth_shells(w, e, 40)?;
    let tail = &shells[20..];
    if tail.iter().all(|v| *v == 0.0) {
        return Ok((Membership::In, f64::INFINITY));
    }
    let beta = -trend::log2_slope(tail, tail.len()).unwrap_or(0.0);
    let verdict = if beta > MIN_DECAY {
        Membership::In
    } else if beta < -MIN_DECAY {
        Membership::Out
    } else {
        Membership::Inconclusive
    };
    Ok((verdict, beta))
}

/// The `k_0` display taken literally: largest integer `k` below
/// `I = ∫_0^1 ω̂(r)(1-r)^{-pη cos²α/π} dr`. Not used by any decision.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AsPrintedK0 {
    pub integral: f64,
    pub k0: Option<i64>,
    pub note: String,
}

pub fn as_printed_k0(p: f64, w: &RadialWeight, geo: &SpiralGeometry) -> Result<AsPrintedK0> {
    let e = opening_exponent(1, p, geo);
    let shells = growth_shells(w, e, 48)?;
    let beta = -trend::log2_slope(&shells[32..], 16).unwrap_or(0.0);
    let note = "literal reading of the k_0 display; the per-k test is authoritative".to_string();
    if beta <= MIN_DECAY && shells[47] > 0.0 {
        return Ok(AsPrintedK0 {
            integral: f64::INFINITY,
            k0: None,
            note,
        });
    }
    let total: f64 = shells.iter().sum();
    let k0 = (total.ceil() as i64) - 1;
    Ok(AsPrintedK0 {
        integral: total,
        k0: Some(k0),
        note,
    })
}

/// `((1 - |z|) ω̂(z))^{-1/p}`, representative of `‖δ_z‖`.
pub fn point_eval_norm_estimate(z: Complex64, p: f64, w: &RadialWeight) -> Result<f64> {
    check_p(p)?;
    let r = z.norm();
    if !(r < 1.0) {
        return Err(Error::domain(format!("{z} is not in the open unit disk")));
    }
    let u = 1.0 - r;
    Ok((u * w.hat_u(u)?).powf(-1.0 / p))
}

/// `f_{a,p,γ}(z) = ((1 - |a|^2)/(1 - ā z))^{(γ+1)/p}` truncated to `len`
/// coefficients.
pub fn test_function(a: Complex64, p: f64, gamma: f64, len: usize) -> Result<AnalyticSeries> {
    check_p(p)?;
    let m = a.norm();
    if !(m < 1.0) {
        return Err(Error::domain(format!(
            "test function needs |a| < 1, got {a}"
        )));
    }
    if m == 0.0 {
        return Ok(AnalyticSeries::constant(Complex64::new(1.0, 0.0), len));
    }
    let s = (gamma + 1.0) / p;
    let series =
        builtin::binomial(a.conj(), s, len).scale(Complex64::new((1.0 - m * m).powf(s), 0.0));
    let peak = series.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    let last = series.coeff(len - 1).norm();
    if last / (1.0 - m) > 1e-13 * peak {
        return Err(Error::Precision(format!(
            "{len} coefficients do not resolve the test function at |a| = {m}"
        )));
    }
    Ok(AnalyticSeries::polynomial(series.coeffs().to_vec()))
}

/// Coefficient count that resolves `f_{a,p,γ}` on the closed disk.
pub fn test_function_length(a: Complex64, p: f64, gamma: f64) -> usize {
    let m = a.norm();
    if m == 0.0 {
        return 1;
    }
    let s = (gamma + 1.0) / p;
    // |c_n| ~ n^{s-1} m^n / Γ(s); stop well below 1e-16 relative
    let mut n = 16usize;
    while n < 1 << 20 {
        let log_term = (s - 1.0) * (n as f64).ln() + n as f64 * m.ln() - (1.0 - m).ln();
        if log_term < -45.0 {
            break;
        }
        n *= 2;
    }
    n
}
