//! Volterra-type operators attached to a Koenigs function `h`, the resolvent
//! of the generator, and the little-Bloch and boundary tests that decide
//! compactness of the resolvent.
//!
//! Everything acts on Taylor coefficients. Each result carries only the
//! coefficients that are exact given the inputs: with `h` known to `N`
//! terms, division by `h/z` determines `N - 1` of them.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bergman::{membership_test, Membership, MembershipVerdict};
use crate::error::{Error, Result};
use crate::semigroup::{SemigroupSpec, SpiralGeometry};
use crate::series::AnalyticSeries;
use crate::spectral::{
    operator_section, section_eigenvalues, CrossCheck, Provenance, SpectralPoint, SpectrumPart,
    SpectrumReport,
};
use crate::trend::{self, Verdict};
use crate::weights::RadialWeight;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Below this `|h'(0)|` the operators are refused.
pub const MIN_DERIVATIVE: f64 = 1e-12;

/// `z^c Σ a_n z^n`.
#[derive(Debug, Clone)]
pub struct FractionalSeries {
    pub offset: Complex64,
    pub series: AnalyticSeries,
}

impl FractionalSeries {
    /// `∫_0^z`; needs `Re(offset) > -1` so that every `ζ^{c+n}` is integrable.
    pub fn antiderivative(&self) -> Result<Self> {
        let c1 = self.offset + 1.0;
        if !(c1.re > 0.0) {
            return Err(Error::domain(format!(
                "∫_0^z ζ^({}) diverges at 0",
                self.offset
            )));
        }
        let coeffs = self
            .series
            .coeffs()
            .iter()
            .enumerate()
            .map(|(n, a)| a / (c1 + n as f64))
            .collect();
        Ok(FractionalSeries {
            offset: c1,
            series: AnalyticSeries::new(coeffs),
        })
    }

    /// Multiplies by `z^{-c}`.
    pub fn shift(&self, c: Complex64) -> Self {
        FractionalSeries {
            offset: self.offset - c,
            series: self.series.clone(),
        }
    }

    /// The ordinary series, when the offset is zero.
    pub fn into_series(self) -> Result<AnalyticSeries> {
        if self.offset.norm() > 1e-14 {
            return Err(Error::domain(format!(
                "fractional offset {} left after assembly; result would be multivalued",
                self.offset
            )));
        }
        Ok(self.series)
    }
}

/// Number of exact output coefficients: `f` limits to its length, `h` to its
/// length minus one; two polynomials give their combined length.
fn working_len(h: &AnalyticSeries, f: &AnalyticSeries) -> usize {
    let hf = if h.is_polynomial() {
        usize::MAX
    } else {
        h.len() - 1
    };
    let ff = if f.is_polynomial() {
        usize::MAX
    } else {
        f.len()
    };
    match hf.min(ff) {
        usize::MAX => f.len() + h.len(),
        n => n.max(1),
    }
}

fn pad(s: &AnalyticSeries, n: usize) -> Vec<Complex64> {
    (0..n).map(|k| s.coeff(k)).collect()
}

fn conv(a: &[Complex64], b: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut out = vec![ZERO; n];
    for (i, &x) in a.iter().enumerate().take(n) {
        if x == ZERO {
            continue;
        }
        for (j, &y) in b.iter().enumerate().take(n - i) {
            out[i + j] += x * y;
        }
    }
    out
}

fn divide(a: &[Complex64], g: &[Complex64], n: usize) -> Vec<Complex64> {
    let mut q = vec![ZERO; n];
    for k in 0..n {
        let mut acc = a.get(k).copied().unwrap_or(ZERO);
        for j in 1..=k.min(g.len() - 1) {
            acc -= g[j] * q[k - j];
        }
        q[k] = acc / g[0];
    }
    q
}

/// `(1/z) ∫_0^z g`, coefficientwise `g_k/(k+1)`.
fn averaged(g: &[Complex64]) -> Vec<Complex64> {
    g.iter()
        .enumerate()
        .map(|(k, c)| c / (k as f64 + 1.0))
        .collect()
}

/// The pieces of `h = z u` used by every operator, padded to `n + 1`.
struct Koenigs {
    u: Vec<Complex64>,
    dh: Vec<Complex64>,
}

fn split(h: &AnalyticSeries, n: usize) -> Result<Koenigs> {
    if h.coeff(0).norm() > 1e-14 {
        return Err(Error::domain(format!("h(0) = {} must vanish", h.coeff(0))));
    }
    if h.coeff(1).norm() < MIN_DERIVATIVE {
        return Err(Error::domain(format!(
            "|h'(0)| = {:e} is below tolerance",
            h.coeff(1).norm()
        )));
    }
    let u: Vec<Complex64> = (0..=n).map(|k| h.coeff(k + 1)).collect();
    let dh: Vec<Complex64> = (0..=n).map(|k| h.coeff(k + 1) * (k as f64 + 1.0)).collect();
    Ok(Koenigs { u, dh })
}

fn finish(coeffs: Vec<Complex64>) -> AnalyticSeries {
    AnalyticSeries::new(coeffs)
}

/// `R_h f = (1/h) ∫_0^z f h'`.
pub fn apply_r_h(h: &AnalyticSeries, f: &AnalyticSeries) -> Result<AnalyticSeries> {
    let n = working_len(h, f);
    let k = split(h, n)?;
    // ∫ f h' = z Σ g_k z^k/(k+1), and h = z u
    let g = conv(&pad(f, n), &k.dh, n);
    Ok(finish(divide(&averaged(&g), &k.u, n)))
}

/// `P_h f = (1/(z h)) ∫_0^z f ζ h'`.
pub fn apply_p_h(h: &AnalyticSeries, f: &AnalyticSeries) -> Result<AnalyticSeries> {
    let n = working_len(h, f);
    let k = split(h, n)?;
    // ∫ f ζ h' = z^2 Σ g_k z^k/(k+2), and z h = z^2 u
    let g = conv(&pad(f, n), &k.dh, n);
    let integ: Vec<Complex64> = g
        .iter()
        .enumerate()
        .map(|(j, c)| c / (j as f64 + 2.0))
        .collect();
    Ok(finish(divide(&integ, &k.u, n)))
}

/// `ζ h'/h = h'/u`.
fn log_derivative_times_z(k: &Koenigs, n: usize) -> Vec<Complex64> {
    divide(&k.dh, &k.u, n)
}

/// `Q_h f = (1/z) ∫_0^z f ζ h'/h`.
pub fn apply_q_h(h: &AnalyticSeries, f: &AnalyticSeries) -> Result<AnalyticSeries> {
    let n = working_len(h, f);
    let k = split(h, n)?;
    let kernel = log_derivative_times_z(&k, n);
    Ok(finish(averaged(&conv(&pad(f, n), &kernel, n))))
}

/// `L_h f = (1/z) ∫_0^z f (log(h/ζ))'`.
pub fn apply_l_h(h: &AnalyticSeries, f: &AnalyticSeries) -> Result<AnalyticSeries> {
    let n = working_len(h, f);
    let k = split(h, n)?;
    let du: Vec<Complex64> = (0..n)
        .map(|j| k.u.get(j + 1).copied().unwrap_or(ZERO) * (j as f64 + 1.0))
        .collect();
    let kernel = divide(&du, &k.u, n);
    Ok(finish(averaged(&conv(&pad(f, n), &kernel, n))))
}

/// `J f = (1/z) ∫_0^z f`.
pub fn apply_j(f: &AnalyticSeries) -> AnalyticSeries {
    let out = averaged(f.coeffs());
    if f.is_polynomial() {
        AnalyticSeries::polynomial(out)
    } else {
        finish(out)
    }
}

/// `M_z f = z f`.
pub fn apply_m_z(f: &AnalyticSeries) -> AnalyticSeries {
    f.mul_z()
}

/// `R(λ, Γ) f` for a semigroup with `b = 0`, via
/// `-(1/G'(0)) h^{-c} ∫_0^z f h^{c-1} h'` with `c = λ/(-G'(0))`.
pub fn apply_resolvent(
    spec: &SemigroupSpec,
    lambda: Complex64,
    f: &AnalyticSeries,
) -> Result<AnalyticSeries> {
    if spec.b().norm() > 1e-14 {
        return Err(Error::domain(
            "resolvent formula needs b = 0; conjugate the semigroup first",
        ));
    }
    resolvent_with(spec.h_series(), spec.gprime_b(), lambda, f)
}

/// [`apply_resolvent`] on raw Koenigs data.
pub fn resolvent_with(
    h: &AnalyticSeries,
    gprime: Complex64,
    lambda: Complex64,
    f: &AnalyticSeries,
) -> Result<AnalyticSeries> {
    if gprime.norm() == 0.0 {
        return Err(Error::domain("G'(0) = 0"));
    }
    let mu = -gprime;
    let c = lambda / mu;
    if !(c.re > 0.0) {
        return Err(Error::domain(format!(
            "Re(λ/(-G'(0))) = {} must be positive",
            c.re
        )));
    }
    let n = working_len(h, f);
    let k = split(h, n)?;
    // h^c = z^c w, w = u^c on the branch through h'(0)^c
    let u = AnalyticSeries::new(k.u[..n].to_vec());
    let w = u.powc(c)?;
    let wc = pad(&w, n);
    // h^{c-1} h' = (1/c) z^{c-1} (c w + z w'), and (c w + z w')_j = (c + j) w_j
    let weighted: Vec<Complex64> = wc
        .iter()
        .enumerate()
        .map(|(j, x)| x * (c + j as f64))
        .collect();
    let integrand = FractionalSeries {
        offset: c - 1.0,
        series: AnalyticSeries::new(conv(&pad(f, n), &weighted, n)),
    };
    let integral = integrand.antiderivative()?.shift(c).into_series()?;
    // -(1/G'(0)) (1/c) = 1/(μ c) = 1/λ
    let q = divide(integral.coeffs(), &wc, n);
    Ok(finish(q.into_iter().map(|x| x / lambda).collect()))
}

/// `log(h/z)`.
pub fn log_h_over_z(h: &AnalyticSeries) -> Result<AnalyticSeries> {
    if h.coeff(0).norm() > 1e-14 || h.coeff(1).norm() < MIN_DERIVATIVE {
        return Err(Error::domain("log(h/z) needs h(0) = 0 and h'(0) != 0"));
    }
    if h.is_polynomial() && h.coeffs().iter().skip(2).all(|c| *c == ZERO) {
        return Ok(AnalyticSeries::polynomial(vec![h.coeff(1).ln()]));
    }
    h.div_z_pow(1, 1e-14)?.log()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlochVerdict {
    LittleO,
    /// Bloch but not little Bloch
    Bounded,
    Inconclusive,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlochReport {
    pub verdict: BlochVerdict,
    pub radii: Vec<f64>,
    /// `max_θ (1-r^2)|g'(r e^{iθ})|`
    pub profile: Vec<f64>,
    pub limit: f64,
    /// `"geometric"` or `"logarithmic"`, whichever model fits the tail
    pub model: String,
    pub method: String,
    pub tolerance: f64,
}

/// Profile of `(1-r^2)|g'|` on `r_j = 1 - 2^{-j}` while the truncation is
/// accurate to `tol`.
pub fn bloch_little_o_test(g: &AnalyticSeries, tol: f64) -> Result<BlochReport> {
    let dg = g.derivative();
    let mut radii = Vec::new();
    let mut profile = Vec::new();
    let scale = dg.coeffs().iter().map(|c| c.norm()).fold(0.0, f64::max);
    let exact = dg.is_polynomial();
    for j in 1..=60 {
        let r = 1.0 - 0.5f64.powi(j);
        let err = dg.error_bound(r);
        if !exact && !(err <= tol * scale.max(1.0)) {
            break;
        }
        // a degree-N truncation has no angular detail finer than 1/N
        let m = (16.0 / (1.0 - r))
            .min(8.0 * dg.len() as f64)
            .max(256.0)
            .log2()
            .ceil()
            .exp2() as usize;
        let b = dg
            .values_on_circle(r, m)
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
            * (1.0 - r * r);
        radii.push(r);
        profile.push(b);
        if exact && j >= 24 {
            break;
        }
    }
    if profile.len() < 4 {
        return Err(Error::Precision(format!(
            "series resolves only {} radii; a longer truncation is needed",
            profile.len()
        )));
    }
    let peak = profile.iter().cloned().fold(0.0, f64::max);
    if peak <= 1e-14 {
        return Ok(BlochReport {
            verdict: BlochVerdict::LittleO,
            radii,
            profile,
            limit: 0.0,
            model: "zero".into(),
            method: "dyadic radius profile".into(),
            tolerance: tol,
        });
    }
    let last = *profile.last().unwrap_or(&0.0);
    let k = profile.len().min(6);
    let tail = &profile[profile.len() - k..];
    let decreasing =
        trend::non_increasing(&tail[1..], 1e-9) && tail[k - 1] < tail[1] * (1.0 - 1e-6);
    let limit = tail_limit(&radii, &profile);
    let verdict = if k < 6 {
        // three fitted parameters need a longer profile to decide
        BlochVerdict::Inconclusive
    } else if decreasing && limit <= 0.1 * tail[0] {
        BlochVerdict::LittleO
    } else if limit >= 0.5 * last && limit.is_finite() {
        BlochVerdict::Bounded
    } else {
        BlochVerdict::Inconclusive
    };
    let model = "L + c/j + d 2^-j".to_string();
    Ok(BlochReport {
        verdict,
        radii,
        profile,
        limit,
        model,
        method: "dyadic radius profile, limit from the better of a geometric or 1/log model".into(),
        tolerance: tol,
    })
}

/// Limit `L` of a dyadic profile fitted by least squares to
/// `L + c/j + d 2^{-j}`, which covers both geometric approach and the slow
/// `1/log(1/(1-r))` decay.
fn tail_limit(radii: &[f64], xs: &[f64]) -> f64 {
    let k = xs.len().min(6);
    let rows: Vec<[f64; 3]> = radii[radii.len() - k..]
        .iter()
        .map(|r| {
            let j = -(1.0 - r).log2();
            [1.0, 1.0 / j, (-j).exp2()]
        })
        .collect();
    let a = DMatrix::from_fn(k, 3, |i, c| rows[i][c]);
    let b = DVector::from_column_slice(&xs[xs.len() - k..]);
    match a.svd(true, true).solve(&b, 1e-14) {
        Ok(sol) => sol[0].max(0.0),
        Err(_) => *xs.last().unwrap_or(&f64::NAN),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundaryPoint {
    pub zeta: Complex64,
    pub ratios: Vec<f64>,
    pub growth_rate: Option<f64>,
    pub divergent: Verdict,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundaryReport {
    /// `Yes` when `|G(z)/(z-ζ)| → ∞` at every grid point
    pub divergent_everywhere: Verdict,
    pub points: Vec<BoundaryPoint>,
    pub radii: Vec<f64>,
    pub method: String,
}

/// `|G(rζ)/(rζ - ζ)|` along `r_j = 1 - 2^{-j}` for `G` given as a callable.
pub fn generator_boundary_test_fn<G>(
    g: G,
    zeta_grid: &[Complex64],
    levels: usize,
) -> Result<BoundaryReport>
where
    G: Fn(Complex64) -> Result<Complex64>,
{
    if levels < 4 {
        return Err(Error::domain("boundary test needs at least 4 radii"));
    }
    let radii: Vec<f64> = (1..=levels).map(|j| 1.0 - 0.5f64.powi(j as i32)).collect();
    let mut points = Vec::new();
    for &zeta in zeta_grid {
        if (zeta.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::domain(format!("{zeta} is not on the unit circle")));
        }
        let ratios: Vec<f64> = radii
            .iter()
            .map(|&r| Ok(g(r * zeta)?.norm() / (1.0 - r)))
            .collect::<Result<_>>()?;
        let rate = trend::log2_slope(&ratios, 4);
        let divergent = match rate {
            Some(s) if s > 0.5 => Verdict::Yes,
            Some(s) if s < 0.1 => Verdict::No,
            _ => Verdict::Inconclusive,
        };
        points.push(BoundaryPoint {
            zeta,
            ratios,
            growth_rate: rate,
            divergent,
        });
    }
    let divergent_everywhere = if points.iter().all(|p| p.divergent == Verdict::Yes) {
        Verdict::Yes
    } else if points.iter().any(|p| p.divergent == Verdict::No) {
        Verdict::No
    } else {
        Verdict::Inconclusive
    };
    Ok(BoundaryReport {
        divergent_everywhere,
        points,
        radii,
        method: "log2 growth rate of |G(rζ)|/(1-r) over the last 4 dyadic radii".into(),
    })
}

/// Boundary test for the generator `G = G'(0) h/h'` of an elliptic spec.
pub fn generator_boundary_test(
    spec: &SemigroupSpec,
    zeta_grid: &[Complex64],
    levels: usize,
) -> Result<BoundaryReport> {
    if spec.b().norm() > 1e-14 {
        return Err(Error::domain("boundary test needs b = 0"));
    }
    generator_boundary_test_fn(|z| spec.generator_eval(z), zeta_grid, levels)
}

/// `count` equally spaced points of the unit circle.
pub fn circle_grid(count: usize) -> Vec<Complex64> {
    (0..count)
        .map(|k| Complex64::from_polar(1.0, TAU * k as f64 / count as f64))
        .collect()
}

/// Whether the boundary verdict and the Bloch verdict agree on compactness
/// of the resolvent.
pub fn boundary_agrees_with_bloch(boundary: &BoundaryReport, bloch: &BlochReport) -> Option<bool> {
    match (boundary.divergent_everywhere, bloch.verdict) {
        (Verdict::Inconclusive, _) | (_, BlochVerdict::Inconclusive) => None,
        (v, b) => Some((v == Verdict::Yes) == (b == BlochVerdict::LittleO)),
    }
}

/// `σ(R_h) = {1/(k+1) : h^k ∈ A^p_ω} ∪ {0}`.
#[allow(clippy::too_many_arguments)]
pub fn r_h_spectrum(
    h: &AnalyticSeries,
    p: f64,
    w: &RadialWeight,
    geo: &SpiralGeometry,
    bloch: &BlochReport,
    k_max: usize,
    section_dim: usize,
) -> Result<SpectrumReport> {
    let mut caveats = Vec::new();
    match bloch.verdict {
        BlochVerdict::Bounded => {
            return Err(Error::Refused(
                "log(h/z) is not in the little Bloch space; the spectrum formula for R_h does not apply".into(),
            ))
        }
        BlochVerdict::Inconclusive => caveats.push("little-Bloch verdict inconclusive; hypothesis assumed".into()),
        BlochVerdict::LittleO => {}
    }
    let mut points = Vec::new();
    let mut undecided = Vec::new();
    for k in 0..=k_max {
        let v: MembershipVerdict = membership_test(h, k, p, w, geo)?;
        match v.verdict {
            Membership::In => points.push(SpectralPoint {
                value: Complex64::new(1.0 / (k as f64 + 1.0), 0.0),
                k: Some(k),
                provenance: Provenance::EigenvalueFormula,
                membership: Some(v),
            }),
            Membership::Inconclusive => {
                undecided.push(k);
                caveats.push(format!("k = {k}: membership of h^k inconclusive"));
            }
            Membership::Out => {
                caveats.push(format!(
                    "k = {k}: h^k is not in A^p_w; larger powers are excluded"
                ));
                break;
            }
        }
    }
    points.push(SpectralPoint {
        value: ZERO,
        k: None,
        provenance: Provenance::TheoremAssembly,
        membership: None,
    });
    let mut report = SpectrumReport {
        operator: "R_h".into(),
        parts: vec![SpectrumPart::Points { points }],
        theorem_used: "spectrum of R_h for spiral-like h with log(h/z) little Bloch: reciprocals 1/(k+1) over powers h^k in A^p_w, plus 0".into(),
        caveats,
        method: "membership test per k".into(),
        tolerance: 1e-6,
        essential_radius: None,
        cross_check: None,
        undecided,
    };
    if p == 2.0 && section_dim > 0 {
        let hn = h.truncate(section_dim + 2);
        let t = operator_section(|f| apply_r_h(&hn, f), w, section_dim, "R_h")?;
        let eig = section_eigenvalues(&t)?;
        let mut max_distance: f64 = 0.0;
        for e in &eig {
            let d = (0..=section_dim)
                .map(|k| (e - ONE / (k as f64 + 1.0)).norm())
                .fold(f64::INFINITY, f64::min);
            max_distance = max_distance.max(d);
        }
        let consistent = max_distance <= 1e-6;
        if !consistent {
            report
                .caveats
                .push("finite-section eigenvalues of R_h stray from {1/(k+1)}".into());
        }
        report.cross_check = Some(CrossCheck {
            dim: section_dim,
            eigenvalues: eig,
            max_distance,
            consistent,
        });
    }
    Ok(report)
}

/// `λ ↦ e^{t(μ - μ/λ)}`, sending `1/(k+1)` to `e^{-kμt}`.
pub fn rh_to_cphi(lambda: Complex64, mu: Complex64, t: f64) -> Option<Complex64> {
    if lambda == ZERO {
        return None;
    }
    Some((t * (mu - mu / lambda)).exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::builtin;

    fn z() -> AnalyticSeries {
        AnalyticSeries::polynomial(vec![ZERO, ONE])
    }

    #[test]
    fn r_z_on_monomials() {
        for n in 0..6 {
            let out = apply_r_h(&z(), &AnalyticSeries::monomial(n, n + 1)).unwrap();
            assert!((out.coeff(n) - 1.0 / (n as f64 + 1.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn r_h_constant_is_one_at_zero() {
        let h = builtin::log_one_over_one_minus(64);
        let out = apply_r_h(&h, &AnalyticSeries::constant(ONE, 64)).unwrap();
        assert!((out.coeff(0) - 1.0).norm() < 1e-15);
    }

    #[test]
    fn l_h_vanishes_for_identity() {
        let f = AnalyticSeries::from_real(&[1.0, 2.0, 3.0]);
        let l = apply_l_h(&z(), &f).unwrap();
        assert!(l.coeffs().iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn resolvent_at_mu_is_scaled_r_h() {
        let h = builtin::log_one_over_one_minus(64);
        let f = AnalyticSeries::from_real(&[1.0, -0.5, 0.25]);
        let mu = Complex64::new(1.0, 0.0);
        let a = resolvent_with(&h, -mu, mu, &f).unwrap();
        let b = apply_r_h(&h, &f).unwrap();
        assert!(a.coeff_distance(&b) < 1e-13);
    }
}
