//! Finite sections on the orthonormal monomial basis of A²_ω, essential
//! spectral radii from ω*-ratio profiles, and assembled spectrum reports.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bergman::{membership_test, Membership, MembershipVerdict};
use crate::error::{Error, Result};
use crate::geometry::mobius;
use crate::maps::SelfMap;
use crate::semigroup::{closed_curve_self_intersects, SemigroupSpec, SpiralGeometry};
use crate::series::AnalyticSeries;
use crate::trend;
use crate::weights::RadialWeight;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Default number of displayed spectral points.
pub const K_MAX: usize = 64;

/// `m_{2n+1}` for `n = 0..count`.
pub fn weight_moments(w: &RadialWeight, count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::domain("moment count must be at least 1"));
    }
    w.moments(count)
}

/// An `N×N` compression of an operator to `span{z^n / sqrt(m_{2n+1})}`.
#[derive(Debug, Clone)]
pub struct FiniteSection {
    pub dim: usize,
    pub entries: DMatrix<Complex64>,
    pub operator_tag: String,
}

impl FiniteSection {
    pub fn basis(&self) -> &'static str {
        "orthonormal monomials z^n / sqrt(m_{2n+1}) of A^2_w"
    }

    /// `max |T[j][n]|` over `j < n`.
    pub fn upper_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for n in 0..self.dim {
            for j in 0..n {
                worst = worst.max(self.entries[(j, n)].norm());
            }
        }
        worst
    }

    fn lower_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for n in 0..self.dim {
            for j in n + 1..self.dim {
                worst = worst.max(self.entries[(j, n)].norm());
            }
        }
        worst
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self.entries[(i, i)]).collect()
    }
}

/// Section of a linear map on series: column `n` holds the coefficients of
/// `op(z^n)` rescaled to the orthonormal basis.
pub fn operator_section<F>(op: F, w: &RadialWeight, dim: usize, tag: &str) -> Result<FiniteSection>
where
    F: Fn(&AnalyticSeries) -> Result<AnalyticSeries>,
{
    let m = weight_moments(w, dim)?;
    let mut t = DMatrix::from_element(dim, dim, ZERO);
    for n in 0..dim {
        let image = op(&AnalyticSeries::monomial(n, dim))?;
        for j in 0..dim {
            t[(j, n)] = image.coeff(j) * (m[j] / m[n]).sqrt();
        }
    }
    Ok(FiniteSection {
        dim,
        entries: t,
        operator_tag: tag.to_string(),
    })
}

/// Section of `C_φ` for `φ(0) = 0`: `T[j][n] = [φ^n]_j sqrt(m_{2j+1}/m_{2n+1})`.
pub fn composition_section(
    phi: &AnalyticSeries,
    w: &RadialWeight,
    dim: usize,
) -> Result<FiniteSection> {
    if phi.coeff(0).norm() > 1e-14 {
        return Err(Error::domain(format!(
            "composition section needs φ(0) = 0, got {}; conjugate the fixed point to 0 first",
            phi.coeff(0)
        )));
    }
    let mut inner = phi.truncate(dim.max(2)).coeffs().to_vec();
    inner[0] = ZERO;
    let inner = AnalyticSeries::new(inner);
    let m = weight_moments(w, dim)?;
    let powers = inner.powers(dim, dim);
    let mut t = DMatrix::from_element(dim, dim, ZERO);
    for (n, pn) in powers.iter().enumerate() {
        for j in n..dim {
            t[(j, n)] = pn.coeff(j) * (m[j] / m[n]).sqrt();
        }
    }
    Ok(FiniteSection {
        dim,
        entries: t,
        operator_tag: "C_phi".into(),
    })
}

/// Eigenvalues of a section: the diagonal for triangular matrices, a
/// complex Schur form otherwise.
pub fn section_eigenvalues(t: &FiniteSection) -> Result<Vec<Complex64>> {
    let norm = t.entries.iter().map(|c| c.norm()).fold(0.0, f64::max);
    let tiny = 1e-14 * norm.max(f64::MIN_POSITIVE);
    if t.upper_defect() <= tiny || t.lower_defect() <= tiny {
        return Ok(t.diagonal());
    }
    let schur = nalgebra::linalg::Schur::try_new(t.entries.clone(), 1e-15, 10_000)
        .ok_or_else(|| Error::Eigen("Schur iteration did not converge".into()))?;
    let (q, tri) = schur.unpack();
    let recon = &q * &tri * q.adjoint();
    let backward = (&recon - &t.entries)
        .iter()
        .map(|c| c.norm())
        .fold(0.0, f64::max);
    let frob = t.entries.norm();
    if backward > 1e-10 * frob.max(f64::MIN_POSITIVE) {
        return Err(Error::Eigen(format!(
            "Schur backward error {backward:e} exceeds 1e-10 ‖T‖ = {:e}",
            1e-10 * frob
        )));
    }
    Ok((0..t.dim).map(|i| tri[(i, i)]).collect())
}

/// Which self-map an essential radius refers to.
#[derive(Debug, Clone)]
pub enum MapSource {
    /// a single map; its iterates are computed by repeated evaluation
    Map(SelfMap),
    /// `φ_t` of a semigroup; the `n`-th iterate is `φ_{nt}`
    SemigroupTime { spec: SemigroupSpec, t: f64 },
}

impl MapSource {
    fn iterate(&self, n: usize, z: Complex64) -> Result<Complex64> {
        match self {
            MapSource::Map(m) => m.iterate(n, z),
            MapSource::SemigroupTime { spec, t } => spec.evaluate_phi(n as f64 * t, z),
        }
    }

    fn sup_norm_hint(&self) -> Option<f64> {
        match self {
            MapSource::Map(m) => m.sup_norm_hint(),
            MapSource::SemigroupTime { spec, t } => spec.closed_form().and_then(|c| c.sup_norm(*t)),
        }
    }

    fn is_semigroup(&self) -> bool {
        matches!(self, MapSource::SemigroupTime { .. })
    }

    fn eval(&self, z: Complex64) -> Result<Complex64> {
        self.iterate(1, z)
    }
}

/// Grid and extrapolation parameters for ω*-ratio profiles.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct RadiusParams {
    pub n_max: usize,
    pub j_min: usize,
    pub j_max: usize,
    pub angles: usize,
    /// radii below this are reported as 0
    pub zero_threshold: f64,
}

impl Default for RadiusParams {
    fn default() -> Self {
        RadiusParams {
            n_max: 6,
            j_min: 2,
            j_max: 14,
            angles: 64,
            zero_threshold: 1e-3,
        }
    }
}

/// `max_θ ω*(r_j)/ω*(|φ_n(r_j e^{iθ})|)` along `r_j = 1 - 2^{-j}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RatioProfile {
    pub n: usize,
    pub radii: Vec<f64>,
    pub ratios: Vec<f64>,
    pub limit: f64,
    pub band: f64,
}

pub fn ratio_profile(
    source: &MapSource,
    w: &RadialWeight,
    n: usize,
    params: &RadiusParams,
) -> Result<RatioProfile> {
    let mut radii = Vec::new();
    let mut ratios = Vec::new();
    for j in params.j_min..=params.j_max {
        let u = 0.5f64.powi(j as i32);
        let r = 1.0 - u;
        let num = w.omega_star(r)?;
        let mut worst: f64 = 0.0;
        for k in 0..params.angles.max(1) {
            let z = Complex64::from_polar(r, TAU * k as f64 / params.angles.max(1) as f64);
            let image = source.iterate(n, z)?;
            let m = image.norm();
            if !(m < 1.0) {
                return Err(Error::domain(format!("iterate leaves the disk at {z}")));
            }
            let ratio = if m == 0.0 {
                0.0
            } else {
                num / w.omega_star(m)?
            };
            worst = worst.max(ratio);
        }
        radii.push(r);
        ratios.push(worst);
    }
    let (limit, band) = trend::extrapolate(&ratios);
    let last = *ratios.last().unwrap_or(&0.0);
    let limit = if limit.is_finite() {
        limit.max(0.0)
    } else {
        last
    };
    Ok(RatioProfile {
        n,
        radii,
        ratios,
        limit,
        band: if band.is_finite() { band } else { last },
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EssentialRadius {
    /// `r_{e,p}`
    pub estimate: f64,
    /// `r_{e,2}`
    pub estimate_p2: f64,
    pub band: [f64; 2],
    pub p: f64,
    pub best_n: usize,
    pub profiles: Vec<RatioProfile>,
    pub caveats: Vec<String>,
    pub method: String,
}

fn check_univalent(source: &MapSource) -> Result<()> {
    if source.is_semigroup() {
        return Ok(());
    }
    let m = 1024;
    let pts: Vec<Complex64> = (0..m)
        .map(|k| source.eval(Complex64::from_polar(0.995, TAU * k as f64 / m as f64)))
        .collect::<Result<_>>()?;
    let span = pts.iter().map(|p| (p - pts[0]).norm()).fold(0.0, f64::max);
    if span == 0.0 || closed_curve_self_intersects(pts) {
        return Err(Error::Refused(
            "the ω*-ratio formula for the essential radius needs a univalent map".into(),
        ));
    }
    Ok(())
}

/// `r_{e,p}(C_φ) = (min_n Q_n^{1/(2n)})^{2/p}`.
pub fn essential_radius(
    source: &MapSource,
    w: &RadialWeight,
    p: f64,
    params: &RadiusParams,
) -> Result<EssentialRadius> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(Error::domain(format!(
            "essential radius needs p >= 1, got {p}"
        )));
    }
    check_univalent(source)?;
    let mut caveats = Vec::new();
    if let Some(s) = source.sup_norm_hint() {
        if s < 1.0 {
            caveats.push(format!("sup norm {s} < 1: image separated from the circle"));
        }
    }
    let mut best: Option<(f64, f64, f64, usize)> = None;
    let mut profiles = Vec::new();
    for n in 1..=params.n_max.max(1) {
        let prof = ratio_profile(source, w, n, params)?;
        let e = 1.0 / (2.0 * n as f64);
        let tail = &prof.ratios[prof.ratios.len().saturating_sub(4)..];
        let monotone = trend::non_increasing(tail, 1e-9)
            || tail.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-9));
        let (lo_q, hi_q) = if monotone {
            ((prof.limit - prof.band).max(0.0), prof.limit + prof.band)
        } else {
            caveats.push(format!("profile for n = {n} is not monotone; band widened"));
            let lo = tail.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = tail.iter().cloned().fold(0.0, f64::max);
            (lo.min(prof.limit), hi.max(prof.limit))
        };
        let est = prof.limit.powf(e);
        if best.is_none_or(|b| est < b.0) {
            best = Some((est, lo_q.powf(e), hi_q.powf(e), n));
        }
        profiles.push(prof);
        if est == 0.0 {
            break;
        }
    }
    let (mut est2, mut lo, mut hi, best_n) = best.expect("at least one profile");
    if est2 < params.zero_threshold {
        caveats.push(format!(
            "estimate {est2:e} below the zero threshold {:e}; reported as 0",
            params.zero_threshold
        ));
        est2 = 0.0;
        lo = 0.0;
        hi = hi.max(params.zero_threshold);
    }
    let scale = 2.0 / p;
    Ok(EssentialRadius {
        estimate: est2.powf(scale),
        estimate_p2: est2,
        band: [lo.powf(scale), hi.powf(scale)],
        p,
        best_n,
        profiles,
        caveats,
        method: "ω*-ratio profiles on r_j = 1 - 2^-j, Aitken-extrapolated, minimized over iterates"
            .into(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    EigenvalueFormula,
    FiniteSection,
    TheoremAssembly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Closure {
    Open,
    Closed,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralPoint {
    pub value: Complex64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    pub provenance: Provenance,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub membership: Option<MembershipVerdict>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SpectrumPart {
    Disk {
        radius: f64,
        which: Closure,
        band: [f64; 2],
        provenance: Provenance,
    },
    /// `Re λ <= re_max`; `re_max = -inf` is the empty set
    HalfPlane {
        re_max: f64,
        which: Closure,
        band: [f64; 2],
        provenance: Provenance,
    },
    Points {
        points: Vec<SpectralPoint>,
    },
}

/// A spectrum as a union of parts, each with its origin.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectrumReport {
    pub operator: String,
    pub parts: Vec<SpectrumPart>,
    pub theorem_used: String,
    pub caveats: Vec<String>,
    pub method: String,
    pub tolerance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub essential_radius: Option<EssentialRadius>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cross_check: Option<CrossCheck>,
    /// `k` whose membership test was inconclusive; their points are omitted
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub undecided: Vec<usize>,
}

/// Agreement of finite-section eigenvalues with the assembled spectrum.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrossCheck {
    pub dim: usize,
    pub eigenvalues: Vec<Complex64>,
    pub max_distance: f64,
    pub consistent: bool,
}

impl SpectrumReport {
    pub fn points(&self) -> Vec<Complex64> {
        self.parts
            .iter()
            .filter_map(|p| match p {
                SpectrumPart::Points { points } => Some(points.iter().map(|q| q.value)),
                _ => None,
            })
            .flatten()
            .collect()
    }

    pub fn disk_radius(&self) -> Option<f64> {
        self.parts.iter().find_map(|p| match p {
            SpectrumPart::Disk { radius, .. } => Some(*radius),
            _ => None,
        })
    }

    pub fn half_plane(&self) -> Option<f64> {
        self.parts.iter().find_map(|p| match p {
            SpectrumPart::HalfPlane { re_max, .. } => Some(*re_max),
            _ => None,
        })
    }

    /// Whether `λ` lies in a reported part, up to `tol`.
    pub fn contains(&self, lambda: Complex64, tol: f64) -> bool {
        self.parts.iter().any(|p| match p {
            SpectrumPart::Disk { radius, band, .. } => lambda.norm() <= radius.max(band[1]) + tol,
            SpectrumPart::HalfPlane { re_max, band, .. } => lambda.re <= re_max.max(band[1]) + tol,
            SpectrumPart::Points { points } => {
                points.iter().any(|q| (q.value - lambda).norm() <= tol)
            }
        })
    }
}

/// `{k G'(b)}` for the `k` with `h^k ∈ A^p_ω`.
pub fn point_spectrum(
    spec: &SemigroupSpec,
    p: f64,
    w: &RadialWeight,
    geo: &SpiralGeometry,
    k_max: usize,
) -> Result<SpectrumReport> {
    let centered = spec.conjugated_to_origin();
    let h = centered.h_series();
    let g = spec.gprime_b();
    let mut points = Vec::new();
    let mut caveats = Vec::new();
    let mut undecided = Vec::new();
    for k in 0..=k_max {
        let v = membership_test(h, k, p, w, geo)?;
        match v.verdict {
            Membership::In => points.push(SpectralPoint {
                value: g * k as f64 + Complex64::new(0.0, 0.0),
                k: Some(k),
                provenance: Provenance::EigenvalueFormula,
                membership: Some(v),
            }),
            Membership::Inconclusive => {
                undecided.push(k);
                caveats.push(format!(
                    "k = {k}: membership of h^k inconclusive ({})",
                    v.note
                ));
            }
            Membership::Out => {
                caveats.push(format!(
                    "k = {k}: h^k is not in A^p_w; larger powers are excluded"
                ));
                break;
            }
        }
    }
    if points.len() == k_max + 1 {
        caveats.push(format!("all k belong; list truncated at k_max = {k_max}"));
    }
    Ok(SpectrumReport {
        operator: format!("point spectrum of the generator ({})", spec.label()),
        parts: vec![SpectrumPart::Points { points }],
        theorem_used: "eigenvalues k G'(b) of the generator, one for each power h^k in A^p_w"
            .into(),
        caveats,
        method: "membership test per k".into(),
        tolerance: 0.0,
        essential_radius: None,
        cross_check: None,
        undecided,
    })
}

/// `σ(C_φ)` for a univalent non-automorphism `φ` with interior fixed point `a`.
pub fn cphi_spectrum(
    phi: &SelfMap,
    fixed_point: Complex64,
    p: f64,
    w: &RadialWeight,
    params: &RadiusParams,
    k_max: usize,
    section_dim: usize,
) -> Result<SpectrumReport> {
    if !(fixed_point.norm() < 1.0) {
        return Err(Error::domain("fixed point must be interior"));
    }
    let centered = if fixed_point == ZERO {
        phi.clone()
    } else {
        let inner = phi.clone();
        let a = fixed_point;
        SelfMap::new(format!("conjugated {}", phi.label()), move |z| {
            Ok(mobius(a, inner.eval(mobius(a, z))?))
        })
    };
    let residual = centered.eval(ZERO)?.norm();
    if residual > 1e-10 {
        return Err(Error::domain(format!(
            "{fixed_point} is not a fixed point (residual {residual:e})"
        )));
    }
    let lambda = centered.derivative(ZERO)?;
    if lambda.norm() >= 1.0 - 1e-12 {
        return Err(Error::Refused(
            "automorphism: use the point spectrum of the rotation group instead".into(),
        ));
    }
    let source = MapSource::Map(centered.clone());
    let er = essential_radius(&source, w, p, params)?;
    let r_e = er.estimate;
    let mut points = Vec::new();
    let mut pw = ONE;
    for n in 0..=k_max {
        points.push(SpectralPoint {
            value: pw,
            k: Some(n),
            provenance: Provenance::EigenvalueFormula,
            membership: None,
        });
        pw *= lambda;
    }
    let mut caveats = er.caveats.clone();
    caveats.push("disk part is open: |λ| < r_e".into());
    if r_e == 0.0 {
        points.push(SpectralPoint {
            value: ZERO,
            k: None,
            provenance: Provenance::TheoremAssembly,
            membership: None,
        });
    }
    let mut report = SpectrumReport {
        operator: format!("C_phi ({})", phi.label()),
        parts: vec![
            SpectrumPart::Disk {
                radius: r_e,
                which: Closure::Open,
                band: er.band,
                provenance: Provenance::TheoremAssembly,
            },
            SpectrumPart::Points { points },
        ],
        theorem_used: "spectrum of a univalent composition operator with interior fixed point: open disk of essential radius plus powers of the multiplier".into(),
        caveats,
        method: er.method.clone(),
        tolerance: 1e-6,
        essential_radius: Some(er),
        cross_check: None,
        undecided: Vec::new(),
    };
    if section_dim > 0 {
        let series = centered.taylor(section_dim.max(8))?;
        let t = composition_section(&series, w, section_dim)?;
        let eig = section_eigenvalues(&t)?;
        let mut max_distance: f64 = 0.0;
        let mut consistent = true;
        for e in &eig {
            let d = report
                .points()
                .iter()
                .map(|q| (q - e).norm())
                .fold(f64::INFINITY, f64::min);
            if !(d <= 1e-6 || report.contains(*e, 1e-6)) {
                consistent = false;
            }
            max_distance = max_distance.max(d);
        }
        if !consistent {
            report
                .caveats
                .push("finite-section eigenvalues fall outside the assembled spectrum".into());
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

/// Outcome of the eventual norm-continuity test, consumed here as evidence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum ContinuityEvidence {
    PassedAt { t0: f64 },
    Failed,
    Inconclusive,
}

/// `σ(Γ)` from the spectrum of `C_{φ_t}` by inverting `λ ↦ e^{tλ}`.
#[allow(clippy::too_many_arguments)]
pub fn generator_spectrum(
    spec: &SemigroupSpec,
    p: f64,
    w: &RadialWeight,
    t: f64,
    continuity: Option<&ContinuityEvidence>,
    geo: Option<&SpiralGeometry>,
    params: &RadiusParams,
    k_max: usize,
) -> Result<SpectrumReport> {
    if !(t > 0.0) {
        return Err(Error::domain(format!("t must be positive, got {t}")));
    }
    if spec.is_automorphism_group() {
        let geo = match geo {
            Some(g) => *g,
            None => SpiralGeometry::exact(spec.mu(), 0.0, 0.0)?,
        };
        let mut report = point_spectrum(spec, p, w, &geo, k_max)?;
        report.operator = format!("generator of the automorphism group ({})", spec.label());
        report.theorem_used =
            "automorphism group: spectrum equals point spectrum {k G'(b)} over the powers of h in A^p_w".into();
        return Ok(report);
    }
    let passed = matches!(continuity, Some(ContinuityEvidence::PassedAt { .. }));
    if p != 2.0 && !passed {
        return Err(Error::Refused(
            "the generator spectrum for p != 2 requires evidence of eventual norm continuity"
                .into(),
        ));
    }
    let centered = spec.conjugated_to_origin();
    let source = MapSource::SemigroupTime {
        spec: centered.clone(),
        t,
    };
    let er = essential_radius(&source, w, p, params)?;
    let g = spec.gprime_b();
    let mut caveats = er.caveats.clone();
    let (re_max, band) = if er.estimate == 0.0 {
        caveats.push("essential radius 0: the half-plane part is empty".into());
        (f64::NEG_INFINITY, [f64::NEG_INFINITY, er.band[1].ln() / t])
    } else {
        (
            er.estimate.ln() / t,
            [er.band[0].ln() / t, er.band[1].ln() / t],
        )
    };
    caveats.push(format!(
        "points k G'(b) are principal preimages; each carries the lattice 2πi/t·Z with t = {t}"
    ));
    caveats.push("half-plane is closed: |e^(tλ)| <= r_e".into());
    let points = (0..=k_max)
        .map(|k| SpectralPoint {
            value: g * k as f64 + Complex64::new(0.0, 0.0),
            k: Some(k),
            provenance: Provenance::TheoremAssembly,
            membership: None,
        })
        .collect();
    Ok(SpectrumReport {
        operator: format!("generator ({})", spec.label()),
        parts: vec![
            SpectrumPart::HalfPlane {
                re_max,
                which: Closure::Closed,
                band,
                provenance: Provenance::TheoremAssembly,
            },
            SpectrumPart::Points { points },
        ],
        theorem_used: "spectral mapping for eventually norm-continuous semigroups: half-plane Re λ <= log(r_e(C_phi_t))/t plus the points k G'(b)".into(),
        caveats,
        method: er.method.clone(),
        tolerance: 1e-10,
        essential_radius: Some(er),
        cross_check: None,
        undecided: Vec::new(),
    })
}

/// Reports built at two times agree: same points, half-plane bounds within
/// the combined bands.
pub fn t_consistent(a: &SpectrumReport, b: &SpectrumReport, tol: f64) -> bool {
    let (pa, pb) = (a.points(), b.points());
    if pa.len() != pb.len() || pa.iter().zip(&pb).any(|(x, y)| (x - y).norm() > tol) {
        return false;
    }
    match (a.parts.first(), b.parts.first()) {
        (
            Some(SpectrumPart::HalfPlane {
                re_max: x,
                band: bx,
                ..
            }),
            Some(SpectrumPart::HalfPlane {
                re_max: y,
                band: by,
                ..
            }),
        ) => {
            if x.is_infinite() || y.is_infinite() {
                return x == y;
            }
            let slack = (bx[1] - bx[0]).abs().max((by[1] - by[0]).abs()) + tol;
            (x - y).abs() <= slack
        }
        _ => true,
    }
}
