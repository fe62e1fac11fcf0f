//! Experiment configuration: parsed from JSON, validated before any numerics.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::maps::SelfMap;
use crate::semigroup::{SemigroupJson, SemigroupSpec, SpiralGeometry};
use crate::series::{builtin, AnalyticSeries, SeriesJson, DEFAULT_TRUNCATION};
use crate::spectral::{ContinuityEvidence, RadiusParams};
use crate::weights::{RadialWeight, WeightSpec};

fn default_p() -> f64 {
    2.0
}

fn default_t() -> f64 {
    1.0
}

fn default_k_max() -> usize {
    crate::spectral::K_MAX
}

fn c(v: [f64; 2]) -> Complex64 {
    Complex64::new(v[0], v[1])
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// defaults to the standard weight with `α = 0`
    #[serde(default)]
    pub weight: Option<WeightSpec>,
    #[serde(default)]
    pub semigroup: Option<SemigroupJson>,
    #[serde(default = "default_p")]
    pub p: f64,
    #[serde(default)]
    pub truncation: Option<usize>,
    #[serde(default)]
    pub tol: Option<f64>,
    #[serde(default)]
    pub weights: WeightsSection,
    #[serde(default)]
    pub spectrum: SpectrumSection,
    #[serde(default)]
    pub difference: DifferenceSection,
    #[serde(default)]
    pub resolvent: ResolventSection,
    #[serde(default)]
    pub trajectory: TrajectorySection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WeightsSection {
    /// dyadic levels of the doubling diagnostics
    pub levels: usize,
    /// points `r = 1 - 2^{-j/4}` in the profile CSV
    pub profile_points: usize,
}

impl Default for WeightsSection {
    fn default() -> Self {
        WeightsSection {
            levels: 24,
            profile_points: 96,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectrumTarget {
    /// `σ(Γ)`
    Generator,
    /// `σ(C_{φ_t})`
    Cphi,
    /// `Pσ(Γ)`
    Point,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumSection {
    pub target: SpectrumTarget,
    pub t: f64,
    pub k_max: usize,
    /// evidence of eventual norm continuity, needed for `p != 2`
    pub continuity: Option<ContinuityEvidence>,
    /// run the norm-continuity test when no evidence is supplied
    pub auto_continuity: bool,
    /// exact maximal opening `η`; estimated from `h(𝔻)` when absent
    pub opening: Option<f64>,
    pub theta0: f64,
    pub section_dim: usize,
    pub radius: RadiusParams,
}

impl Default for SpectrumSection {
    fn default() -> Self {
        SpectrumSection {
            target: SpectrumTarget::Generator,
            t: default_t(),
            k_max: default_k_max(),
            continuity: None,
            auto_continuity: false,
            opening: None,
            theta0: 0.0,
            section_dim: 24,
            radius: RadiusParams::default(),
        }
    }
}

/// A self-map given in a config.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MapConfig {
    /// `z ↦ c z`
    Linear { c: [f64; 2] },
    /// Taylor coefficients
    Series { series: SeriesJson },
    /// `φ_t` of the configured semigroup
    Semigroup { t: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DifferenceMode {
    Functional,
    Continuity,
    Compactness,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DifferenceSection {
    pub mode: DifferenceMode,
    pub phi: Option<MapConfig>,
    pub psi: Option<MapConfig>,
    pub gamma: Option<f64>,
    pub t0: Vec<f64>,
    pub t_list: Vec<f64>,
    pub a_levels: usize,
    pub a_angles: usize,
}

impl Default for DifferenceSection {
    fn default() -> Self {
        DifferenceSection {
            mode: DifferenceMode::Functional,
            phi: None,
            psi: None,
            gamma: None,
            t0: vec![1.0],
            t_list: vec![1.0],
            a_levels: 12,
            a_angles: 32,
        }
    }
}

/// `h` by builtin name or by coefficients.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum KoenigsConfig {
    Named(String),
    Series(SeriesJson),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResolventMode {
    /// `σ(R_h)`
    Spectrum,
    /// one of `R_h, P_h, Q_h, L_h, J, M_z` applied to `f`
    Apply,
    /// `R(λ, Γ) f` for the configured semigroup
    Resolvent,
    /// little-Bloch test of `log(h/z)`, plus the boundary test when a
    /// semigroup is configured
    Bloch,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OperatorName {
    #[serde(rename = "R_h")]
    RH,
    #[serde(rename = "P_h")]
    PH,
    #[serde(rename = "Q_h")]
    QH,
    #[serde(rename = "L_h")]
    LH,
    J,
    #[serde(rename = "M_z")]
    MZ,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResolventSection {
    pub mode: ResolventMode,
    /// defaults to the configured semigroup's Koenigs function, else `z`
    pub h: Option<KoenigsConfig>,
    /// `μ = -G'(0)` used for the spiral geometry of `h`
    pub mu: [f64; 2],
    pub operator: OperatorName,
    pub f: Option<SeriesJson>,
    pub lambda: [f64; 2],
    pub k_max: usize,
    pub section_dim: usize,
    pub opening: Option<f64>,
    pub boundary_points: usize,
    pub boundary_levels: usize,
}

impl Default for ResolventSection {
    fn default() -> Self {
        ResolventSection {
            mode: ResolventMode::Spectrum,
            h: None,
            mu: [1.0, 0.0],
            operator: OperatorName::RH,
            f: None,
            lambda: [1.0, 0.0],
            k_max: 32,
            section_dim: 32,
            opening: None,
            boundary_points: 16,
            boundary_levels: 12,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrajectorySection {
    pub z0: Vec<[f64; 2]>,
    pub t_max: f64,
    pub steps: usize,
    pub residual_times: Vec<f64>,
    pub residual_radius: f64,
}

impl Default for TrajectorySection {
    fn default() -> Self {
        TrajectorySection {
            z0: vec![[0.5, 0.0], [0.0, 0.7], [-0.6, -0.3], [0.85, 0.4]],
            t_max: 5.0,
            steps: 50,
            residual_times: vec![0.1, 0.7],
            residual_radius: 0.9,
        }
    }
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("every field has a default")
    }
}

impl ExperimentConfig {
    pub fn from_json_str(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("config does not parse: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    /// Rejects values that cannot reach the numerics meaningfully.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.p >= 1.0) || !self.p.is_finite() {
            return bad(format!("p must be a finite number >= 1, got {}", self.p));
        }
        if let Some(n) = self.truncation {
            if n < 8 {
                return bad(format!("truncation must be at least 8, got {n}"));
            }
        }
        if let Some(t) = self.tol {
            if !(t > 0.0 && t < 1.0) {
                return bad(format!("tol must lie in (0, 1), got {t}"));
            }
        }
        if self.weights.levels < 6 || self.weights.levels > 60 {
            return bad(format!(
                "weights.levels must lie in 6..=60, got {}",
                self.weights.levels
            ));
        }
        let sp = &self.spectrum;
        if !(sp.t > 0.0) || !sp.t.is_finite() {
            return bad(format!("spectrum.t must be positive, got {}", sp.t));
        }
        if let Some(eta) = sp.opening {
            if !(0.0..=std::f64::consts::TAU).contains(&eta) {
                return bad(format!("spectrum.opening must lie in [0, 2π], got {eta}"));
            }
        }
        let r = &sp.radius;
        if r.n_max == 0 || r.j_min == 0 || r.j_max < r.j_min + 2 || r.j_max > 40 || r.angles == 0 {
            return bad("spectrum.radius needs n_max >= 1, 1 <= j_min, j_min + 2 <= j_max <= 40, angles >= 1".into());
        }
        let d = &self.difference;
        if d.t0.iter().chain(&d.t_list).any(|t| !(*t > 0.0)) {
            return bad("difference times must be positive".into());
        }
        if d.a_levels == 0 || d.a_angles == 0 {
            return bad("difference a-grid must be non-empty".into());
        }
        if let Some(g) = d.gamma {
            if !(g > 0.0) {
                return bad(format!("gamma must be positive, got {g}"));
            }
        }
        let rs = &self.resolvent;
        if rs.section_dim > 512 || rs.k_max > 4096 {
            return bad("resolvent.section_dim <= 512 and k_max <= 4096".into());
        }
        let tr = &self.trajectory;
        if tr.steps == 0
            || !(tr.t_max > 0.0)
            || !(tr.residual_radius > 0.0 && tr.residual_radius < 1.0)
        {
            return bad(
                "trajectory needs steps >= 1, t_max > 0 and residual_radius in (0, 1)".into(),
            );
        }
        if tr.z0.iter().any(|z| !(c(*z).norm() < 1.0)) {
            return bad("trajectory starting points must lie in the open disk".into());
        }
        if let Some(w) = &self.weight {
            RadialWeight::from_spec(w).map_err(|e| Error::Config(format!("weight: {e}")))?;
        }
        Ok(())
    }

    pub fn truncation(&self) -> usize {
        self.truncation.unwrap_or(DEFAULT_TRUNCATION)
    }

    pub fn weight(&self) -> Result<RadialWeight> {
        match &self.weight {
            Some(w) => RadialWeight::from_spec(w),
            None => RadialWeight::standard(0.0),
        }
    }

    pub fn semigroup(&self) -> Result<SemigroupSpec> {
        match &self.semigroup {
            Some(s) => SemigroupSpec::from_json(s, self.truncation()).map_err(|e| match e {
                Error::Config(m) => Error::Config(m),
                other => Error::Config(format!("semigroup: {other}")),
            }),
            None => Err(Error::Config("this command needs a semigroup".into())),
        }
    }

    pub fn map(&self, m: &MapConfig) -> Result<SelfMap> {
        match m {
            MapConfig::Linear { c: v } => {
                if !(c(*v).norm() <= 1.0) {
                    return Err(Error::Config(
                        "linear map coefficient must have modulus <= 1".into(),
                    ));
                }
                Ok(SelfMap::linear(c(*v)))
            }
            MapConfig::Series { series } => Ok(SelfMap::from_series(
                "series",
                AnalyticSeries::from_json(series)?,
            )),
            MapConfig::Semigroup { t } => {
                if !(*t >= 0.0) {
                    return Err(Error::Config("semigroup time must be nonnegative".into()));
                }
                Ok(self.semigroup()?.phi_map(*t))
            }
        }
    }

    /// The resolvent section's `h`.
    pub fn koenigs(&self) -> Result<AnalyticSeries> {
        let n = self.truncation();
        match &self.resolvent.h {
            Some(KoenigsConfig::Named(name)) => named_koenigs(name, n),
            Some(KoenigsConfig::Series(s)) => AnalyticSeries::from_json(s),
            None => match &self.semigroup {
                Some(_) => Ok(self
                    .semigroup()?
                    .conjugated_to_origin()
                    .h_series()
                    .truncate(n)),
                None => named_koenigs("z", n),
            },
        }
    }

    /// Spiral geometry for membership tests: exact when an opening is given.
    pub fn geometry_for(
        &self,
        mu: Complex64,
        opening: Option<f64>,
        theta0: f64,
    ) -> Result<Option<SpiralGeometry>> {
        match opening {
            Some(eta) => Ok(Some(SpiralGeometry::exact(mu, eta, theta0)?)),
            None => Ok(None),
        }
    }
}

/// Builtin Koenigs functions by name.
pub fn named_koenigs(name: &str, n: usize) -> Result<AnalyticSeries> {
    let zero = Complex64::new(0.0, 0.0);
    let one = Complex64::new(1.0, 0.0);
    Ok(match name {
        "z" => AnalyticSeries::polynomial(vec![zero, one]),
        "log(1/(1-z))" | "log_one_over_one_minus" => builtin::log_one_over_one_minus(n),
        "log((1+z)/(1-z))" | "log_ratio" => builtin::log_ratio(n),
        "z/(1-z)" | "z_over_one_minus" => builtin::z_over_one_minus(n),
        "koebe" => builtin::koebe(n),
        other => return Err(Error::Config(format!("unknown Koenigs function '{other}'"))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_is_valid() {
        let cfg = ExperimentConfig::from_json_str("{}").unwrap();
        assert_eq!(cfg.p, 2.0);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(matches!(
            ExperimentConfig::from_json_str(r#"{"p": 0.5}"#),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            ExperimentConfig::from_json_str(r#"{"bogus": 1}"#),
            Err(Error::Config(_))
        ));
        assert!(matches!(
            ExperimentConfig::from_json_str(r#"{"weight": {"kind": "standard", "alpha": -2}}"#),
            Err(Error::Config(_))
        ));
    }
}
