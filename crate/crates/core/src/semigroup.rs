//! Elliptic semigroups of holomorphic self-maps described by their Koenigs
//! data `(h, b, G'(b))`, with evaluation of `φ_t`, the generator `G`, and the
//! spiral geometry of `h(𝔻)`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::mobius;
use crate::maps::SelfMap;
use crate::series::{builtin, AnalyticSeries, SeriesJson, DEFAULT_TRUNCATION};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Koenigs functions with an exact formula.
#[derive(Debug, Clone, PartialEq)]
pub enum ClosedKoenigs {
    Identity,
    /// `log(1/(1 - z))`
    LogOneOverOneMinus,
    /// `log((1 + z)/(1 - z))`
    LogRatio,
    /// `z/(1 - z)^2`
    Koebe,
    /// `h ∘ τ_b` with `τ_b` the involution swapping `b` and `0`.
    Conjugated {
        inner: Box<ClosedKoenigs>,
        b: Complex64,
    },
}

impl ClosedKoenigs {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            ClosedKoenigs::Identity => z,
            ClosedKoenigs::LogOneOverOneMinus => -(ONE - z).ln(),
            ClosedKoenigs::LogRatio => ((ONE + z) / (ONE - z)).ln(),
            ClosedKoenigs::Koebe => z / ((ONE - z) * (ONE - z)),
            ClosedKoenigs::Conjugated { inner, b } => inner.eval(mobius(*b, z)),
        }
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        match self {
            ClosedKoenigs::Identity => ONE,
            ClosedKoenigs::LogOneOverOneMinus => ONE / (ONE - z),
            ClosedKoenigs::LogRatio => 2.0 / ((ONE + z) * (ONE - z)),
            ClosedKoenigs::Koebe => (ONE + z) / ((ONE - z) * (ONE - z) * (ONE - z)),
            ClosedKoenigs::Conjugated { inner, b } => {
                let d = ONE - b.conj() * z;
                let tau_prime = (b.norm_sqr() - 1.0) / (d * d);
                inner.derivative(mobius(*b, z)) * tau_prime
            }
        }
    }

    fn series(&self, n: usize) -> AnalyticSeries {
        match self {
            ClosedKoenigs::Identity => AnalyticSeries::polynomial(vec![ZERO, ONE]),
            ClosedKoenigs::LogOneOverOneMinus => builtin::log_one_over_one_minus(n),
            ClosedKoenigs::LogRatio => builtin::log_ratio(n),
            ClosedKoenigs::Koebe => builtin::koebe(n),
            ClosedKoenigs::Conjugated { .. } => {
                AnalyticSeries::from_samples(|z| self.eval(z), n, sample_radius(n))
            }
        }
    }
}

fn sample_radius(n: usize) -> f64 {
    (1.0 - 4.0 / n as f64).clamp(0.5, 0.99)
}

/// A Koenigs function: Taylor series plus an optional exact formula, which
/// takes precedence for pointwise evaluation.
#[derive(Debug, Clone)]
pub struct KoenigsFunction {
    pub series: AnalyticSeries,
    pub closed: Option<ClosedKoenigs>,
}

impl KoenigsFunction {
    pub fn from_series(series: AnalyticSeries) -> Self {
        KoenigsFunction {
            series,
            closed: None,
        }
    }

    pub fn closed(closed: ClosedKoenigs, n: usize) -> Self {
        KoenigsFunction {
            series: closed.series(n),
            closed: Some(closed),
        }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        match &self.closed {
            Some(c) => c.eval(z),
            None => self.series.eval(z),
        }
    }

    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        match &self.closed {
            Some(c) => (c.eval(z), c.derivative(z)),
            None => self.series.eval_with_derivative(z),
        }
    }
}

/// Named semigroups with explicit `φ_t`.
#[derive(Debug, Clone, PartialEq)]
pub enum ClosedForm {
    /// `e^{iat} z`
    Rotation(f64),
    /// `e^{-st} z`
    Dilation(f64),
    /// `1 - (1 - z)^{e^{-t}}`
    Example2,
    /// `((1+z)^{e^{-t}} - (1-z)^{e^{-t}}) / ((1+z)^{e^{-t}} + (1-z)^{e^{-t}})`
    Example3,
    /// inverse Koebe function applied to `e^{-t} k(z)`
    Koebe,
    /// `τ_b ∘ φ_t ∘ τ_b`
    Conjugated {
        inner: Box<ClosedForm>,
        b: Complex64,
    },
}

impl ClosedForm {
    pub fn parse(name: &str) -> Result<Self> {
        let name = name.trim();
        let arg = |prefix: &str| -> Option<Result<f64>> {
            let rest = name.strip_prefix(prefix)?.strip_suffix(')')?;
            Some(
                rest.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("bad numeric argument in '{name}'"))),
            )
        };
        if let Some(a) = arg("rotation(") {
            return Ok(ClosedForm::Rotation(a?));
        }
        if let Some(s) = arg("dilation(") {
            let s = s?;
            if !(s > 0.0) {
                return Err(Error::Config(format!(
                    "dilation rate must be positive, got {s}"
                )));
            }
            return Ok(ClosedForm::Dilation(s));
        }
        match name {
            "example2" => Ok(ClosedForm::Example2),
            "example3" => Ok(ClosedForm::Example3),
            "koebe" => Ok(ClosedForm::Koebe),
            other => Err(Error::Config(format!(
                "unknown closed-form semigroup '{other}'"
            ))),
        }
    }

    pub fn name(&self) -> String {
        match self {
            ClosedForm::Rotation(a) => format!("rotation({a})"),
            ClosedForm::Dilation(s) => format!("dilation({s})"),
            ClosedForm::Example2 => "example2".into(),
            ClosedForm::Example3 => "example3".into(),
            ClosedForm::Koebe => "koebe".into(),
            ClosedForm::Conjugated { inner, b } => format!("conjugated({}, {b})", inner.name()),
        }
    }

    pub fn koenigs(&self) -> ClosedKoenigs {
        match self {
            ClosedForm::Rotation(_) | ClosedForm::Dilation(_) => ClosedKoenigs::Identity,
            ClosedForm::Example2 => ClosedKoenigs::LogOneOverOneMinus,
            ClosedForm::Example3 => ClosedKoenigs::LogRatio,
            ClosedForm::Koebe => ClosedKoenigs::Koebe,
            ClosedForm::Conjugated { inner, b } => ClosedKoenigs::Conjugated {
                inner: Box::new(inner.koenigs()),
                b: *b,
            },
        }
    }

    pub fn multiplier(&self) -> Complex64 {
        match self {
            ClosedForm::Rotation(a) => Complex64::new(0.0, *a),
            ClosedForm::Dilation(s) => Complex64::new(-s, 0.0),
            ClosedForm::Example2 | ClosedForm::Example3 | ClosedForm::Koebe => -ONE,
            ClosedForm::Conjugated { inner, .. } => inner.multiplier(),
        }
    }

    pub fn eval(&self, t: f64, z: Complex64) -> Complex64 {
        match self {
            ClosedForm::Rotation(a) => Complex64::from_polar(1.0, a * t) * z,
            ClosedForm::Dilation(s) => (-s * t).exp() * z,
            ClosedForm::Example2 => ONE - (ONE - z).powf((-t).exp()),
            ClosedForm::Example3 => {
                let e = (-t).exp();
                let p = (ONE + z).powf(e);
                let m = (ONE - z).powf(e);
                (p - m) / (p + m)
            }
            ClosedForm::Koebe => {
                let w = (-t).exp() * ClosedKoenigs::Koebe.eval(z);
                inverse_koebe(w)
            }
            ClosedForm::Conjugated { inner, b } => mobius(*b, inner.eval(t, mobius(*b, z))),
        }
    }

    /// Known `sup_𝔻 |φ_t|` when the family is linear.
    pub fn sup_norm(&self, t: f64) -> Option<f64> {
        match self {
            ClosedForm::Rotation(_) => Some(1.0),
            ClosedForm::Dilation(s) => Some((-s * t).exp()),
            _ => None,
        }
    }
}

/// Solves `w/(1-w)^2 = W` on the branch with `w(0) = 0`.
fn inverse_koebe(w: Complex64) -> Complex64 {
    if w.norm() < 1e-8 {
        // series w - 2w^2 + 5w^3 - 14w^4 avoids cancellation
        return w * (ONE + w * (-2.0 + w * (5.0 - 14.0 * w)));
    }
    let root = (4.0 * w + 1.0).sqrt();
    (2.0 * w + 1.0 - root) / (2.0 * w)
}

/// Koenigs data of an elliptic semigroup.
#[derive(Debug, Clone)]
pub struct SemigroupSpec {
    koenigs: KoenigsFunction,
    b: Complex64,
    gprime_b: Complex64,
    closed_form: Option<ClosedForm>,
    automorphism: bool,
}

/// JSON form of a semigroup.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct SemigroupJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub koenigs: Option<SeriesJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gprime_b: Option<[f64; 2]>,
    #[serde(default)]
    pub closed_form: Option<String>,
}

/// Residuals reported by [`SemigroupSpec::fixed_point_check`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FixedPointResiduals {
    pub b_residual: f64,
    pub multiplier_residual: f64,
}

/// Step control for the Newton path continuation.
#[derive(Debug, Clone, Copy)]
pub struct NewtonParams {
    pub tol: f64,
    pub max_iterations: usize,
    pub min_step: f64,
}

impl Default for NewtonParams {
    fn default() -> Self {
        NewtonParams {
            tol: 1e-12,
            max_iterations: 40,
            min_step: 1e-10,
        }
    }
}

impl SemigroupSpec {
    /// Builds and validates a spec. When a closed form is present, the Koenigs
    /// relation is checked on a grid with `|z| <= 0.9`.
    pub fn new(
        koenigs: KoenigsFunction,
        b: Complex64,
        gprime_b: Complex64,
        closed_form: Option<ClosedForm>,
    ) -> Result<Self> {
        let spec = Self::new_unchecked(koenigs, b, gprime_b, closed_form);
        spec.validate()?;
        Ok(spec)
    }

    /// Skips validation; used for deliberately inconsistent test specs.
    pub fn new_unchecked(
        koenigs: KoenigsFunction,
        b: Complex64,
        gprime_b: Complex64,
        closed_form: Option<ClosedForm>,
    ) -> Self {
        let automorphism = gprime_b.re.abs() <= 1e-14 * gprime_b.norm().max(1.0);
        SemigroupSpec {
            koenigs,
            b,
            gprime_b,
            closed_form,
            automorphism,
        }
    }

    /// Built-in semigroup by name with default truncation.
    pub fn builtin(name: &str) -> Result<Self> {
        Self::builtin_with_truncation(name, DEFAULT_TRUNCATION)
    }

    pub fn builtin_with_truncation(name: &str, n: usize) -> Result<Self> {
        let cf = ClosedForm::parse(name)?;
        let h = KoenigsFunction::closed(cf.koenigs(), n);
        let g = cf.multiplier();
        Self::new(h, ZERO, g, Some(cf))
    }

    pub fn rotation(a: f64) -> Self {
        Self::builtin(&format!("rotation({a})")).expect("rotation is always valid")
    }

    pub fn dilation(s: f64) -> Result<Self> {
        Self::builtin(&format!("dilation({s})"))
    }

    /// Semigroup known only through its time-one map `φ` with `φ(0) = 0` and
    /// `φ'(0) = λ`; `h` is reconstructed by Koenigs iteration sampled on a
    /// circle and `G'(0) = log λ`.
    pub fn from_time_one_map(phi: &SelfMap, lambda: Complex64, n: usize) -> Result<Self> {
        let radius = sample_radius(n);
        let mut failure = None;
        let series = AnalyticSeries::from_samples(
            |z| match koenigs_estimate(phi, lambda, z) {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    ZERO
                }
            },
            n,
            radius,
        );
        if let Some(e) = failure {
            return Err(e);
        }
        Ok(Self::new_unchecked(
            KoenigsFunction::from_series(series),
            ZERO,
            lambda.ln(),
            None,
        ))
    }

    pub fn from_json(json: &SemigroupJson, truncation: usize) -> Result<Self> {
        let b = json.b.map(|v| Complex64::new(v[0], v[1])).unwrap_or(ZERO);
        if !(b.norm() < 1.0) {
            return Err(Error::Config(format!(
                "Denjoy-Wolff point {b} is not interior; only elliptic semigroups are supported"
            )));
        }
        let given_g = json.gprime_b.map(|v| Complex64::new(v[0], v[1]));
        let cf = json
            .closed_form
            .as_deref()
            .map(ClosedForm::parse)
            .transpose()?;
        let koenigs = match (&json.koenigs, &cf) {
            (Some(s), _) => KoenigsFunction::from_series(AnalyticSeries::from_json(s)?),
            (None, Some(cf)) => {
                if b != ZERO {
                    return Err(Error::Config("named closed forms fix b = 0".into()));
                }
                KoenigsFunction::closed(cf.koenigs(), truncation)
            }
            (None, None) => {
                return Err(Error::Config(
                    "semigroup needs koenigs coefficients or a closed_form".into(),
                ))
            }
        };
        let g = match (given_g, &cf) {
            (Some(g), _) => g,
            (None, Some(cf)) => cf.multiplier(),
            (None, None) => return Err(Error::Config("semigroup needs gprime_b".into())),
        };
        if g.re > 1e-14 {
            return Err(Error::Config(format!("G'(b) = {g} has positive real part")));
        }
        if g == ZERO {
            return Err(Error::Config(
                "G'(b) = 0 gives the trivial semigroup".into(),
            ));
        }
        Self::new(koenigs, b, g, cf)
    }

    pub fn to_json(&self) -> SemigroupJson {
        let named = self
            .closed_form
            .as_ref()
            .filter(|cf| !matches!(cf, ClosedForm::Conjugated { .. }));
        SemigroupJson {
            koenigs: if named.is_some() {
                None
            } else {
                Some(self.koenigs.series.to_json())
            },
            b: Some([self.b.re, self.b.im]),
            gprime_b: Some([self.gprime_b.re, self.gprime_b.im]),
            closed_form: named.map(|c| c.name()),
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.b.norm() < 1.0) {
            return Err(Error::domain("Denjoy-Wolff point must be interior"));
        }
        let hb = self.koenigs.eval(self.b);
        if hb.norm() > 1e-10 {
            return Err(Error::domain(format!("h(b) = {hb} does not vanish")));
        }
        let (_, dh) = self.koenigs.eval_with_derivative(self.b);
        if dh.norm() < 1e-12 {
            return Err(Error::domain("h'(b) vanishes; h is not univalent"));
        }
        if let Some(cf) = &self.closed_form {
            let worst = self.koenigs_residual_closed(cf, &[0.1, 1.0]);
            if !(worst < 1e-8) {
                return Err(Error::domain(format!(
                    "closed form {} violates the Koenigs relation (residual {worst:e})",
                    cf.name()
                )));
            }
        }
        Ok(())
    }

    fn koenigs_residual_closed(&self, cf: &ClosedForm, times: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for &t in times {
            for z in test_grid(0.9) {
                let w = cf.eval(t, z);
                let hz = self.koenigs.eval(z);
                let r = (self.koenigs.eval(w) - (self.gprime_b * t).exp() * hz).norm()
                    / (1.0 + hz.norm());
                worst = worst.max(r);
            }
        }
        worst
    }

    pub fn koenigs(&self) -> &KoenigsFunction {
        &self.koenigs
    }

    pub fn h_series(&self) -> &AnalyticSeries {
        &self.koenigs.series
    }

    pub fn b(&self) -> Complex64 {
        self.b
    }

    pub fn gprime_b(&self) -> Complex64 {
        self.gprime_b
    }

    /// `μ = -G'(b)`.
    pub fn mu(&self) -> Complex64 {
        -self.gprime_b
    }

    pub fn closed_form(&self) -> Option<&ClosedForm> {
        self.closed_form.as_ref()
    }

    pub fn is_automorphism_group(&self) -> bool {
        self.automorphism
    }

    pub fn label(&self) -> String {
        match &self.closed_form {
            Some(cf) => cf.name(),
            None => "series".into(),
        }
    }

    /// Equivalent spec with Denjoy–Wolff point moved to 0 by `τ_b`.
    pub fn conjugated_to_origin(&self) -> Self {
        if self.b == ZERO {
            return self.clone();
        }
        let b = self.b;
        let n = self.koenigs.series.len().max(16);
        let closed = self
            .koenigs
            .closed
            .as_ref()
            .map(|c| ClosedKoenigs::Conjugated {
                inner: Box::new(c.clone()),
                b,
            });
        let series = match &closed {
            Some(c) => c.series(n),
            None => {
                let h = self.koenigs.series.clone();
                AnalyticSeries::from_samples(|z| h.eval(mobius(b, z)), n, sample_radius(n))
            }
        };
        let cf = self.closed_form.as_ref().map(|c| ClosedForm::Conjugated {
            inner: Box::new(c.clone()),
            b,
        });
        Self::new_unchecked(KoenigsFunction { series, closed }, ZERO, self.gprime_b, cf)
    }

    /// `φ_t(z)`: the closed form when available, Newton inversion otherwise.
    pub fn evaluate_phi(&self, t: f64, z: Complex64) -> Result<Complex64> {
        check_args(t, z)?;
        match &self.closed_form {
            Some(cf) => Ok(cf.eval(t, z)),
            None => self.evaluate_phi_newton(t, z, NewtonParams::default()),
        }
    }

    /// `φ_t(z)` by damped Newton on `h(w) = e^{G'(b)s} h(z)`, following `s`
    /// from 0 to `t`.
    pub fn evaluate_phi_newton(
        &self,
        t: f64,
        z: Complex64,
        params: NewtonParams,
    ) -> Result<Complex64> {
        check_args(t, z)?;
        if t == 0.0 {
            return Ok(z);
        }
        let hz = self.koenigs.eval(z);
        let tol = params.tol * (1.0 + hz.norm());
        let mut w = z;
        let mut s = 0.0;
        let mut ds = t.min(0.25);
        let mut fast = 0;
        while s < t {
            let s_new = if s + ds >= t { t } else { s + ds };
            let target = (self.gprime_b * s_new).exp() * hz;
            match self.newton(w, target, tol, params.max_iterations) {
                Some((w_new, iters)) => {
                    w = w_new;
                    s = s_new;
                    if iters <= 4 {
                        fast += 1;
                        if fast == 3 {
                            ds *= 2.0;
                            fast = 0;
                        }
                    } else {
                        fast = 0;
                    }
                }
                None => {
                    ds *= 0.5;
                    fast = 0;
                    if ds < params.min_step * t.max(1.0) {
                        return Err(Error::NewtonDivergence {
                            last: w,
                            path_position: s,
                        });
                    }
                }
            }
        }
        Ok(w)
    }

    fn newton(
        &self,
        start: Complex64,
        target: Complex64,
        tol: f64,
        max_iter: usize,
    ) -> Option<(Complex64, usize)> {
        let mut w = start;
        let (mut hw, mut dh) = self.koenigs.eval_with_derivative(w);
        let mut res = (hw - target).norm();
        for it in 0..=max_iter {
            if res < tol {
                return Some((w, it));
            }
            if dh.norm() == 0.0 || !dh.is_finite() {
                return None;
            }
            let step = (hw - target) / dh;
            let mut lambda = 1.0;
            let mut accepted = false;
            for _ in 0..12 {
                let cand = w - step * lambda;
                if cand.norm() < 1.0 {
                    let (hc, dc) = self.koenigs.eval_with_derivative(cand);
                    let rc = (hc - target).norm();
                    if rc.is_finite() && rc < res {
                        w = cand;
                        hw = hc;
                        dh = dc;
                        res = rc;
                        accepted = true;
                        break;
                    }
                }
                lambda *= 0.5;
            }
            if !accepted {
                return if res < tol { Some((w, it)) } else { None };
            }
        }
        None
    }

    /// `G(z) = G'(b) h(z)/h'(z)`.
    pub fn generator_eval(&self, z: Complex64) -> Result<Complex64> {
        if !(z.norm() < 1.0) {
            return Err(Error::domain(format!(
                "generator evaluated outside the disk at {z}"
            )));
        }
        let (h, dh) = self.koenigs.eval_with_derivative(z);
        if dh.norm() < 1e-14 * (1.0 + h.norm()) {
            return Err(Error::Precision(format!(
                "h'({z}) = {dh} vanishes numerically; raise the truncation order"
            )));
        }
        Ok(self.gprime_b * h / dh)
    }

    /// Sup-grid residuals of `φ_{t+s} = φ_t ∘ φ_s` and of the Koenigs
    /// relation over `|z| <= r_max`, for all pairs from `times`.
    pub fn law_residuals(&self, times: &[f64], r_max: f64, path: PhiPath) -> Result<LawResiduals> {
        let eval = |t: f64, z: Complex64| match path {
            PhiPath::Default => self.evaluate_phi(t, z),
            PhiPath::Newton => self.evaluate_phi_newton(t, z, NewtonParams::default()),
        };
        let grid = test_grid(r_max);
        let mut law: f64 = 0.0;
        let mut koenigs: f64 = 0.0;
        for &t in times {
            let factor = (self.gprime_b * t).exp();
            for &z in &grid {
                let w = eval(t, z)?;
                let r = (self.koenigs.eval(w) - factor * self.koenigs.eval(z)).norm();
                koenigs = koenigs.max(r);
                for &s in times {
                    let lhs = eval(t + s, z)?;
                    let rhs = eval(t, eval(s, z)?)?;
                    law = law.max((lhs - rhs).norm());
                }
            }
        }
        Ok(LawResiduals {
            law,
            koenigs,
            r_max,
            times: times.to_vec(),
            path,
        })
    }

    /// `(φ_Δt(z) - z)/Δt`, the finite-difference generator.
    pub fn generator_finite_difference(&self, z: Complex64, dt: f64) -> Result<Complex64> {
        Ok((self.evaluate_phi(dt, z)? - z) / dt)
    }

    /// Residuals of `φ_t(b) = b` and `φ_t'(b) = e^{G'(b)t}` for `t ∈ {0.1, 1, 5}`.
    pub fn fixed_point_check(&self) -> FixedPointResiduals {
        let rho = (0.5 * (1.0 - self.b.norm())).min(0.1);
        let m = 16;
        let mut out = FixedPointResiduals {
            b_residual: 0.0,
            multiplier_residual: 0.0,
        };
        for &t in &[0.1, 1.0, 5.0] {
            let fb = self
                .evaluate_phi(t, self.b)
                .unwrap_or(Complex64::new(f64::NAN, f64::NAN));
            out.b_residual = nan_max(out.b_residual, (fb - self.b).norm());
            let mut acc = ZERO;
            for j in 0..m {
                let e = Complex64::from_polar(1.0, TAU * j as f64 / m as f64);
                let v = self
                    .evaluate_phi(t, self.b + rho * e)
                    .unwrap_or(Complex64::new(f64::NAN, f64::NAN));
                acc += v / e;
            }
            let d = acc / (m as f64 * rho);
            out.multiplier_residual = nan_max(
                out.multiplier_residual,
                (d - (self.gprime_b * t).exp()).norm(),
            );
        }
        out
    }

    /// `φ_t` as a self-map.
    pub fn phi_map(&self, t: f64) -> SelfMap {
        let label = format!("{}_t={t}", self.label());
        match &self.closed_form {
            Some(ClosedForm::Rotation(a)) => {
                return SelfMap::linear(Complex64::from_polar(1.0, a * t)).relabel(label)
            }
            Some(ClosedForm::Dilation(s)) => {
                return SelfMap::linear(Complex64::new((-s * t).exp(), 0.0)).relabel(label)
            }
            _ => {}
        }
        let spec = self.clone();
        let mut m = SelfMap::new(label, move |z| spec.evaluate_phi(t, z));
        if let Some(bound) = self.closed_form.as_ref().and_then(|c| c.sup_norm(t)) {
            m = m.with_sup_norm(bound);
        }
        m
    }
}

fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

fn check_args(t: f64, z: Complex64) -> Result<()> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::domain(format!(
            "semigroup time must be finite and nonnegative, got {t}"
        )));
    }
    if !(z.norm() < 1.0) {
        return Err(Error::domain(format!("{z} is not in the open unit disk")));
    }
    Ok(())
}

/// Which evaluation of `φ_t` a residual check exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PhiPath {
    /// closed form when known
    Default,
    /// Newton continuation on the Koenigs equation
    Newton,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LawResiduals {
    pub law: f64,
    /// `sup |h(φ_t(z)) - e^{G'(b)t} h(z)|`
    pub koenigs: f64,
    pub r_max: f64,
    pub times: Vec<f64>,
    pub path: PhiPath,
}

/// Polar grid with radii up to `r_max`, used for residual checks.
pub fn test_grid(r_max: f64) -> Vec<Complex64> {
    let mut pts = vec![ZERO];
    for i in 1..=6 {
        let r = r_max * i as f64 / 6.0;
        for j in 0..16 {
            pts.push(Complex64::from_polar(r, TAU * (j as f64 + 0.5) / 16.0));
        }
    }
    pts
}

/// `lim φ_n(z)/λ^n` for a map fixing 0 with multiplier `λ`, `0 < |λ| < 1`.
pub fn koenigs_estimate(phi: &SelfMap, lambda: Complex64, z: Complex64) -> Result<Complex64> {
    let m = lambda.norm();
    if !(m > 0.0 && m < 1.0) {
        return Err(Error::domain(format!(
            "Koenigs iteration needs 0 < |λ| < 1, got |λ| = {m}"
        )));
    }
    let mut w = z;
    let mut scale = ONE;
    let mut prev = z;
    for _ in 0..200 {
        w = phi.eval(w)?;
        scale *= lambda;
        let v = w / scale;
        if (v - prev).norm() < 1e-12 * prev.norm().max(1.0) {
            return Ok(v);
        }
        prev = v;
        if w == ZERO {
            return Ok(v);
        }
    }
    Err(Error::NonConvergence {
        last: w / scale,
        previous: prev,
    })
}

/// `χ(w) = arg w - ln|w| tan(arg μ)` reduced to `[0, 2π)`; constant on the
/// spirals `{e^{iθ} e^{-tμ}}`.
pub fn spiral_angle(w: Complex64, mu: Complex64) -> Result<f64> {
    if w == ZERO {
        return Err(Error::domain("spiral angle of 0 is undefined"));
    }
    if !(mu.re > 0.0) {
        return Err(Error::domain(format!(
            "spiral angle needs Re μ > 0, got μ = {mu}"
        )));
    }
    Ok((w.arg() - w.norm().ln() * mu.arg().tan()).rem_euclid(TAU))
}

/// How an opening value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "status")]
pub enum OpeningStatus {
    ExactUserSupplied,
    Estimated { band: [f64; 2] },
}

/// Maximal angular opening of `h(𝔻)` with respect to the `μ`-spirals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpiralGeometry {
    pub mu: Complex64,
    pub eta: f64,
    pub status: OpeningStatus,
    pub theta0: f64,
}

impl SpiralGeometry {
    pub fn exact(mu: Complex64, eta: f64, theta0: f64) -> Result<Self> {
        if !(0.0..=TAU).contains(&eta) {
            return Err(Error::domain(format!(
                "opening must lie in [0, 2π], got {eta}"
            )));
        }
        Ok(SpiralGeometry {
            mu,
            eta,
            status: OpeningStatus::ExactUserSupplied,
            theta0,
        })
    }

    /// `α = arg μ`.
    pub fn alpha(&self) -> f64 {
        self.mu.arg()
    }
}

/// Sampling parameters for [`maximal_opening`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct OpeningParams {
    pub boundary_samples: usize,
    pub spiral_t_range: [f64; 2],
    pub tol: f64,
    pub epsilon: f64,
    pub angles: usize,
    pub spiral_step: f64,
}

impl Default for OpeningParams {
    fn default() -> Self {
        OpeningParams {
            boundary_samples: 4096,
            spiral_t_range: [-12.0, 12.0],
            tol: 1e-3,
            epsilon: 1e-3,
            angles: 720,
            spiral_step: 0.05,
        }
    }
}

struct Polygon {
    pts: Vec<Complex64>,
    r_in: f64,
    r_out: f64,
}

impl Polygon {
    fn new(pts: Vec<Complex64>) -> Self {
        let n = pts.len();
        let r_out = pts.iter().map(|p| p.norm()).fold(0.0, f64::max);
        let r_in = (0..n)
            .map(|i| segment_distance(ZERO, pts[i], pts[(i + 1) % n]))
            .fold(f64::INFINITY, f64::min);
        Polygon { pts, r_in, r_out }
    }

    fn contains(&self, w: Complex64) -> bool {
        let m = w.norm();
        if m < self.r_in {
            return true;
        }
        if m > self.r_out {
            return false;
        }
        let n = self.pts.len();
        let mut inside = false;
        let mut j = n - 1;
        for i in 0..n {
            let (a, b) = (self.pts[i], self.pts[j]);
            if (a.im > w.im) != (b.im > w.im) {
                let x = a.re + (w.im - a.im) * (b.re - a.re) / (b.im - a.im);
                if w.re < x {
                    inside = !inside;
                }
            }
            j = i;
        }
        inside
    }

    fn self_intersects(&self) -> bool {
        let n = self.pts.len();
        let bbox = |i: usize| {
            let (a, b) = (self.pts[i], self.pts[(i + 1) % n]);
            (
                a.re.min(b.re),
                a.re.max(b.re),
                a.im.min(b.im),
                a.im.max(b.im),
            )
        };
        let boxes: Vec<_> = (0..n).map(bbox).collect();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| boxes[i].0.total_cmp(&boxes[j].0));
        for (k, &i) in order.iter().enumerate() {
            for &j in &order[k + 1..] {
                if boxes[j].0 > boxes[i].1 {
                    break;
                }
                let adjacent = (i + 1) % n == j || (j + 1) % n == i || i == j;
                if adjacent || boxes[j].3 < boxes[i].2 || boxes[j].2 > boxes[i].3 {
                    continue;
                }
                if segments_cross(
                    self.pts[i],
                    self.pts[(i + 1) % n],
                    self.pts[j],
                    self.pts[(j + 1) % n],
                ) {
                    return true;
                }
            }
        }
        false
    }
}

/// Whether the closed polyline through `pts` crosses itself.
pub(crate) fn closed_curve_self_intersects(pts: Vec<Complex64>) -> bool {
    Polygon::new(pts).self_intersects()
}

fn cross(a: Complex64, b: Complex64) -> f64 {
    a.re * b.im - a.im * b.re
}

fn segments_cross(p1: Complex64, p2: Complex64, q1: Complex64, q2: Complex64) -> bool {
    let d1 = cross(p2 - p1, q1 - p1);
    let d2 = cross(p2 - p1, q2 - p1);
    let d3 = cross(q2 - q1, p1 - q1);
    let d4 = cross(q2 - q1, p2 - q1);
    d1 * d2 < 0.0 && d3 * d4 < 0.0
}

fn segment_distance(p: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (p - a).norm();
    }
    let t = (((p - a) * ab.conj()).re / len2).clamp(0.0, 1.0);
    (p - (a + ab * t)).norm()
}

/// Open-angle flags for one boundary offset `ε`.
fn open_angles(spec: &SemigroupSpec, params: &OpeningParams, eps: f64) -> Result<Vec<bool>> {
    let m = params.boundary_samples.max(8);
    let r = 1.0 - eps;
    let h = spec.koenigs();
    let pts: Vec<Complex64> = (0..m)
        .map(|j| h.eval(Complex64::from_polar(r, TAU * j as f64 / m as f64)))
        .collect();
    if pts.iter().any(|p| !p.is_finite()) {
        return Err(Error::Precision(
            "Koenigs function is not finite on the sampling circle".into(),
        ));
    }
    let poly = Polygon::new(pts);
    if poly.self_intersects() {
        return Err(Error::Precision(format!(
            "image of the circle |z| = {r} self-intersects; h is not univalent at this truncation"
        )));
    }
    let mu = spec.mu();
    let dt = params.spiral_step;
    let [t0, t1] = params.spiral_t_range;
    let i0 = (t0 / dt).ceil() as i64;
    let i1 = (t1 / dt).floor() as i64;
    // farthest points first: exits are usually found there
    let mut ts: Vec<f64> = (i0..=i1).map(|i| i as f64 * dt).collect();
    ts.sort_by(|a, b| (b * mu.re).abs().total_cmp(&(a * mu.re).abs()));
    let n = params.angles.max(4);
    Ok((0..n)
        .map(|k| {
            let e = Complex64::from_polar(1.0, TAU * k as f64 / n as f64);
            !ts.is_empty() && ts.iter().all(|&t| poly.contains(e * (-t * mu).exp()))
        })
        .collect())
}

/// Longest circular run of `true` and the index of its center.
fn longest_run(flags: &[bool]) -> (usize, usize) {
    let n = flags.len();
    if flags.iter().all(|&f| f) {
        return (n, 0);
    }
    let start = flags.iter().position(|&f| !f).unwrap_or(0);
    let (mut best, mut best_start, mut cur, mut cur_start) = (0, 0, 0, 0);
    for i in 1..=n {
        let k = (start + i) % n;
        if flags[k] {
            if cur == 0 {
                cur_start = k;
            }
            cur += 1;
            if cur > best {
                best = cur;
                best_start = cur_start;
            }
        } else {
            cur = 0;
        }
    }
    (best, (best_start + best / 2) % n)
}

fn opening_from_flags(flags: &[bool], tol: f64) -> (f64, f64) {
    let n = flags.len();
    let step = TAU / n as f64;
    let (run, center) = longest_run(flags);
    let eta = if run == n {
        TAU
    } else if run == 0 {
        0.0
    } else {
        ((run - 1) as f64 * step - tol).max(0.0)
    };
    (eta, center as f64 * step)
}

/// Estimates the maximal angular opening of `h(𝔻)` by testing full sampled
/// spiral lines against the polygon `h((1-ε)𝕋)`.
pub fn maximal_opening(spec: &SemigroupSpec, params: &OpeningParams) -> Result<SpiralGeometry> {
    let mu = spec.mu();
    if !(mu.re > 0.0) {
        return Err(Error::domain(format!(
            "maximal opening needs Re μ > 0, got μ = {mu}"
        )));
    }
    let coarse = open_angles(spec, params, params.epsilon)?;
    let fine = open_angles(spec, params, 0.5 * params.epsilon)?;
    let (eta, theta0) = opening_from_flags(&coarse, params.tol);
    let (eta_fine, _) = opening_from_flags(&fine, params.tol);
    Ok(SpiralGeometry {
        mu,
        eta,
        status: OpeningStatus::Estimated {
            band: [eta, eta_fine],
        },
        theta0: if eta > 0.0 { theta0 } else { 0.0 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn example2_is_koenigs_consistent() {
        let spec = SemigroupSpec::builtin("example2").unwrap();
        let z = c(0.3, 0.4);
        let w = spec.evaluate_phi(0.7, z).unwrap();
        let h = spec.koenigs();
        assert!((h.eval(w) - (-0.7f64).exp() * h.eval(z)).norm() < 1e-14);
    }

    #[test]
    fn corrupted_multiplier_rejected() {
        let h = KoenigsFunction::closed(ClosedKoenigs::LogRatio, 64);
        let r = SemigroupSpec::new(h, ZERO, c(-2.0, 0.0), Some(ClosedForm::Example3));
        assert!(r.is_err());
    }

    #[test]
    fn newton_matches_closed_koebe() {
        let spec = SemigroupSpec::builtin("koebe").unwrap();
        let z = c(-0.6, 0.5);
        let a = spec.evaluate_phi(1.3, z).unwrap();
        let b = spec
            .evaluate_phi_newton(1.3, z, NewtonParams::default())
            .unwrap();
        assert!((a - b).norm() < 1e-12);
    }

    #[test]
    fn run_detection_wraps() {
        let flags = [true, true, false, false, true, true, true];
        assert_eq!(longest_run(&flags).0, 5);
        assert_eq!(longest_run(&[false; 4]).0, 0);
    }

    #[test]
    fn conjugation_moves_fixed_point() {
        let spec = SemigroupSpec::builtin("example3").unwrap();
        let b = c(0.2, -0.1);
        let moved = spec.conjugated_to_origin();
        assert_eq!(moved.b(), ZERO);
        // construct a spec with interior point b by conjugating back
        let h = KoenigsFunction::closed(
            ClosedKoenigs::Conjugated {
                inner: Box::new(ClosedKoenigs::LogRatio),
                b,
            },
            128,
        );
        let cf = ClosedForm::Conjugated {
            inner: Box::new(ClosedForm::Example3),
            b,
        };
        let s = SemigroupSpec::new(h, b, -ONE, Some(cf)).unwrap();
        let r = s.fixed_point_check();
        assert!(
            r.b_residual < 1e-12 && r.multiplier_residual < 1e-10,
            "{r:?}"
        );
        let back = s.conjugated_to_origin();
        let z = c(0.1, 0.3);
        assert!(
            (back.evaluate_phi(0.5, z).unwrap() - spec.evaluate_phi(0.5, z).unwrap()).norm()
                < 1e-12
        );
    }
}
