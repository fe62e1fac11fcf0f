//! Analytic self-maps of the disk as callables with an optional Taylor
//! expansion attached.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::series::AnalyticSeries;

type MapFn = dyn Fn(Complex64) -> Result<Complex64> + Send + Sync;

/// A holomorphic map `𝔻 → 𝔻`.
#[derive(Clone)]
pub struct SelfMap {
    f: Arc<MapFn>,
    series: Option<AnalyticSeries>,
    label: String,
    sup_norm: Option<f64>,
}

impl fmt::Debug for SelfMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SelfMap")
            .field("label", &self.label)
            .field("has_series", &self.series.is_some())
            .field("sup_norm", &self.sup_norm)
            .finish()
    }
}

impl SelfMap {
    pub fn new<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(Complex64) -> Result<Complex64> + Send + Sync + 'static,
    {
        SelfMap {
            f: Arc::new(f),
            series: None,
            label: label.into(),
            sup_norm: None,
        }
    }

    /// Infallible closure.
    pub fn from_fn<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        Self::new(label, move |z| Ok(f(z)))
    }

    /// Map given by its Taylor series; evaluation is Horner on the truncation.
    pub fn from_series(label: impl Into<String>, s: AnalyticSeries) -> Self {
        let eval = s.clone();
        let mut m = Self::new(label, move |z| Ok(eval.eval(z)));
        m.series = Some(s);
        m
    }

    /// `z ↦ c z`.
    pub fn linear(c: Complex64) -> Self {
        let mut m = Self::from_series(
            format!("linear({c})"),
            AnalyticSeries::polynomial(vec![Complex64::new(0.0, 0.0), c]),
        );
        m.sup_norm = Some(c.norm());
        m
    }

    pub fn identity() -> Self {
        Self::linear(Complex64::new(1.0, 0.0))
    }

    /// Records a known bound for `sup_𝔻 |φ|`.
    pub fn with_sup_norm(mut self, bound: f64) -> Self {
        self.sup_norm = Some(bound);
        self
    }

    pub fn with_series(mut self, s: AnalyticSeries) -> Self {
        self.series = Some(s);
        self
    }

    pub fn relabel(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn sup_norm_hint(&self) -> Option<f64> {
        self.sup_norm
    }

    /// `c` when the map is known to be `z ↦ c z`.
    pub fn linear_coefficient(&self) -> Option<Complex64> {
        let s = self.series.as_ref()?;
        if !s.is_polynomial() || s.coeff(0) != Complex64::new(0.0, 0.0) {
            return None;
        }
        if s.coeffs().iter().skip(2).any(|c| c.norm() != 0.0) {
            return None;
        }
        Some(s.coeff(1))
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        (self.f)(z)
    }

    /// `φ(z)` with the image required to stay in the open disk.
    pub fn eval_in_disk(&self, z: Complex64) -> Result<Complex64> {
        let w = self.eval(z)?;
        if !(w.norm() < 1.0) {
            return Err(Error::domain(format!(
                "{} sends {z} to {w}, outside the open disk",
                self.label
            )));
        }
        Ok(w)
    }

    /// `n`-fold iterate at `z`.
    pub fn iterate(&self, n: usize, z: Complex64) -> Result<Complex64> {
        (0..n).try_fold(z, |w, _| self.eval(w))
    }

    /// Taylor coefficients `φ_0..φ_{len-1}`, taken from the attached series
    /// or sampled on an interior circle.
    pub fn taylor(&self, len: usize) -> Result<AnalyticSeries> {
        if let Some(s) = &self.series {
            return Ok(s.truncate(len));
        }
        let radius = (1.0 - 4.0 / len as f64).clamp(0.5, 0.99);
        let mut failure = None;
        let s = AnalyticSeries::from_samples(
            |z| match self.eval(z) {
                Ok(w) => w,
                Err(e) => {
                    failure.get_or_insert(e);
                    Complex64::new(0.0, 0.0)
                }
            },
            len,
            radius,
        );
        match failure {
            Some(e) => Err(e),
            None => Ok(s),
        }
    }

    /// `φ'(z)` by a Cauchy integral on a small circle.
    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        let rho = (0.5 * (1.0 - z.norm())).min(0.1);
        let m = 16;
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..m {
            let e = Complex64::from_polar(1.0, std::f64::consts::TAU * j as f64 / m as f64);
            acc += self.eval(z + rho * e)? / e;
        }
        Ok(acc / (m as f64 * rho))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sampled_taylor_matches_closed_series() {
        let phi = SelfMap::from_fn("z/(2-z)", |z| z / (Complex64::new(2.0, 0.0) - z));
        let s = phi.taylor(24).unwrap();
        for n in 1..24 {
            assert!((s.coeff(n).re - 0.5f64.powi(n as i32)).abs() < 1e-13);
        }
    }

    #[test]
    fn cauchy_derivative() {
        let phi = SelfMap::from_fn("z^2/2", |z| z * z * 0.5);
        let z = Complex64::new(0.3, -0.2);
        assert!((phi.derivative(z).unwrap() - z).norm() < 1e-14);
    }
}
