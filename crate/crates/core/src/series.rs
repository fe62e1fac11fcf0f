//! Truncated Taylor series on the unit disk.
//!
//! Every operator in the crate acts on coefficient vectors. A series keeps a
//! power-law envelope `|a_n| <= C n^s` fitted on its upper half so that the
//! discarded tail can be bounded at any radius.

use std::cell::RefCell;
use std::f64::consts::TAU;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_TRUNCATION: usize = 256;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn inverse_fft(len: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(len))
}

fn forward_fft(len: usize) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(len))
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Tail {
    /// Polynomial: nothing was discarded.
    Exact,
    /// `|a_n| <= c * n^s` for every `n` at or beyond the truncation order.
    PowerLaw { c: f64, s: f64 },
}

/// Truncated power series `a_0 + a_1 z + ... + a_{N-1} z^{N-1}` with a
/// certified-by-envelope tail.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticSeries {
    coeffs: Vec<Complex64>,
    tail: Tail,
}

/// Serialized form: coefficients as `[re, im]` pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SeriesJson {
    pub coeffs: Vec<[f64; 2]>,
    #[serde(default)]
    pub polynomial: bool,
    #[serde(default, skip_deserializing)]
    pub radius_hint: Option<f64>,
    #[serde(default, skip_deserializing)]
    pub tail_bound: Option<f64>,
}

impl AnalyticSeries {
    /// Builds a series whose discarded tail follows the coefficient envelope.
    /// A trailing block of exact zeros covering the upper quarter marks a
    /// polynomial.
    pub fn new(coeffs: Vec<Complex64>) -> Self {
        let tail = fit_tail(&coeffs);
        AnalyticSeries { coeffs, tail }
    }

    /// A polynomial; evaluation is exact everywhere.
    pub fn polynomial(coeffs: Vec<Complex64>) -> Self {
        AnalyticSeries {
            coeffs,
            tail: Tail::Exact,
        }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    pub fn zero(len: usize) -> Self {
        Self::polynomial(vec![ZERO; len.max(1)])
    }

    pub fn constant(c: Complex64, len: usize) -> Self {
        let mut v = vec![ZERO; len.max(1)];
        v[0] = c;
        Self::polynomial(v)
    }

    /// `z^k` padded to `len` coefficients.
    pub fn monomial(k: usize, len: usize) -> Self {
        let mut v = vec![ZERO; len.max(k + 1)];
        v[k] = ONE;
        Self::polynomial(v)
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeff(&self, n: usize) -> Complex64 {
        self.coeffs.get(n).copied().unwrap_or(ZERO)
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn is_polynomial(&self) -> bool {
        self.tail == Tail::Exact
    }

    /// Radius inside which the envelope bound is summable with the stored
    /// `tail_bound`; 1 for bounded envelopes.
    pub fn radius_hint(&self) -> f64 {
        match self.tail {
            Tail::Exact => 1.0,
            Tail::PowerLaw { s, .. } if s > 0.0 => (-s / (self.len() as f64 + 1.0)).exp(),
            Tail::PowerLaw { .. } => 1.0,
        }
    }

    /// `sup_{n >= N} |a_n| radius_hint^n` under the envelope.
    pub fn tail_bound(&self) -> f64 {
        match self.tail {
            Tail::Exact => 0.0,
            Tail::PowerLaw { c, s } => {
                let n = self.len() as f64 + 1.0;
                c * n.powf(s) * self.radius_hint().powf(n)
            }
        }
    }

    /// Bound on `|f(z) - f_N(z)|` for `|z| = r`; infinite when the envelope is
    /// not summable at `r`.
    pub fn error_bound(&self, r: f64) -> f64 {
        match self.tail {
            Tail::Exact => 0.0,
            Tail::PowerLaw { c, s } => envelope_tail_sum(c, s, self.len(), r),
        }
    }

    /// Largest radius (bisection in `[0, 1]`) at which the truncation error
    /// stays below `tol`.
    pub fn accurate_radius(&self, tol: f64) -> f64 {
        if self.is_polynomial() || self.error_bound(1.0) <= tol {
            return 1.0;
        }
        let (mut lo, mut hi) = (0.0, 1.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.error_bound(mid) <= tol {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        lo
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * z + c)
    }

    /// Value and derivative in one Horner sweep.
    pub fn eval_with_derivative(&self, z: Complex64) -> (Complex64, Complex64) {
        let mut p = ZERO;
        let mut dp = ZERO;
        for &c in self.coeffs.iter().rev() {
            dp = dp * z + p;
            p = p * z + c;
        }
        (p, dp)
    }

    /// Evaluation that refuses points where the truncation error exceeds `tol`.
    pub fn eval_checked(&self, z: Complex64, tol: f64) -> Result<Complex64> {
        let r = z.norm();
        let bound = self.error_bound(r);
        if bound > tol {
            return Err(Error::Precision(format!(
                "series of order {} evaluated at |z| = {r} with tail bound {bound:e}",
                self.len()
            )));
        }
        Ok(self.eval(z))
    }

    /// Values at `r e^{2πij/m}`, `j = 0..m`, by folding coefficients mod `m`
    /// and one inverse FFT.
    pub fn values_on_circle(&self, r: f64, m: usize) -> Vec<Complex64> {
        let mut buf = vec![ZERO; m];
        let mut rn = 1.0;
        for (n, &c) in self.coeffs.iter().enumerate() {
            buf[n % m] += c * rn;
            rn *= r;
            if rn == 0.0 {
                break;
            }
        }
        inverse_fft(m).process(&mut buf);
        buf
    }

    /// Taylor coefficients of an analytic function sampled on the circle of
    /// radius `radius`; `len` coefficients are kept. The caller guarantees the
    /// function is analytic on a neighbourhood of the closed disk of that radius.
    pub fn from_samples<F: FnMut(Complex64) -> Complex64>(
        mut f: F,
        len: usize,
        radius: f64,
    ) -> Self {
        let decay = -radius.ln();
        let needed = if decay > 0.0 {
            (40.0 / decay) as usize
        } else {
            4 * len
        };
        let m = (needed.max(2 * len).max(64))
            .next_power_of_two()
            .min(1 << 20);
        let mut buf: Vec<Complex64> = (0..m)
            .map(|j| f(Complex64::from_polar(radius, TAU * j as f64 / m as f64)))
            .collect();
        forward_fft(m).process(&mut buf);
        let mut scale = 1.0 / m as f64;
        let coeffs = buf
            .into_iter()
            .take(len)
            .map(|c| {
                let out = c * scale;
                scale /= radius;
                out
            })
            .collect();
        Self::new(coeffs)
    }

    pub fn truncate(&self, len: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(len.max(1), ZERO);
        if self.is_polynomial()
            && self.coeffs[len.min(self.len())..]
                .iter()
                .all(|c| *c == ZERO)
        {
            return Self::polynomial(coeffs);
        }
        Self::new(coeffs)
    }

    fn rebuild(&self, other: Option<&Self>, coeffs: Vec<Complex64>) -> Self {
        let exact = self.is_polynomial() && other.is_none_or(|o| o.is_polynomial());
        if exact {
            Self::polynomial(coeffs)
        } else {
            Self::new(coeffs)
        }
    }

    pub fn scale(&self, c: Complex64) -> Self {
        self.rebuild(None, self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Coefficients known for a combination of `self` and `other`: exact
    /// polynomials do not limit it.
    fn known_len(&self, other: &Self) -> Option<usize> {
        match (self.is_polynomial(), other.is_polynomial()) {
            (true, true) => None,
            (true, false) => Some(other.len()),
            (false, true) => Some(self.len()),
            (false, false) => Some(self.len().min(other.len())),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.known_len(other).unwrap_or(self.len().max(other.len()));
        let coeffs = (0..n).map(|i| self.coeff(i) + other.coeff(i)).collect();
        self.rebuild(Some(other), coeffs)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(-ONE))
    }

    /// Cauchy product. Polynomials multiply exactly; otherwise the result is
    /// truncated to the shortest non-polynomial length.
    pub fn mul(&self, other: &Self) -> Self {
        let n = self
            .known_len(other)
            .unwrap_or(self.len() + other.len() - 1);
        self.mul_to(other, n)
    }

    /// Cauchy product truncated to `n` coefficients.
    pub fn mul_to(&self, other: &Self, n: usize) -> Self {
        let mut out = vec![ZERO; n];
        for (i, &a) in self.coeffs.iter().enumerate().take(n) {
            if a == ZERO {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate().take(n - i) {
                out[i + j] += a * b;
            }
        }
        self.rebuild(Some(other), out)
    }

    /// `z * f`, one coefficient longer.
    pub fn mul_z(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.len() + 1);
        coeffs.push(ZERO);
        coeffs.extend_from_slice(&self.coeffs);
        self.rebuild(None, coeffs)
    }

    /// `f / z^k`; the first `k` coefficients must vanish to `tol`.
    pub fn div_z_pow(&self, k: usize, tol: f64) -> Result<Self> {
        if let Some(bad) = self.coeffs.iter().take(k).find(|c| c.norm() > tol) {
            return Err(Error::domain(format!(
                "division by z^{k} of a series with nonzero low coefficient {bad}"
            )));
        }
        let coeffs = if self.len() > k {
            self.coeffs[k..].to_vec()
        } else {
            vec![ZERO]
        };
        Ok(self.rebuild(None, coeffs))
    }

    pub fn derivative(&self) -> Self {
        let coeffs: Vec<Complex64> = if self.len() <= 1 {
            vec![ZERO]
        } else {
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(n, &c)| c * n as f64)
                .collect()
        };
        self.rebuild(None, coeffs)
    }

    /// `∫_0^z f`, one coefficient longer.
    pub fn antiderivative(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.len() + 1);
        coeffs.push(ZERO);
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(n, &c)| c / (n as f64 + 1.0)),
        );
        self.rebuild(None, coeffs)
    }

    /// `f / g` by recursive series division; requires `g(0) != 0`.
    pub fn div(&self, g: &Self) -> Result<Self> {
        let n = self.len().min(g.len());
        self.div_to(g, n)
    }

    pub fn div_to(&self, g: &Self, n: usize) -> Result<Self> {
        let g0 = g.coeff(0);
        if g0.norm() == 0.0 {
            return Err(Error::domain(
                "series division by a function vanishing at 0",
            ));
        }
        let mut q = vec![ZERO; n];
        for k in 0..n {
            let mut acc = self.coeff(k);
            for j in 1..=k.min(g.len() - 1) {
                acc -= g.coeffs[j] * q[k - j];
            }
            q[k] = acc / g0;
        }
        Ok(Self::new(q))
    }

    pub fn recip(&self) -> Result<Self> {
        Self::constant(ONE, self.len()).div(self)
    }

    /// Principal-branch logarithm anchored at `log f(0)`.
    pub fn log(&self) -> Result<Self> {
        let f0 = self.coeff(0);
        if f0.norm() == 0.0 {
            return Err(Error::domain("logarithm of a series vanishing at 0"));
        }
        let n = self.len();
        let d = self.derivative().truncate(n.saturating_sub(1).max(1));
        let ratio = d.div_to(self, n.saturating_sub(1).max(1))?;
        let mut out = ratio.antiderivative();
        out.coeffs.truncate(n);
        out.coeffs[0] = f0.ln();
        Ok(Self::new(out.coeffs))
    }

    pub fn exp(&self) -> Self {
        let n = self.len();
        let mut e = vec![ZERO; n];
        e[0] = self.coeff(0).exp();
        for k in 1..n {
            let mut acc = ZERO;
            for j in 1..=k {
                acc += self.coeffs[j] * (j as f64) * e[k - j];
            }
            e[k] = acc / k as f64;
        }
        Self::new(e)
    }

    /// `f^c = exp(c log f)` on the principal branch at `f(0)`.
    pub fn powc(&self, c: Complex64) -> Result<Self> {
        Ok(self.log()?.scale(c).exp())
    }

    pub fn powi(&self, k: usize) -> Self {
        let mut out = Self::constant(ONE, self.len());
        if !self.is_polynomial() {
            out = Self::new(out.coeffs);
        }
        let mut base = self.clone();
        let mut e = k;
        while e > 0 {
            if e & 1 == 1 {
                out = out.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        out
    }

    /// Successive powers `f^0, f^1, ..., f^{count-1}`, each truncated to `n`.
    pub fn powers(&self, count: usize, n: usize) -> Vec<Self> {
        let mut out = Vec::with_capacity(count);
        let mut cur = Self::constant(ONE, n);
        if !self.is_polynomial() {
            cur = Self::new(cur.coeffs);
        }
        for _ in 0..count {
            let next = cur.mul_to(self, n);
            out.push(cur);
            cur = next;
        }
        out
    }

    /// `f ∘ g` for `g(0) = 0`, truncated to the shorter length.
    pub fn compose(&self, g: &Self) -> Result<Self> {
        if g.coeff(0).norm() > 1e-14 {
            return Err(Error::domain(
                "composition requires the inner series to vanish at 0",
            ));
        }
        let n = self.len().min(g.len());
        let mut inner = g.truncate(n);
        inner.coeffs[0] = ZERO;
        let mut acc = Self::constant(self.coeff(n - 1), n);
        for k in (0..n - 1).rev() {
            acc = acc.mul_to(&inner, n);
            acc.coeffs[0] += self.coeff(k);
        }
        Ok(self.rebuild(Some(g), acc.coeffs))
    }

    /// Coefficient sup-norm of `self - other` over the common prefix.
    pub fn coeff_distance(&self, other: &Self) -> f64 {
        let n = self.len().min(other.len());
        (0..n)
            .map(|i| (self.coeffs[i] - other.coeffs[i]).norm())
            .fold(0.0, f64::max)
    }

    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            coeffs: self.coeffs.iter().map(|c| [c.re, c.im]).collect(),
            polynomial: self.is_polynomial(),
            radius_hint: Some(self.radius_hint()),
            tail_bound: Some(self.tail_bound()),
        }
    }

    pub fn from_json(json: &SeriesJson) -> Result<Self> {
        if json.coeffs.is_empty() {
            return Err(Error::Config(
                "series needs at least one coefficient".into(),
            ));
        }
        let coeffs = json
            .coeffs
            .iter()
            .map(|c| Complex64::new(c[0], c[1]))
            .collect();
        Ok(if json.polynomial {
            Self::polynomial(coeffs)
        } else {
            Self::new(coeffs)
        })
    }
}

fn fit_tail(coeffs: &[Complex64]) -> Tail {
    let n = coeffs.len();
    if n < 4 {
        return Tail::Exact;
    }
    let upper = &coeffs[(3 * n) / 4..];
    if upper.iter().all(|c| *c == ZERO) {
        return Tail::Exact;
    }
    let start = (n / 2).max(1);
    let pts: Vec<(f64, f64)> = coeffs[start..]
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > 0.0)
        .map(|(i, c)| (((start + i) as f64).ln(), c.norm().ln()))
        .collect();
    let s = crate::trend::linear_fit(&pts).map(|f| f.0).unwrap_or(0.0);
    let c = pts
        .iter()
        .map(|&(ln_n, ln_a)| (ln_a - s * ln_n).exp())
        .fold(0.0, f64::max);
    Tail::PowerLaw { c, s }
}

fn envelope_tail_sum(c: f64, s: f64, start: usize, r: f64) -> f64 {
    if c == 0.0 {
        return 0.0;
    }
    if r == 0.0 {
        return 0.0;
    }
    if r >= 1.0 && s >= -1.0 {
        return f64::INFINITY;
    }
    let ln_r = r.ln();
    let mut sum = 0.0;
    let mut n = start.max(1) as f64;
    let mut prev = f64::INFINITY;
    for _ in 0..2_000_000 {
        let term = (c.ln() + s * n.ln() + n * ln_r).exp();
        sum += term;
        if term < 1e-18 * sum && term <= prev {
            return sum;
        }
        if term == 0.0 {
            return sum;
        }
        prev = term;
        n += 1.0;
    }
    f64::INFINITY
}

/// Named series used throughout examples and tests.
pub mod builtin {
    use super::*;

    /// `log(1/(1 - z)) = Σ z^n / n`.
    pub fn log_one_over_one_minus(len: usize) -> AnalyticSeries {
        AnalyticSeries::new(
            (0..len)
                .map(|n| {
                    if n == 0 {
                        ZERO
                    } else {
                        Complex64::new(1.0 / n as f64, 0.0)
                    }
                })
                .collect(),
        )
    }

    /// `log((1 + z)/(1 - z)) = Σ 2 z^{2m+1} / (2m+1)`.
    pub fn log_ratio(len: usize) -> AnalyticSeries {
        AnalyticSeries::new(
            (0..len)
                .map(|n| {
                    if n % 2 == 1 {
                        Complex64::new(2.0 / n as f64, 0.0)
                    } else {
                        ZERO
                    }
                })
                .collect(),
        )
    }

    /// `z / (1 - z)`.
    pub fn z_over_one_minus(len: usize) -> AnalyticSeries {
        AnalyticSeries::new((0..len).map(|n| if n == 0 { ZERO } else { ONE }).collect())
    }

    /// Koebe function `z / (1 - z)^2 = Σ n z^n`.
    pub fn koebe(len: usize) -> AnalyticSeries {
        AnalyticSeries::new((0..len).map(|n| Complex64::new(n as f64, 0.0)).collect())
    }

    /// `z / (2 - z) = Σ z^n / 2^n` for `n >= 1`.
    pub fn z_over_two_minus(len: usize) -> AnalyticSeries {
        AnalyticSeries::new(
            (0..len)
                .map(|n| {
                    if n == 0 {
                        ZERO
                    } else {
                        Complex64::new(0.5f64.powi(n as i32), 0.0)
                    }
                })
                .collect(),
        )
    }

    /// `(1 - a z)^{-s}` by the binomial series.
    pub fn binomial(a: Complex64, s: f64, len: usize) -> AnalyticSeries {
        let mut coeffs = Vec::with_capacity(len);
        let mut c = ONE;
        for n in 0..len {
            coeffs.push(c);
            c = c * a * ((s + n as f64) / (n as f64 + 1.0));
        }
        AnalyticSeries::new(coeffs)
    }
}
