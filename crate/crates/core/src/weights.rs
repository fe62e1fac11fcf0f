//! Radial weights: tail integral ω̂, kernel ω*, doubling diagnostics and the
//! masses of Carleson squares and pseudohyperbolic disks.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry;
use crate::quadrature::{self, integrate_to_one, TailTolerance};
use crate::trend::{self, Verdict};

/// Depth of the dyadic ω̂ cache: entries at `1 - s = 2^{-k}`, `k = 0..=CACHE_DEPTH`.
const CACHE_DEPTH: usize = 64;

/// JSON description of a weight.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WeightSpec {
    Standard { alpha: f64 },
    Tabulated { r: Vec<f64>, w: Vec<f64> },
    ClosedForm { name: String },
}

type Density = dyn Fn(f64, f64) -> f64 + Send + Sync;

/// A radial weight with its ω̂ values cached on the dyadic grid `1 - 2^{-k}`.
#[derive(Clone)]
pub struct RadialWeight {
    spec: WeightSpec,
    density: Arc<Density>,
    /// `cache[k] = ω̂(1 - 2^{-k})`
    cache: Vec<f64>,
    tol: TailTolerance,
}

impl fmt::Debug for RadialWeight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialWeight")
            .field("spec", &self.spec)
            .field("hat_at_zero", &self.cache.first())
            .finish()
    }
}

impl RadialWeight {
    /// `(α + 1)(1 - r²)^α`, `α > -1`.
    pub fn standard(alpha: f64) -> Result<Self> {
        if !(alpha > -1.0) || !alpha.is_finite() {
            return Err(Error::Config(format!(
                "standard weight needs alpha > -1, got {alpha}"
            )));
        }
        let density = move |_s: f64, u: f64| (alpha + 1.0) * (u * (2.0 - u)).powf(alpha);
        Self::build(WeightSpec::Standard { alpha }, Arc::new(density))
    }

    /// Log-linear interpolation of samples `w` at nondecreasing radii `r`.
    /// Below the first radius the first value is held; beyond the last the
    /// weight continues as a power of `1 - r` through the last two samples.
    pub fn tabulated(r: Vec<f64>, w: Vec<f64>) -> Result<Self> {
        if r.len() != w.len() || r.len() < 2 {
            return Err(Error::Config(
                "tabulated weight needs matching r and w with at least two samples".into(),
            ));
        }
        if r.windows(2).any(|p| p[1] < p[0]) || r[0] < 0.0 || *r.last().unwrap() >= 1.0 {
            return Err(Error::Config(
                "tabulated radii must be nondecreasing in [0, 1)".into(),
            ));
        }
        if w.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(Error::Config(
                "tabulated weight values must be finite and nonnegative".into(),
            ));
        }
        let table = Arc::new(Table::new(r.clone(), w.clone()));
        let density = move |s: f64, u: f64| table.eval(s, u);
        Self::build(WeightSpec::Tabulated { r, w }, Arc::new(density))
    }

    /// Named closed forms. `"exponential"` is `exp(-1/(1-r))`.
    pub fn closed_form(name: &str) -> Result<Self> {
        let density: Arc<Density> = match name {
            "exponential" => Arc::new(|_s: f64, u: f64| (-1.0 / u).exp()),
            other => {
                return Err(Error::Config(format!(
                    "unknown closed-form weight '{other}'"
                )));
            }
        };
        Self::build(
            WeightSpec::ClosedForm {
                name: name.to_string(),
            },
            density,
        )
    }

    /// Arbitrary radial density `r ↦ ω(r)`.
    pub fn from_fn<F>(name: &str, f: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::build(
            WeightSpec::ClosedForm {
                name: name.to_string(),
            },
            Arc::new(move |s: f64, _u: f64| f(s)),
        )
    }

    pub fn from_spec(spec: &WeightSpec) -> Result<Self> {
        match spec {
            WeightSpec::Standard { alpha } => Self::standard(*alpha),
            WeightSpec::Tabulated { r, w } => Self::tabulated(r.clone(), w.clone()),
            WeightSpec::ClosedForm { name } => Self::closed_form(name),
        }
    }

    fn build(spec: WeightSpec, density: Arc<Density>) -> Result<Self> {
        let mut w = RadialWeight {
            spec,
            density,
            cache: Vec::new(),
            tol: TailTolerance::default(),
        };
        w.cache = w.build_cache()?;
        if !(w.cache[0] > 0.0) {
            return Err(Error::Config("weight has zero total mass".into()));
        }
        Ok(w)
    }

    fn build_cache(&self) -> Result<Vec<f64>> {
        let mut cache = vec![0.0; CACHE_DEPTH + 1];
        if let Some(a) = self.integer_alpha() {
            for (k, c) in cache.iter_mut().enumerate() {
                *c = standard_hat_integer(a, 0.5f64.powi(k as i32));
            }
            return Ok(cache);
        }
        let deepest = 0.5f64.powi(CACHE_DEPTH as i32);
        cache[CACHE_DEPTH] =
            integrate_to_one(|s, u| (self.density)(s, u), deepest, self.tol)?.value;
        for k in (0..CACHE_DEPTH).rev() {
            let lo = 0.5f64.powi(k as i32 + 1);
            let piece = quadrature::adaptive(
                |u| (self.density)(1.0 - u, u),
                lo,
                2.0 * lo,
                1e-300,
                self.tol.rel * 0.1,
                400,
            )?;
            cache[k] = cache[k + 1] + piece.value;
        }
        Ok(cache)
    }

    fn integer_alpha(&self) -> Option<i32> {
        match self.spec {
            WeightSpec::Standard { alpha } if alpha.fract() == 0.0 && alpha <= 64.0 => {
                Some(alpha as i32)
            }
            _ => None,
        }
    }

    pub fn spec(&self) -> &WeightSpec {
        &self.spec
    }

    pub fn standard_alpha(&self) -> Option<f64> {
        match self.spec {
            WeightSpec::Standard { alpha } => Some(alpha),
            _ => None,
        }
    }

    /// `ω(r)`.
    pub fn density(&self, r: f64) -> f64 {
        (self.density)(r, 1.0 - r)
    }

    /// `ω` evaluated with `u = 1 - s` supplied separately for precision near 1.
    pub fn density_su(&self, s: f64, u: f64) -> f64 {
        (self.density)(s, u)
    }

    /// `ω̂(r) = ∫_r^1 ω`.
    pub fn tail_integral(&self, r: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&r) {
            return Err(Error::domain(format!(
                "tail integral needs r in [0, 1], got {r}"
            )));
        }
        self.hat_u(1.0 - r)
    }

    /// `ω̂` as a function of `u = 1 - r`.
    pub fn hat_u(&self, u: f64) -> Result<f64> {
        if u <= 0.0 {
            return Ok(0.0);
        }
        if let Some(a) = self.integer_alpha() {
            return Ok(standard_hat_integer(a, u));
        }
        let k = (-u.log2()).ceil().max(0.0) as usize;
        if k > CACHE_DEPTH {
            return Ok(integrate_to_one(|s, v| (self.density)(s, v), u, self.tol)?.value);
        }
        let node = 0.5f64.powi(k as i32);
        if node == u {
            return Ok(self.cache[k]);
        }
        let piece = quadrature::adaptive(
            |v| (self.density)(1.0 - v, v),
            node,
            u,
            1e-300,
            self.tol.rel * 0.1,
            400,
        )?;
        Ok(self.cache[k] + piece.value)
    }

    /// `∫_r^1 g(s, 1-s) ω(s) ds`.
    pub fn integrate_tail<G: Fn(f64, f64) -> f64>(&self, r: f64, g: G) -> Result<f64> {
        let q = integrate_to_one(|s, u| g(s, u) * (self.density)(s, u), 1.0 - r, self.tol)?;
        Ok(q.value)
    }

    /// `ω*(r) = ∫_r^1 s ω(s) log(s/r) ds`.
    pub fn omega_star(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) || r > 1.0 {
            return Err(Error::domain(format!(
                "omega_star needs modulus in (0, 1), got {r}"
            )));
        }
        if r == 1.0 {
            return Ok(0.0);
        }
        let ur = 1.0 - r;
        self.integrate_tail(r, |s, u| s * ((ur - u) / r).ln_1p())
    }

    /// `m_{2n+1} = 2 ∫_0^1 r^{2n+1} ω(r) dr`.
    pub fn moment(&self, n: usize) -> Result<f64> {
        if let WeightSpec::Standard { alpha } = self.spec {
            return Ok((1..=n)
                .map(|k| k as f64 / (k as f64 + alpha + 1.0))
                .product());
        }
        let e = 2 * n as i32 + 1;
        self.integrate_tail(0.0, |s, _| 2.0 * s.powi(e))
    }

    /// `m_1, m_3, ..., m_{2N-1}`.
    pub fn moments(&self, count: usize) -> Result<Vec<f64>> {
        if let WeightSpec::Standard { alpha } = self.spec {
            let mut out = Vec::with_capacity(count);
            let mut m = 1.0;
            for n in 0..count {
                if n > 0 {
                    m *= n as f64 / (n as f64 + alpha + 1.0);
                }
                out.push(m);
            }
            return Ok(out);
        }
        (0..count).map(|n| self.moment(n)).collect()
    }

    /// `ω(S(a))` for the Carleson square over the arc of total width `1 - |a|`.
    pub fn square_mass(&self, a: Complex64) -> Result<f64> {
        let sq = geometry::carleson_square(a)?;
        let width = sq.angular_width;
        let annulus = self.integrate_tail(sq.r_min, |s, _| 2.0 * s)?;
        Ok(width / std::f64::consts::TAU * annulus)
    }

    /// `ω(Δ(a, r))` under normalized area measure.
    pub fn disk_mass(&self, a: Complex64, r: f64) -> Result<f64> {
        let disk = geometry::pseudo_disk(a, r)?;
        let c = disk.center.norm();
        let big_r = disk.radius;
        if big_r == 0.0 {
            return Ok(0.0);
        }
        let lo = (c - big_r).max(0.0);
        let hi = (c + big_r).min(1.0);
        let arc = |s: f64| -> f64 {
            if s <= 0.0 {
                return 0.0;
            }
            if c == 0.0 {
                return if s < big_r { std::f64::consts::PI } else { 0.0 };
            }
            if s + c <= big_r {
                return std::f64::consts::PI;
            }
            // half-angle of the circle |z| = s inside the disk
            let denom = 2.0 * s * c;
            let one_minus = ((big_r - s + c) * (big_r + s - c) / denom).max(0.0);
            let one_plus = ((s + c - big_r) * (s + c + big_r) / denom).max(0.0);
            2.0 * one_minus.sqrt().atan2(one_plus.sqrt())
        };
        let mut breaks = vec![lo];
        if c > 0.0 && big_r > c {
            breaks.push(big_r - c);
        }
        breaks.push(hi);
        let mut f = |s: f64| (self.density)(s, 1.0 - s) * s * 2.0 * arc(s) / std::f64::consts::PI;
        let q = quadrature::adaptive_from(&mut f, &breaks, 1e-15, 1e-11, 4000)?;
        Ok(q.value)
    }

    /// Doubling diagnostics on `r_j = 1 - 2^{-j}`, `j = 1..=levels`.
    pub fn doubling_diagnostics(
        &self,
        levels: usize,
        stabilization_rel: f64,
    ) -> Result<DoublingReport> {
        let levels = levels.max(3);
        let grid: Vec<f64> = (1..=levels).map(|j| 1.0 - 0.5f64.powi(j as i32)).collect();
        let hat: Vec<f64> = (1..=levels + 17)
            .map(|j| self.hat_u(0.5f64.powi(j as i32)))
            .collect::<Result<_>>()?;

        let dhat: Vec<f64> = (0..levels).map(|i| hat[i] / hat[i + 1]).collect();
        let (in_dhat, c_hat) = classify(&dhat, stabilization_rel);

        let mut best: Option<(f64, f64, Vec<f64>)> = None;
        let mut any_growing = true;
        let mut dcheck_ratios = Vec::new();
        for m in 1..=4usize {
            let k = (1usize << m) as f64;
            let ratios: Vec<f64> = (0..levels)
                .map(|i| hat[i] / (hat[i] - hat[i + m]))
                .collect();
            let (v, sup) = classify(&ratios, stabilization_rel);
            if v != Verdict::No {
                any_growing = false;
            }
            if v == Verdict::Yes && best.is_none() {
                best = Some((k, sup, ratios.clone()));
            }
            if m == 1 {
                dcheck_ratios = ratios;
            }
        }
        let (in_dcheck, k, c_prime) = match best {
            Some((k, sup, ratios)) => {
                dcheck_ratios = ratios;
                (Verdict::Yes, k, sup)
            }
            None if any_growing => (Verdict::No, f64::NAN, f64::INFINITY),
            None => (Verdict::Inconclusive, f64::NAN, f64::NAN),
        };
        Ok(DoublingReport {
            in_dhat,
            c_hat,
            in_dcheck,
            k,
            c_prime,
            evidence_grid: grid,
            dhat_ratios: dhat,
            dcheck_ratios,
            stabilization_rel,
        })
    }

    /// Default grid: 24 dyadic levels, 10% stabilization.
    pub fn doubling_report(&self) -> Result<DoublingReport> {
        self.doubling_diagnostics(24, 0.1)
    }
}

/// Verdict for a ratio sequence and its supremum over the grid.
fn classify(ratios: &[f64], rel: f64) -> (Verdict, f64) {
    let finite = ratios.iter().all(|r| r.is_finite() && *r > 0.0);
    if !finite {
        return (Verdict::No, f64::INFINITY);
    }
    let sup = ratios.iter().cloned().fold(0.0, f64::max);
    if trend::stabilized(ratios, rel) {
        return (Verdict::Yes, sup);
    }
    let growing = ratios.len() >= 4
        && ratios[ratios.len() - 4..]
            .windows(2)
            .all(|w| w[1] > w[0] * (1.0 + rel));
    if growing {
        (Verdict::No, sup)
    } else {
        (Verdict::Inconclusive, sup)
    }
}

/// `∫_0^u (α+1)(v(2-v))^α dv` for integer `α ≥ 0` by binomial expansion.
fn standard_hat_integer(alpha: i32, u: f64) -> f64 {
    let a = alpha as f64;
    let mut sum = 0.0;
    let mut binom = 1.0;
    for k in 0..=alpha {
        let kf = k as f64;
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * binom * 2f64.powi(alpha - k) * u.powi(alpha + k + 1) / (a + kf + 1.0);
        binom = binom * (a - kf) / (kf + 1.0);
    }
    (a + 1.0) * sum
}

#[derive(Debug)]
struct Table {
    r: Vec<f64>,
    w: Vec<f64>,
    /// power of `1 - r` beyond the last sample
    tail_exponent: f64,
}

impl Table {
    fn new(r: Vec<f64>, w: Vec<f64>) -> Self {
        let n = r.len();
        let (u1, u2) = (1.0 - r[n - 2], 1.0 - r[n - 1]);
        let tail_exponent = if w[n - 1] > 0.0 && w[n - 2] > 0.0 && u1 != u2 {
            (w[n - 1] / w[n - 2]).ln() / (u2 / u1).ln()
        } else {
            0.0
        };
        Table {
            r,
            w,
            tail_exponent,
        }
    }

    fn eval(&self, s: f64, u: f64) -> f64 {
        let n = self.r.len();
        if s <= self.r[0] {
            return self.w[0];
        }
        if s >= self.r[n - 1] {
            let ul = 1.0 - self.r[n - 1];
            return self.w[n - 1] * (u / ul).powf(self.tail_exponent);
        }
        let i = self
            .r
            .partition_point(|&x| x <= s)
            .saturating_sub(1)
            .min(n - 2);
        let (r0, r1, w0, w1) = (self.r[i], self.r[i + 1], self.w[i], self.w[i + 1]);
        if r1 == r0 {
            return w1;
        }
        let t = (s - r0) / (r1 - r0);
        if w0 > 0.0 && w1 > 0.0 {
            (w0.ln() * (1.0 - t) + w1.ln() * t).exp()
        } else {
            w0 * (1.0 - t) + w1 * t
        }
    }
}

/// Membership of a weight in D̂ and Ď with the evidence behind it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DoublingReport {
    pub in_dhat: Verdict,
    pub c_hat: f64,
    pub in_dcheck: Verdict,
    #[serde(rename = "K")]
    pub k: f64,
    pub c_prime: f64,
    pub evidence_grid: Vec<f64>,
    pub dhat_ratios: Vec<f64>,
    pub dcheck_ratios: Vec<f64>,
    pub stabilization_rel: f64,
}

impl DoublingReport {
    pub fn in_d(&self) -> Verdict {
        match (self.in_dhat, self.in_dcheck) {
            (Verdict::Yes, Verdict::Yes) => Verdict::Yes,
            (Verdict::No, _) | (_, Verdict::No) => Verdict::No,
            _ => Verdict::Inconclusive,
        }
    }
}
