//! C ABI over `bergspec`.
//!
//! Objects live behind opaque handles created by `bs_*_new`/`bs_*_from_*`
//! and released by the matching `bs_*_free`. Every entry point returns a
//! [`BsStatus`]; on failure [`bs_last_error`] describes what went wrong on the
//! calling thread. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use bergspec::difference::{
    calibrate_gamma0, default_gamma, difference_functional, DifferenceParams,
};
use bergspec::maps::SelfMap;
use bergspec::resolvent::{apply_r_h, apply_resolvent};
use bergspec::semigroup::{SemigroupJson, SemigroupSpec};
use bergspec::series::{AnalyticSeries, DEFAULT_TRUNCATION};
use bergspec::spectral::{
    essential_radius, generator_spectrum, ContinuityEvidence, MapSource, RadiusParams,
};
use bergspec::weights::{RadialWeight, WeightSpec};
use bergspec::{Complex64, Error};

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// argument outside the mathematical domain
    Domain = 3,
    /// quadrature, Newton or eigensolver failure
    Numeric = 4,
    /// a theorem hypothesis is not met
    Refused = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BsComplex {
    pub re: f64,
    pub im: f64,
}

impl From<Complex64> for BsComplex {
    fn from(z: Complex64) -> Self {
        BsComplex { re: z.re, im: z.im }
    }
}

impl From<BsComplex> for Complex64 {
    fn from(z: BsComplex) -> Self {
        Complex64::new(z.re, z.im)
    }
}

/// A radial weight.
pub struct BsWeight(RadialWeight);

/// A composition semigroup given by its Koenigs data.
pub struct BsSemigroup(SemigroupSpec);

/// A truncated power series.
pub struct BsSeries(AnalyticSeries);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let clean = msg.replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(clean).unwrap_or_default());
}

fn status_of(e: &Error) -> BsStatus {
    match e {
        Error::Domain(_) | Error::PossiblyInfinite { .. } => BsStatus::Domain,
        Error::Refused(_) => BsStatus::Refused,
        Error::Config(_) | Error::Json(_) | Error::Io(_) => BsStatus::InvalidArgument,
        _ => BsStatus::Numeric,
    }
}

enum Failure {
    Null(&'static str),
    Invalid(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type Ffi<T> = std::result::Result<T, Failure>;

/// Runs `f`, turning errors and panics into a status and a thread-local message.
fn guard<F: FnOnce() -> Ffi<()>>(f: F) -> BsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            BsStatus::Ok
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(&format!("null pointer: {what}"));
            BsStatus::NullPointer
        }
        Ok(Err(Failure::Invalid(msg))) => {
            set_error(&msg);
            BsStatus::InvalidArgument
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(&e.to_string());
            status_of(&e)
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(&format!("internal panic: {msg}"));
            BsStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &'static str) -> Ffi<&'a T> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn put<T>(out: *mut T, value: T, what: &'static str) -> Ffi<()> {
    if out.is_null() {
        return Err(Failure::Null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn text<'a>(s: *const c_char, what: &'static str) -> Ffi<&'a str> {
    if s.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Failure::Invalid(format!("{what} is not valid UTF-8")))
}

fn boxed<T>(v: T) -> *mut T {
    Box::into_raw(Box::new(v))
}

unsafe fn release<T>(p: *mut T) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

fn c_string(s: String) -> Ffi<*mut c_char> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| Failure::Invalid("output contains a NUL byte".into()))
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn bs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn bs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn bs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// `ω(r) = (α+1)(1-r^2)^α`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bs_weight_standard(alpha: f64, out: *mut *mut BsWeight) -> BsStatus {
    guard(|| {
        let w = RadialWeight::standard(alpha)?;
        put(out, boxed(BsWeight(w)), "out")
    })
}

/// Weight from its JSON description, e.g. `{"kind":"standard","alpha":1}`.
///
/// # Safety
/// `json` must be NUL-terminated; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn bs_weight_from_json(
    json: *const c_char,
    out: *mut *mut BsWeight,
) -> BsStatus {
    guard(|| {
        let spec: WeightSpec = serde_json::from_str(text(json, "json")?).map_err(Error::from)?;
        put(out, boxed(BsWeight(RadialWeight::from_spec(&spec)?)), "out")
    })
}

/// # Safety
/// `w` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn bs_weight_free(w: *mut BsWeight) {
    release(w)
}

/// `ω̂(r) = ∫_r^1 ω`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bs_weight_omega_hat(
    w: *const BsWeight,
    r: f64,
    out: *mut f64,
) -> BsStatus {
    guard(|| {
        let w = borrow(w, "weight")?;
        put(out, w.0.tail_integral(r)?, "out")
    })
}

/// `ω*(r) = ∫_r^1 s ω(s) log(s/r) ds`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bs_weight_omega_star(
    w: *const BsWeight,
    r: f64,
    out: *mut f64,
) -> BsStatus {
    guard(|| {
        let w = borrow(w, "weight")?;
        put(out, w.0.omega_star(r)?, "out")
    })
}

/// `m_{2n+1} = 2 ∫_0^1 r^{2n+1} ω(r) dr = ‖z^n‖²`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bs_weight_moment(w: *const BsWeight, n: usize, out: *mut f64) -> BsStatus {
    guard(|| {
        let w = borrow(w, "weight")?;
        put(out, w.0.moment(n)?, "out")
    })
}

/// Built-in semigroup: `rotation(a)`, `dilation(s)`, `example2`, `example3`, `koebe`.
///
/// # Safety
/// `name` must be NUL-terminated; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bs_semigroup_builtin(
    name: *const c_char,
    out: *mut *mut BsSemigroup,
) -> BsStatus {
    guard(|| {
        let spec = SemigroupSpec::builtin(text(name, "name")?)?;
        put(out, boxed(BsSemigroup(spec)), "out")
    })
}

/// Semigroup from its JSON description; `truncation = 0` selects the default.
///
/// # Safety
/// `json` must be NUL-terminated; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bs_semigroup_from_json(
    json: *const c_char,
    truncation: usize,
    out: *mut *mut BsSemigroup,
) -> BsStatus {
    guard(|| {
        let js: SemigroupJson = serde_json::from_str(text(json, "json")?).map_err(Error::from)?;
        let n = if truncation == 0 {
            DEFAULT_TRUNCATION
        } else {
            truncation
        };
        put(
            out,
            boxed(BsSemigroup(SemigroupSpec::from_json(&js, n)?)),
            "out",
        )
    })
}

/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn bs_semigroup_free(s: *mut BsSemigroup) {
    release(s)
}

/// `φ_t(z)`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bs_semigroup_phi(
    s: *const BsSemigroup,
    t: f64,
    z: BsComplex,
    out: *mut BsComplex,
) -> BsStatus {
    guard(|| {
        let s = borrow(s, "semigroup")?;
        put(out, s.0.evaluate_phi(t, z.into())?.into(), "out")
    })
}

/// Denjoy-Wolff point `b` and `G'(b)`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bs_semigroup_fixed_point(
    s: *const BsSemigroup,
    b: *mut BsComplex,
    gprime_b: *mut BsComplex,
) -> BsStatus {
    guard(|| {
        let s = borrow(s, "semigroup")?;
        put(b, s.0.b().into(), "b")?;
        put(gprime_b, s.0.gprime_b().into(), "gprime_b")
    })
}

/// Essential spectral radius of `C_{φ_t}` on `A^p_ω` with default parameters.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bs_essential_radius(
    s: *const BsSemigroup,
    w: *const BsWeight,
    t: f64,
    p: f64,
    out: *mut f64,
) -> BsStatus {
    guard(|| {
        let (s, w) = (borrow(s, "semigroup")?, borrow(w, "weight")?);
        if t.is_nan() || t <= 0.0 {
            return Err(Failure::Invalid(format!("t must be positive, got {t}")));
        }
        let source = MapSource::SemigroupTime {
            spec: s.0.conjugated_to_origin(),
            t,
        };
        put(
            out,
            essential_radius(&source, &w.0, p, &RadiusParams::default())?.estimate,
            "out",
        )
    })
}

/// Generator spectrum as a JSON report. `continuity_t0 > 0` asserts eventual
/// norm continuity from that time on; pass `0` when unknown. The returned
/// string must be released with [`bs_string_free`].
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bs_generator_spectrum_json(
    s: *const BsSemigroup,
    w: *const BsWeight,
    p: f64,
    t: f64,
    continuity_t0: f64,
    k_max: usize,
    out: *mut *mut c_char,
) -> BsStatus {
    guard(|| {
        let (s, w) = (borrow(s, "semigroup")?, borrow(w, "weight")?);
        let evidence =
            (continuity_t0 > 0.0).then_some(ContinuityEvidence::PassedAt { t0: continuity_t0 });
        let report = generator_spectrum(
            &s.0,
            p,
            &w.0,
            t,
            evidence.as_ref(),
            None,
            &RadiusParams::default(),
            k_max,
        )?;
        let json = serde_json::to_string(&report).map_err(Error::from)?;
        put(out, c_string(json)?, "out")
    })
}

/// Series from `len` coefficients; `polynomial` marks them as exact.
///
/// # Safety
/// `coeffs` must point to `len` values; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn bs_series_new(
    coeffs: *const BsComplex,
    len: usize,
    polynomial: bool,
    out: *mut *mut BsSeries,
) -> BsStatus {
    guard(|| {
        if len == 0 {
            return Err(Failure::Invalid(
                "a series needs at least one coefficient".into(),
            ));
        }
        if coeffs.is_null() {
            return Err(Failure::Null("coeffs"));
        }
        let c: Vec<Complex64> = std::slice::from_raw_parts(coeffs, len)
            .iter()
            .map(|&z| z.into())
            .collect();
        let s = if polynomial {
            AnalyticSeries::polynomial(c)
        } else {
            AnalyticSeries::new(c)
        };
        put(out, boxed(BsSeries(s)), "out")
    })
}

/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn bs_series_free(s: *mut BsSeries) {
    release(s)
}

/// Number of stored coefficients.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bs_series_len(s: *const BsSeries, out: *mut usize) -> BsStatus {
    guard(|| put(out, borrow(s, "series")?.0.len(), "out"))
}

/// Copies up to `cap` coefficients into `buf` and stores the count in `written`.
///
/// # Safety
/// `buf` must hold `cap` values; pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bs_series_coeffs(
    s: *const BsSeries,
    buf: *mut BsComplex,
    cap: usize,
    written: *mut usize,
) -> BsStatus {
    guard(|| {
        let s = borrow(s, "series")?;
        let n = s.0.len().min(cap);
        if n > 0 && buf.is_null() {
            return Err(Failure::Null("buf"));
        }
        for (k, c) in s.0.coeffs().iter().take(n).enumerate() {
            buf.add(k).write((*c).into());
        }
        put(written, n, "written")
    })
}

/// `(R_h f)(z) = (1/h(z)) ∫_0^z f h'`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bs_apply_r_h(
    h: *const BsSeries,
    f: *const BsSeries,
    out: *mut *mut BsSeries,
) -> BsStatus {
    guard(|| {
        let (h, f) = (borrow(h, "h")?, borrow(f, "f")?);
        put(out, boxed(BsSeries(apply_r_h(&h.0, &f.0)?)), "out")
    })
}

/// `R(λ, Γ) f` for a semigroup fixing 0.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bs_resolvent(
    s: *const BsSemigroup,
    lambda: BsComplex,
    f: *const BsSeries,
    out: *mut *mut BsSeries,
) -> BsStatus {
    guard(|| {
        let (s, f) = (borrow(s, "semigroup")?, borrow(f, "f")?);
        put(
            out,
            boxed(BsSeries(apply_resolvent(&s.0, lambda.into(), &f.0)?)),
            "out",
        )
    })
}

/// Difference functional of two linear maps `z ↦ c z`; `gamma <= 0` picks
/// the default exponent.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn bs_difference_linear(
    c_phi: BsComplex,
    c_psi: BsComplex,
    w: *const BsWeight,
    p: f64,
    gamma: f64,
    out: *mut f64,
) -> BsStatus {
    guard(|| {
        let w = borrow(w, "weight")?;
        let mut params = DifferenceParams::default();
        let gamma0 = calibrate_gamma0(&w.0, params.calibration_levels)?.gamma0;
        params.gamma0 = Some(gamma0);
        let gamma = if gamma > 0.0 {
            gamma
        } else {
            default_gamma(gamma0)
        };
        let phi = SelfMap::linear(c_phi.into());
        let psi = SelfMap::linear(c_psi.into());
        put(
            out,
            difference_functional(&phi, &psi, p, &w.0, gamma, &params)?.value,
            "out",
        )
    })
}
