#ifndef BERGSPEC_H
#define BERGSPEC_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Result code of every call.
typedef enum BsStatus {
  BS_STATUS_OK = 0,
  BS_STATUS_NULL_POINTER = 1,
  BS_STATUS_INVALID_ARGUMENT = 2,
  // argument outside the mathematical domain
  BS_STATUS_DOMAIN = 3,
  // quadrature, Newton or eigensolver failure
  BS_STATUS_NUMERIC = 4,
  // a theorem hypothesis is not met
  BS_STATUS_REFUSED = 5,
  BS_STATUS_PANIC = 6,
} BsStatus;

// A composition semigroup given by its Koenigs data.
typedef struct BsSemigroup BsSemigroup;

// A truncated power series.
typedef struct BsSeries BsSeries;

// A radial weight.
typedef struct BsWeight BsWeight;

typedef struct BsComplex {
  double re;
  double im;
} BsComplex;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread; empty after a success.
// The pointer stays valid until the next call on the same thread.
const char *bs_last_error(void);

// Library version as a static NUL-terminated string.
const char *bs_version(void);

// Releases a string returned by this library.
//
// # Safety
// `s` must come from this library and not have been freed.
void bs_string_free(char *s);

// `ω(r) = (α+1)(1-r^2)^α`.
//
// # Safety
// `out` must be a valid pointer.
enum BsStatus bs_weight_standard(double alpha, struct BsWeight **out);

// Weight from its JSON description, e.g. `{"kind":"standard","alpha":1}`.
//
// # Safety
// `json` must be NUL-terminated; `out` must be a valid pointer.
enum BsStatus bs_weight_from_json(const char *json, struct BsWeight **out);

// # Safety
// `w` must come from this library and not have been freed.
void bs_weight_free(struct BsWeight *w);

// `ω̂(r) = ∫_r^1 ω`.
//
// # Safety
// Pointers must be valid.
enum BsStatus bs_weight_omega_hat(const struct BsWeight *w, double r, double *out);

// `ω*(r) = ∫_r^1 s ω(s) log(s/r) ds`.
//
// # Safety
// Pointers must be valid.
enum BsStatus bs_weight_omega_star(const struct BsWeight *w, double r, double *out);

// `m_{2n+1} = 2 ∫_0^1 r^{2n+1} ω(r) dr = ‖z^n‖²`.
//
// # Safety
// Pointers must be valid.
enum BsStatus bs_weight_moment(const struct BsWeight *w, size_t n, double *out);

// Built-in semigroup: `rotation(a)`, `dilation(s)`, `example2`, `example3`, `koebe`.
//
// # Safety
// `name` must be NUL-terminated; `out` must be valid.
enum BsStatus bs_semigroup_builtin(const char *name, struct BsSemigroup **out);

// Semigroup from its JSON description; `truncation = 0` selects the default.
//
// # Safety
// `json` must be NUL-terminated; `out` must be valid.
enum BsStatus bs_semigroup_from_json(const char *json, size_t truncation, struct BsSemigroup **out);

// # Safety
// `s` must come from this library and not have been freed.
void bs_semigroup_free(struct BsSemigroup *s);

// `φ_t(z)`.
//
// # Safety
// Pointers must be valid.
enum BsStatus bs_semigroup_phi(const struct BsSemigroup *s,
                               double t,
                               struct BsComplex z,
                               struct BsComplex *out);

// Denjoy-Wolff point `b` and `G'(b)`.
//
// # Safety
// Pointers must be valid.
enum BsStatus bs_semigroup_fixed_point(const struct BsSemigroup *s,
                                       struct BsComplex *b,
                                       struct BsComplex *gprime_b);

// Essential spectral radius of `C_{φ_t}` on `A^p_ω` with default parameters.
//
// # Safety
// Pointers must be valid.
enum BsStatus bs_essential_radius(const struct BsSemigroup *s,
                                  const struct BsWeight *w,
                                  double t,
                                  double p,
                                  double *out);

// Generator spectrum as a JSON report. `continuity_t0 > 0` asserts eventual
// norm continuity from that time on; pass `0` when unknown. The returned
// string must be released with [`bs_string_free`].
//
// # Safety
// Pointers must be valid.
enum BsStatus bs_generator_spectrum_json(const struct BsSemigroup *s,
                                         const struct BsWeight *w,
                                         double p,
                                         double t,
                                         double continuity_t0,
                                         size_t k_max,
                                         char **out);

// Series from `len` coefficients; `polynomial` marks them as exact.
//
// # Safety
// `coeffs` must point to `len` values; `out` must be valid.
enum BsStatus bs_series_new(const struct BsComplex *coeffs,
                            size_t len,
                            bool polynomial,
                            struct BsSeries **out);

// # Safety
// `s` must come from this library and not have been freed.
void bs_series_free(struct BsSeries *s);

// Number of stored coefficients.
//
// # Safety
// Pointers must be valid.
enum BsStatus bs_series_len(const struct BsSeries *s, size_t *out);

// Copies up to `cap` coefficients into `buf` and stores the count in `written`.
//
// # Safety
// `buf` must hold `cap` values; pointers must be valid.
enum BsStatus bs_series_coeffs(const struct BsSeries *s,
                               struct BsComplex *buf,
                               size_t cap,
                               size_t *written);

// `(R_h f)(z) = (1/h(z)) ∫_0^z f h'`.
//
// # Safety
// Pointers must be valid.
enum BsStatus bs_apply_r_h(const struct BsSeries *h,
                           const struct BsSeries *f,
                           struct BsSeries **out);

// `R(λ, Γ) f` for a semigroup fixing 0.
//
// # Safety
// Pointers must be valid.
enum BsStatus bs_resolvent(const struct BsSemigroup *s,
                           struct BsComplex lambda,
                           const struct BsSeries *f,
                           struct BsSeries **out);

// Difference functional of two linear maps `z ↦ c z`; `gamma <= 0` picks
// the default exponent.
//
// # Safety
// Pointers must be valid.
enum BsStatus bs_difference_linear(struct BsComplex c_phi,
                                   struct BsComplex c_psi,
                                   const struct BsWeight *w,
                                   double p,
                                   double gamma,
                                   double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BERGSPEC_H */
