use bergspec::bergman::{
    bergman_norm, bergman_norm_fn, integral_mean, membership_test, point_eval_norm_estimate,
    test_function, test_function_length, Exponent, Membership, MembershipMethod,
};
use bergspec::semigroup::SpiralGeometry;
use bergspec::series::{builtin, AnalyticSeries};
use bergspec::weights::RadialWeight;
use bergspec::Complex64;
use proptest::prelude::*;
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

#[test]
fn integral_means_of_polynomials() {
    let f = AnalyticSeries::from_real(&[1.0, 1.0]);
    for r in [0.0, 0.3, 0.9, 1.0] {
        let m2 = integral_mean(&f, Exponent::Finite(2.0), r).unwrap();
        assert!((m2 - (1.0 + r * r).sqrt()).abs() < 1e-13);
        let minf = integral_mean(&f, Exponent::Infinity, r).unwrap();
        assert!((minf - (1.0 + r)).abs() < 1e-12);
    }
    let z3 = AnalyticSeries::monomial(3, 4);
    let m1 = integral_mean(&z3, Exponent::Finite(1.0), 0.7).unwrap();
    assert!((m1 - 0.7f64.powi(3)).abs() < 1e-14);
}

#[test]
fn integral_mean_refuses_untrusted_radius() {
    let f = builtin::z_over_one_minus(64);
    assert!(integral_mean(&f, Exponent::Finite(2.0), 0.99).is_err());
    assert!(integral_mean(&f, Exponent::Finite(2.0), 1.5).is_err());
    assert!(integral_mean(&f, Exponent::Finite(-1.0), 0.5).is_err());
}

#[test]
fn monomial_norms_match_moments() {
    let w0 = RadialWeight::standard(0.0).unwrap();
    for n in [0usize, 1, 4] {
        let zn = AnalyticSeries::monomial(n, n + 1);
        // α = 0: ‖z^n‖_p^p = 2/(np + 2)
        for p in [1.0, 2.0, 3.5] {
            let got = bergman_norm(&zn, p, &w0).unwrap().pth_power;
            let want = 2.0 / (n as f64 * p + 2.0);
            assert!(
                (got - want).abs() < 1e-8 * want,
                "n={n} p={p}: {got} vs {want}"
            );
        }
    }
    let w = RadialWeight::closed_form("exponential").unwrap();
    let z2 = AnalyticSeries::monomial(2, 3);
    let got = bergman_norm(&z2, 2.0, &w).unwrap().pth_power;
    let want = w.moment(2).unwrap();
    assert!((got - want).abs() < 1e-8 * want, "{got} vs {want}");
}

#[test]
fn pointwise_norm_agrees_with_series_norm() {
    let w = RadialWeight::standard(1.0).unwrap();
    let s = builtin::z_over_two_minus(128);
    let a = bergman_norm(&s, 2.0, &w).unwrap().value;
    let b = bergman_norm_fn(|z| z / (2.0 - z), 2.0, &w, 30)
        .unwrap()
        .value;
    assert!((a - b).abs() < 1e-6 * a, "{a} vs {b}");
}

#[test]
fn polynomial_and_zero_opening_memberships() {
    let w = RadialWeight::standard(0.0).unwrap();
    let z = AnalyticSeries::monomial(1, 2);
    let geo = SpiralGeometry::exact(c(1.0, 0.0), PI, 0.0).unwrap();
    let v = membership_test(&z, 7, 2.0, &w, &geo).unwrap();
    assert_eq!(
        (v.verdict, v.method),
        (Membership::In, MembershipMethod::Trivial)
    );

    let strip = SpiralGeometry::exact(c(1.0, 0.0), 0.0, 0.0).unwrap();
    let v = membership_test(&builtin::log_ratio(512), 40, 2.0, &w, &strip).unwrap();
    assert_eq!(
        (v.verdict, v.method),
        (Membership::In, MembershipMethod::ZeroOpening)
    );
}

#[test]
fn half_plane_powers_switch_at_the_threshold() {
    // h = z/(1-z) maps onto a half-plane; |h|^{kp} ~ |1-z|^{-kp} is integrable iff kp < 2
    let w = RadialWeight::standard(0.0).unwrap();
    let h = builtin::z_over_one_minus(512);
    let geo = SpiralGeometry::exact(c(1.0, 0.0), PI, 0.0).unwrap();
    let verdicts: Vec<_> = (1..=3)
        .map(|k| membership_test(&h, k, 1.0, &w, &geo).unwrap().verdict)
        .collect();
    assert_eq!(
        verdicts,
        [Membership::In, Membership::Inconclusive, Membership::Out]
    );
    // spiral angle reduces the effective opening by cos²(arg μ)
    let tilted = SpiralGeometry::exact(c(1.0, 1.0), PI, 0.0).unwrap();
    let v = membership_test(&h, 3, 1.0, &w, &tilted).unwrap();
    assert_eq!(v.verdict, Membership::In);
    assert!((v.witness - 1.5).abs() < 1e-12);
}

#[test]
fn rapidly_decreasing_weight_admits_every_power() {
    let w = RadialWeight::closed_form("exponential").unwrap();
    let h = builtin::z_over_one_minus(512);
    let geo = SpiralGeometry::exact(c(1.0, 0.0), PI, 0.0).unwrap();
    let v = membership_test(&h, 6, 2.0, &w, &geo).unwrap();
    assert_eq!(
        (v.verdict, v.method),
        (Membership::In, MembershipMethod::TruncatedIntegralGrowth)
    );
}

#[test]
fn point_evaluation_scale_for_unweighted_space() {
    let w = RadialWeight::standard(0.0).unwrap();
    for r in [0.0, 0.5, 0.99] {
        let got = point_eval_norm_estimate(c(r, 0.0), 2.0, &w).unwrap();
        assert!((got - 1.0 / (1.0 - r)).abs() < 1e-10 / (1.0 - r));
    }
    assert!(point_eval_norm_estimate(c(1.0, 0.0), 2.0, &w).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn test_function_is_one_at_its_center(r in 0.0f64..0.95, th in 0.0..std::f64::consts::TAU, p in 1.0f64..4.0, gamma in 0.5f64..6.0) {
        let a = Complex64::from_polar(r, th);
        let len = test_function_length(a, p, gamma);
        let f = test_function(a, p, gamma, len).unwrap();
        prop_assert!((f.eval(a) - 1.0).norm() < 1e-10);
        // smaller away from the center
        let s = (gamma + 1.0) / p;
        prop_assert!(f.eval(-a).norm() <= 1.0 + 1e-10);
        prop_assert!(f.eval(c(0.0, 0.0)).norm() <= (1.0 - r * r).powf(s) + 1e-12);
    }

    #[test]
    fn norm_scales_homogeneously(k in -3.0f64..3.0, p in 1.0f64..4.0) {
        let w = RadialWeight::standard(0.5).unwrap();
        let f = AnalyticSeries::from_real(&[1.0, -0.5, 0.25]);
        let a = bergman_norm(&f, p, &w).unwrap().value;
        let b = bergman_norm(&f.scale(c(k, 0.0)), p, &w).unwrap().value;
        prop_assert!((b - k.abs() * a).abs() < 1e-9 * (1.0 + b));
    }
}
