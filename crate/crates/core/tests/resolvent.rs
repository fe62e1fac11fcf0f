use bergspec::resolvent::{
    apply_j, apply_l_h, apply_m_z, apply_p_h, apply_q_h, apply_r_h, apply_resolvent,
    bloch_little_o_test, boundary_agrees_with_bloch, circle_grid, generator_boundary_test,
    generator_boundary_test_fn, log_h_over_z, r_h_spectrum, resolvent_with, rh_to_cphi,
    BlochVerdict,
};
use bergspec::semigroup::{SemigroupSpec, SpiralGeometry};
use bergspec::series::{builtin, AnalyticSeries};
use bergspec::trend::Verdict;
use bergspec::weights::RadialWeight;
use bergspec::{Complex64, Error};
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn z() -> AnalyticSeries {
    AnalyticSeries::polynomial(vec![c(0.0, 0.0), c(1.0, 0.0)])
}

fn close(a: &AnalyticSeries, b: &AnalyticSeries, n: usize, tol: f64) -> bool {
    (0..n).all(|k| (a.coeff(k) - b.coeff(k)).norm() <= tol * (1.0 + b.coeff(k).norm()))
}

#[test]
fn operators_for_identity_symbol() {
    for n in 0..8 {
        let zn = AnalyticSeries::monomial(n, n + 1);
        let k = n as f64;
        assert!((apply_r_h(&z(), &zn).unwrap().coeff(n) - 1.0 / (k + 1.0)).norm() < 1e-15);
        assert!((apply_p_h(&z(), &zn).unwrap().coeff(n) - 1.0 / (k + 2.0)).norm() < 1e-15);
        assert!((apply_j(&zn).coeff(n) - 1.0 / (k + 1.0)).norm() < 1e-15);
        assert!(apply_l_h(&z(), &zn)
            .unwrap()
            .coeffs()
            .iter()
            .all(|x| x.norm() < 1e-15));
        let q = apply_q_h(&z(), &zn).unwrap();
        assert!(close(&q, &apply_j(&zn), n + 1, 1e-15));
        assert_eq!(apply_m_z(&zn).coeff(n + 1), c(1.0, 0.0));
    }
}

#[test]
fn r_h_solves_its_defining_equation() {
    // (h R_h f)' = f h'
    let h = builtin::log_ratio(128);
    let f = builtin::z_over_two_minus(128).add(&AnalyticSeries::constant(c(1.0, 0.0), 128));
    let g = apply_r_h(&h, &f).unwrap();
    let lhs = h.mul(&g).derivative();
    let rhs = f.mul(&h.derivative());
    assert!(close(&lhs, &rhs, 60, 1e-12));
}

#[test]
fn p_h_solves_its_defining_equation() {
    // (z h P_h f)' = z f h'
    let h = builtin::z_over_one_minus(128);
    let f = builtin::z_over_two_minus(128);
    let g = apply_p_h(&h, &f).unwrap();
    let lhs = h.mul_z().mul(&g).derivative();
    let rhs = f.mul_z().mul(&h.derivative());
    assert!(close(&lhs, &rhs, 60, 1e-12));
}

#[test]
fn operators_refuse_degenerate_symbols() {
    let f = AnalyticSeries::monomial(0, 4);
    let bad = AnalyticSeries::from_real(&[0.0, 0.0, 1.0]);
    assert!(apply_r_h(&bad, &f).is_err());
    assert!(log_h_over_z(&AnalyticSeries::from_real(&[0.1, 1.0])).is_err());
}

#[test]
fn resolvent_on_koenigs_powers() {
    // Γ h^k = k G'(0) h^k
    let spec = SemigroupSpec::builtin("example3").unwrap();
    let g = spec.gprime_b();
    let h = spec.h_series().truncate(96);
    let lambda = c(1.5, 0.7);
    for k in 0..4 {
        let hk = h.powi(k);
        let got = resolvent_with(&h, g, lambda, &hk).unwrap();
        let want = hk.scale(1.0 / (lambda - g * k as f64));
        assert!(close(&got, &want, 40, 1e-11), "k = {k}");
    }
}

#[test]
fn resolvent_at_mu_is_scaled_r_h() {
    let spec = SemigroupSpec::builtin("example2").unwrap();
    let mu = -spec.gprime_b();
    let f = builtin::z_over_two_minus(96);
    let a = apply_resolvent(&spec, mu, &f).unwrap();
    let b = apply_r_h(spec.h_series(), &f).unwrap().scale(1.0 / mu);
    assert!(close(&a, &b, 40, 1e-11));
    let one = AnalyticSeries::constant(c(1.0, 0.0), 8);
    let d = SemigroupSpec::dilation(1.0).unwrap();
    assert!((apply_resolvent(&d, c(2.0, 0.0), &one).unwrap().coeff(0) - 0.5).norm() < 1e-15);
    assert!(matches!(
        apply_resolvent(&d, c(-1.0, 0.0), &one),
        Err(Error::Domain(_))
    ));
}

#[test]
fn bloch_verdicts() {
    let zero = bloch_little_o_test(&log_h_over_z(&z()).unwrap(), 1e-8).unwrap();
    assert_eq!(zero.verdict, BlochVerdict::LittleO);
    // h = log(1/(1-z)): (1-r^2)|g'| decays like 1/log(1/(1-r))
    let slow = bloch_little_o_test(
        &log_h_over_z(&builtin::log_one_over_one_minus(4096)).unwrap(),
        1e-8,
    )
    .unwrap();
    assert_eq!(slow.verdict, BlochVerdict::LittleO, "{slow:?}");
    // h = z/(1-z): log(h/z) = log(1/(1-z)), Bloch constant 2
    let koebe = bloch_little_o_test(
        &log_h_over_z(&builtin::z_over_one_minus(4096)).unwrap(),
        1e-8,
    )
    .unwrap();
    assert_eq!(koebe.verdict, BlochVerdict::Bounded);
    assert!((koebe.limit - 2.0).abs() < 0.05, "{}", koebe.limit);
}

#[test]
fn boundary_test_on_synthetic_generators() {
    let grid = circle_grid(8);
    let vanishing = generator_boundary_test_fn(|w| Ok(-w * (1.0 - w)), &grid, 12).unwrap();
    assert_eq!(vanishing.divergent_everywhere, Verdict::No);
    let dil = generator_boundary_test(&SemigroupSpec::dilation(1.0).unwrap(), &grid, 12).unwrap();
    assert_eq!(dil.divergent_everywhere, Verdict::Yes);
    let bloch = bloch_little_o_test(&log_h_over_z(&z()).unwrap(), 1e-8).unwrap();
    assert_eq!(boundary_agrees_with_bloch(&dil, &bloch), Some(true));
    assert_eq!(boundary_agrees_with_bloch(&vanishing, &bloch), Some(false));
    assert!(generator_boundary_test_fn(Ok, &[c(0.5, 0.0)], 12).is_err());
}

#[test]
fn spectrum_of_r_z() {
    let w = RadialWeight::standard(0.0).unwrap();
    let geo = SpiralGeometry::exact(c(1.0, 0.0), 0.0, 0.0).unwrap();
    let bloch = bloch_little_o_test(&log_h_over_z(&z()).unwrap(), 1e-8).unwrap();
    let rep = r_h_spectrum(&z(), 2.0, &w, &geo, &bloch, 6, 12).unwrap();
    let pts = rep.points();
    assert_eq!(pts.len(), 8);
    for (k, p) in pts.iter().take(7).enumerate() {
        assert!((p - c(1.0 / (k as f64 + 1.0), 0.0)).norm() < 1e-15);
    }
    assert_eq!(pts[7], c(0.0, 0.0));
    assert!(rep.cross_check.unwrap().consistent);

    let h = builtin::z_over_one_minus(4096);
    let bounded = bloch_little_o_test(&log_h_over_z(&h).unwrap(), 1e-8).unwrap();
    assert!(matches!(
        r_h_spectrum(&h, 2.0, &w, &geo, &bounded, 6, 0),
        Err(Error::Refused(_))
    ));
}

#[test]
fn reciprocal_points_map_to_composition_eigenvalues() {
    let mu = c(1.0, 0.5);
    for k in 0..6 {
        let got = rh_to_cphi(c(1.0 / (k as f64 + 1.0), 0.0), mu, 0.8).unwrap();
        assert!((got - (-(mu * 0.8 * k as f64)).exp()).norm() < 1e-14);
    }
    assert!(rh_to_cphi(c(0.0, 0.0), mu, 1.0).is_none());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn j_and_m_z_are_mutual_inverses(coeffs in proptest::collection::vec(-1.0f64..1.0, 1..20)) {
        let f = AnalyticSeries::from_real(&coeffs);
        let g = apply_j(&apply_m_z(&f).derivative());
        prop_assert!(close(&g, &f, coeffs.len(), 1e-14));
    }

    #[test]
    fn r_h_is_linear(a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let h = builtin::log_ratio(64);
        let f = builtin::z_over_two_minus(64);
        let g = AnalyticSeries::from_real(&[1.0, -0.5, 0.25]);
        let lhs = apply_r_h(&h, &f.scale(c(a, 0.0)).add(&g.scale(c(b, 0.0)))).unwrap();
        let rhs = apply_r_h(&h, &f).unwrap().scale(c(a, 0.0)).add(&apply_r_h(&h, &g).unwrap().scale(c(b, 0.0)));
        prop_assert!(close(&lhs, &rhs, 40, 1e-12));
    }

    #[test]
    fn resolvent_identity(l1 in 0.5f64..4.0, l2 in 0.5f64..4.0) {
        // R(λ) - R(ν) = (ν - λ) R(λ) R(ν)
        prop_assume!((l1 - l2).abs() > 0.1);
        let spec = SemigroupSpec::builtin("example3").unwrap();
        let (h, g) = (spec.h_series().truncate(96), spec.gprime_b());
        let f = builtin::z_over_two_minus(96);
        let (a, b) = (c(l1, 0.0), c(l2, 0.3));
        let ra = resolvent_with(&h, g, a, &f).unwrap();
        let rb = resolvent_with(&h, g, b, &f).unwrap();
        let rab = resolvent_with(&h, g, a, &rb).unwrap();
        prop_assert!(close(&ra.sub(&rb), &rab.scale(b - a), 30, 1e-9));
    }
}
