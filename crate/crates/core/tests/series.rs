use bergspec::series::{builtin, AnalyticSeries};
use bergspec::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn poly(max_deg: usize) -> impl Strategy<Value = AnalyticSeries> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..=max_deg + 1)
        .prop_map(|v| AnalyticSeries::polynomial(v.into_iter().map(|(a, b)| c(a, b)).collect()))
}

#[test]
fn builtins_have_known_values() {
    let z = c(0.3, 0.2);
    let n = 256;
    assert!((builtin::log_one_over_one_minus(n).eval(z) - (1.0 / (1.0 - z)).ln()).norm() < 1e-14);
    assert!((builtin::log_ratio(n).eval(z) - ((1.0 + z) / (1.0 - z)).ln()).norm() < 1e-14);
    assert!((builtin::z_over_one_minus(n).eval(z) - z / (1.0 - z)).norm() < 1e-14);
    assert!((builtin::koebe(n).eval(z) - z / ((1.0 - z) * (1.0 - z))).norm() < 1e-13);
    assert!((builtin::z_over_two_minus(n).eval(z) - z / (2.0 - z)).norm() < 1e-14);
}

#[test]
fn json_round_trip() {
    let s = builtin::log_ratio(32);
    let back = AnalyticSeries::from_json(&s.to_json()).unwrap();
    assert_eq!(back.coeffs(), s.coeffs());
    let p = AnalyticSeries::polynomial(vec![c(1.0, 0.0), c(0.0, 2.0)]);
    assert!(AnalyticSeries::from_json(&p.to_json())
        .unwrap()
        .is_polynomial());
}

#[test]
fn division_by_zero_constant_term_fails() {
    let a = AnalyticSeries::polynomial(vec![c(1.0, 0.0)]);
    let b = AnalyticSeries::polynomial(vec![c(0.0, 0.0), c(1.0, 0.0)]);
    assert!(a.div(&b).is_err());
    assert!(b.log().is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn multiplication_commutes(a in poly(12), b in poly(12)) {
        prop_assert!(a.mul(&b).coeff_distance(&b.mul(&a)) < 1e-13);
    }

    #[test]
    fn division_inverts_multiplication(a in poly(10), mut b in poly(10)) {
        let mut cb = b.coeffs().to_vec();
        cb[0] = c(2.0, 0.0) + cb[0] * 0.5;
        b = AnalyticSeries::polynomial(cb);
        let q = a.mul(&b).div_to(&b, 24).unwrap();
        prop_assert!(q.coeff_distance(&a.truncate(24)) < 1e-10);
    }

    #[test]
    fn exp_inverts_log(a in poly(8)) {
        // zero-free on the closed disk: Σ_{k>=1} |a_k| <= 1/2
        let mut ca = a.coeffs().to_vec();
        ca[0] = c(0.0, 0.0);
        let l1: f64 = ca.iter().map(|x| x.norm()).sum::<f64>().max(1e-300);
        let mut ca: Vec<Complex64> = ca.iter().map(|x| x * (0.5 / l1.max(0.5))).collect();
        ca[0] = c(1.0, 0.0);
        let u = AnalyticSeries::polynomial(ca).truncate(40);
        let back = u.log().unwrap().exp();
        prop_assert!(back.coeff_distance(&u) < 1e-9);
    }

    #[test]
    fn derivative_inverts_antiderivative(a in poly(15)) {
        prop_assert!(a.antiderivative().derivative().coeff_distance(&a) < 1e-14);
    }

    #[test]
    fn evaluation_matches_horner(a in poly(15), r in 0.0f64..0.95, t in 0.0..std::f64::consts::TAU) {
        let z = Complex64::from_polar(r, t);
        let direct = a.coeffs().iter().rev().fold(c(0.0, 0.0), |acc, k| acc * z + k);
        prop_assert!((a.eval(z) - direct).norm() < 1e-12);
    }

    #[test]
    fn composition_with_identity(a in poly(12)) {
        let id = AnalyticSeries::polynomial(vec![c(0.0, 0.0), c(1.0, 0.0)]).truncate(a.len() + 1);
        let padded = a.truncate(a.len() + 1);
        prop_assert!(padded.compose(&id).unwrap().coeff_distance(&padded) < 1e-14);
    }

    #[test]
    fn integer_power_matches_repeated_product(a in poly(5), k in 0usize..5) {
        let mut acc = AnalyticSeries::polynomial(vec![c(1.0, 0.0)]);
        for _ in 0..k {
            acc = acc.mul(&a);
        }
        prop_assert!(a.powi(k).coeff_distance(&acc) < 1e-11);
    }
}

#[test]
fn exact_polynomials_do_not_shorten_series() {
    let s = builtin::z_over_two_minus(64);
    let p = AnalyticSeries::from_real(&[1.0, -0.5, 0.25]);
    let p = AnalyticSeries::polynomial(p.coeffs().to_vec());
    assert_eq!(s.add(&p).len(), 64);
    assert_eq!(p.add(&s).len(), 64);
    assert_eq!(s.mul(&p).len(), 64);
    assert!(!s.add(&p).is_polynomial());
    assert_eq!(p.mul(&p).len(), 5);
    assert!(p.mul(&p).is_polynomial());
}
