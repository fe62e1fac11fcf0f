use bergspec::trend::Verdict;
use bergspec::weights::{RadialWeight, WeightSpec};
use bergspec::{Complex64, Error};
use proptest::prelude::*;

fn star_alpha0(r: f64) -> f64 {
    r * r / 4.0 - 0.25 - 0.5 * r.ln()
}

#[test]
fn standard_alpha0_closed_forms() {
    let w = RadialWeight::standard(0.0).unwrap();
    for r in [0.0, 0.1, 0.5, 0.9, 0.999, 0.999999] {
        assert!((w.tail_integral(r).unwrap() - (1.0 - r)).abs() < 1e-12);
        if r > 0.0 {
            assert!(
                (w.omega_star(r).unwrap() - star_alpha0(r)).abs() < 1e-12,
                "r = {r}"
            );
        }
    }
}

#[test]
fn standard_alpha1_tail() {
    // ∫_r^1 2(1 - s²) ds = 2(1 - r) - 2(1 - r³)/3
    let w = RadialWeight::standard(1.0).unwrap();
    for r in [0.2f64, 0.7, 0.99] {
        let exact = 2.0 * (1.0 - r) - 2.0 * (1.0 - r.powi(3)) / 3.0;
        assert!((w.tail_integral(r).unwrap() - exact).abs() < 1e-12);
    }
}

#[test]
fn moments_match_quadrature() {
    let spec = WeightSpec::Tabulated {
        // flat samples continue as a constant beyond the last radius
        r: (0..200).map(|i| i as f64 / 200.0).collect(),
        w: vec![1.0; 200],
    };
    let flat = RadialWeight::from_spec(&spec).unwrap();
    let standard = RadialWeight::standard(0.0).unwrap();
    for n in [0, 1, 5, 20] {
        let a = flat.moment(n).unwrap();
        let b = standard.moment(n).unwrap();
        assert!((a - b).abs() < 1e-9 * b, "n = {n}: {a} vs {b}");
        assert!((b - 1.0 / (n as f64 + 1.0)).abs() < 1e-15);
    }
}

#[test]
fn pseudo_disk_mass_example() {
    // Δ(1/2, 1/2) is the Euclidean disk of center 2/5 and radius 2/5
    let w = RadialWeight::standard(0.0).unwrap();
    let m = w.disk_mass(Complex64::new(0.5, 0.0), 0.5).unwrap();
    assert!((m - 0.16).abs() < 1e-8, "{m}");
}

#[test]
fn doubling_classes() {
    for alpha in [0.0, 1.0, 2.0] {
        let r = RadialWeight::standard(alpha)
            .unwrap()
            .doubling_report()
            .unwrap();
        assert_eq!(r.in_d(), Verdict::Yes, "alpha = {alpha}");
    }
    let r0 = RadialWeight::standard(0.0)
        .unwrap()
        .doubling_report()
        .unwrap();
    assert!((r0.c_hat - 2.0).abs() < 1e-6);
    let e = RadialWeight::closed_form("exponential")
        .unwrap()
        .doubling_report()
        .unwrap();
    assert_eq!(e.in_dhat, Verdict::No);
}

#[test]
fn invalid_weights_are_rejected() {
    assert!(matches!(
        RadialWeight::standard(-1.0),
        Err(Error::Config(_))
    ));
    assert!(matches!(
        RadialWeight::closed_form("nope"),
        Err(Error::Config(_))
    ));
    let w = RadialWeight::standard(0.0).unwrap();
    assert!(w.omega_star(0.0).is_err());
    assert!(w.tail_integral(1.5).is_err());
}

#[test]
fn weight_spec_json_round_trip() {
    let spec: WeightSpec = serde_json::from_str(r#"{"kind":"standard","alpha":1.5}"#).unwrap();
    assert_eq!(spec, WeightSpec::Standard { alpha: 1.5 });
    let back: WeightSpec = serde_json::from_str(&serde_json::to_string(&spec).unwrap()).unwrap();
    assert_eq!(back, spec);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn tail_is_nonincreasing(alpha in 0.0f64..3.0, r in 0.0f64..0.99, d in 0.0f64..0.009) {
        let w = RadialWeight::standard(alpha).unwrap();
        prop_assert!(w.tail_integral(r + d).unwrap() <= w.tail_integral(r).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn omega_star_sandwich(alpha in 0.0f64..3.0, r in 0.05f64..0.999) {
        // 0 <= ω*(r) <= log(1/r) ω̂(r), and ω* ≍ ω̂(r)(1-r) near the boundary
        let w = RadialWeight::standard(alpha).unwrap();
        let star = w.omega_star(r).unwrap();
        let hat = w.tail_integral(r).unwrap();
        prop_assert!(star > 0.0);
        prop_assert!(star <= (1.0 / r).ln() * hat * (1.0 + 1e-9));
        if r > 0.5 {
            let q = star / (hat * (1.0 - r));
            prop_assert!(q > 0.05 && q < 2.0, "ratio {}", q);
        }
    }

    #[test]
    fn moments_decrease(alpha in -0.5f64..4.0, n in 0usize..60) {
        let w = RadialWeight::standard(alpha).unwrap();
        prop_assert!(w.moment(n + 1).unwrap() < w.moment(n).unwrap());
    }
}
