use lwmy::lwmy::{LwmyFunction, Transform};
use proptest::prelude::*;

fn family() -> impl Strategy<Value = LwmyFunction> {
    let scale = 0.2f64..5.0;
    prop_oneof![
        scale.clone().prop_map(|a| LwmyFunction::reciprocal(a).unwrap()),
        (scale.clone(), scale.clone()).prop_map(|(a, b)| LwmyFunction::f1(a, b).unwrap()),
        (scale.clone(), scale.clone()).prop_map(|(a, b)| LwmyFunction::g1(a, b).unwrap()),
        (scale.clone(), scale.clone(), 0.1f64..10.0).prop_map(|(a, b, d)| LwmyFunction::fdelta_star(a, b, d).unwrap()),
    ]
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn function_inverse_round_trip(f in family(), x in 0.01f64..10.0) {
        let y = f.value(x);
        prop_assert!(close(f.eval_inverse(y).unwrap(), x, 1e-10));
        prop_assert!(close(f.inverse().value(y), x, 1e-10));
    }

    #[test]
    fn inverse_is_an_involution(f in family()) {
        prop_assert_eq!(f.inverse().inverse(), f);
    }

    #[test]
    fn strictly_decreasing(f in family(), x in 0.01f64..10.0, h in 1e-3f64..1.0) {
        prop_assert!(f.value(x + h) < f.value(x));
    }

    #[test]
    fn additive_round_trip(f in family(), x in 0.05f64..8.0, y in 0.05f64..8.0) {
        let t = Transform::Additive(f);
        let (u, v) = t.apply(x, y).unwrap();
        prop_assert!(u > 0.0 && v > 0.0);
        let (x2, y2) = t.apply_inverse(u, v).unwrap();
        prop_assert!(close(x2, x, 1e-8), "{} {} -> {} {}", x, y, x2, y2);
        prop_assert!(close(y2, y, 1e-8), "{} {} -> {} {}", x, y, x2, y2);
    }

    #[test]
    fn multiplicative_round_trip(f in family(), x in 0.01f64..0.95, y in 0.01f64..0.95) {
        // Outputs within 1e-6 of 1 carry too few significant digits to invert.
        let (s, r) = (-x.ln(), -y.ln());
        prop_assume!(f.value(s + r) > 1e-6 && f.decrement(s, r) > 1e-6);
        let t = Transform::Multiplicative(f);
        let (u, v) = t.apply(x, y).unwrap();
        prop_assert!(u > 0.0 && u < 1.0 && v > 0.0 && v < 1.0);
        let (x2, y2) = t.apply_inverse(u, v).unwrap();
        prop_assert!(close(x2, x, 1e-8) && close(y2, y, 1e-8), "{} {} -> {} {}", x, y, x2, y2);
    }

    #[test]
    fn uvprime_round_trip(u in 0.01f64..50.0, v in 0.01f64..50.0) {
        let (p, q) = Transform::UvPrime.apply(u, v).unwrap();
        prop_assert!(p > 0.0 && p < 1.0);
        let (u2, v2) = Transform::UvPrime.apply_inverse(p, q).unwrap();
        prop_assert!(close(u2, u, 1e-10) && close(v2, v, 1e-10));
    }

    #[test]
    fn text_form_round_trip(f in family()) {
        for t in [Transform::Additive(f), Transform::Multiplicative(f)] {
            let back: Transform = t.to_string().parse().unwrap();
            prop_assert_eq!(back.to_string(), t.to_string());
        }
    }
}
