use proptest::prelude::*;

use renvol::comparison::{lemma_aux_margin, IAlphaSpec};
use renvol::expr::{Bindings, Expression, Func};
use renvol::metric::{s0_of_m, scalar_curvature, RadialProfile};
use renvol::quad::Tolerance;
use renvol::volume::renormalized_volume_unchecked;

fn leaf() -> impl Strategy<Value = Expression> {
    prop_oneof![
        (-4.0f64..4.0).prop_map(Expression::Const),
        (1u32..200).prop_map(|k| Expression::Const(k as f64 / 8.0)),
        Just(Expression::Var),
        prop::sample::select(vec!["a", "b"]).prop_map(|n| Expression::Param(n.into())),
    ]
}

fn tree() -> impl Strategy<Value = Expression> {
    leaf().prop_recursive(4, 24, 2, |inner| {
        let bx = |e: Expression| Box::new(e);
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(move |(a, b)| Expression::Add(bx(a), bx(b))),
            (inner.clone(), inner.clone()).prop_map(move |(a, b)| Expression::Sub(bx(a), bx(b))),
            (inner.clone(), inner.clone()).prop_map(move |(a, b)| Expression::Mul(bx(a), bx(b))),
            (inner.clone(), inner.clone()).prop_map(move |(a, b)| Expression::Div(bx(a), bx(b))),
            (inner.clone(), -3i32..=3).prop_map(move |(a, n)| Expression::Pow(bx(a), n)),
            inner.clone().prop_map(move |a| Expression::Neg(bx(a))),
            (inner, prop::sample::select(vec![Func::Exp, Func::Log, Func::Sqrt]))
                .prop_map(move |(a, f)| Expression::Call(f, bx(a))),
        ]
    })
}

fn bindings(a: f64, b: f64) -> Bindings {
    Bindings::from([("a".to_string(), a), ("b".to_string(), b)])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn print_parse_round_trip(e in tree(), s in -5.0f64..5.0, a in -3.0f64..3.0, b in 0.1f64..3.0) {
        let printed = e.to_string();
        let back = Expression::parse(&printed).unwrap();
        let params = bindings(a, b);
        match (e.eval(s, &params), back.eval(s, &params)) {
            (Ok(x), Ok(y)) => prop_assert_eq!(x.to_bits(), y.to_bits(), "{} at s = {}", printed, s),
            (Err(_), Err(_)) => {}
            (x, y) => prop_assert!(false, "{}: {:?} vs {:?}", printed, x, y),
        }
    }

    #[test]
    fn derivative_matches_central_difference(
        coeffs in prop::collection::vec(-3.0f64..3.0, 7),
        (g, k, w) in (-2.0f64..2.0, -1.0f64..1.0, -2.0f64..2.0),
        s in 0.5f64..4.0,
    ) {
        // Laurent polynomial plus smooth transcendental terms, built as text
        let mut text = String::from("0");
        for (i, c) in coeffs.iter().enumerate() {
            text.push_str(&format!(" + ({c})*s^({})", i as i32 - 3));
        }
        text.push_str(" + g*exp(k*s) + w*sqrt(s) - log(s)*w + sqrt(1 + s^2)/s");
        let e = Expression::parse(&text).unwrap();
        let params = Bindings::from([("g".to_string(), g), ("k".to_string(), k), ("w".to_string(), w)]);
        let h = 1e-5 * s.abs().max(1.0);
        let fd = (e.eval(s + h, &params).unwrap() - e.eval(s - h, &params).unwrap()) / (2.0 * h);
        let d = e.derivative().eval(s, &params).unwrap();
        prop_assert!((d - fd).abs() <= 1e-6 * d.abs().max(1.0), "{text}: {d} vs {fd}");
    }

    #[test]
    fn hawking_slope_identity(m in 0.1f64..20.0, c in -3.0f64..3.0, s in 0.5f64..100.0) {
        let p = RadialProfile::rn_ads(m, c).unwrap();
        let lhs = p.deviation(s).unwrap() + s * p.deviation_derivative(s).unwrap();
        let rhs = 0.5 * s * s * (scalar_curvature(&p, s).unwrap() + 6.0);
        prop_assert!((lhs - rhs).abs() <= 1e-9 * lhs.abs().max(1.0), "{lhs} vs {rhs}");
        prop_assert!((lhs - c / (s * s)).abs() <= 1e-12 * lhs.abs().max(1.0));
    }

    #[test]
    fn ads_horizon_is_increasing_root(m1 in 1e-3f64..1e3, factor in 1.001f64..10.0) {
        let (a, b) = (s0_of_m(m1).unwrap(), s0_of_m(m1 * factor).unwrap());
        prop_assert!(b > a);
        prop_assert!((1.0 + a * a - m1 / a).abs() <= 1e-12);
        prop_assert!(2.0 * a + m1 / (a * a) > 0.0);
    }

    #[test]
    fn lemma_margin_scaling(rho in 1e-6f64..2.0, mu in 0.01f64..100.0, lambda in 0.01f64..100.0) {
        let tol = Tolerance::default();
        let base = lemma_aux_margin(rho * mu, mu, &tol).unwrap();
        let scaled = lemma_aux_margin(lambda * rho * mu, lambda * mu, &tol).unwrap();
        let want = base / lambda.sqrt();
        prop_assert!((scaled - want).abs() <= 1e-10 * want.abs().max(1e-6 / mu.sqrt()), "{scaled} vs {want}");
    }

    #[test]
    fn ialpha_input_validation(a in -1.0f64..1.0, alpha in -1.0f64..1.0, eps in -1.0f64..1.0) {
        let ok = a > 0.0 && alpha >= 0.0 && eps >= 0.0;
        prop_assert_eq!(IAlphaSpec::new(a, alpha, eps).is_ok(), ok);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn exhaustion_independence(m in 0.1f64..20.0, c in 0.0f64..1.0) {
        let tol = Tolerance::default();
        let p = RadialProfile::rn_ads(m, c * m / 4.0).unwrap();
        prop_assume!(p.horizon().unwrap().is_some());
        let v1 = renormalized_volume_unchecked(&p, 1e3, &tol).unwrap();
        let v2 = renormalized_volume_unchecked(&p, 2e3, &tol).unwrap();
        prop_assert!((v1 - v2).abs() <= 10.0 * tol.target(v1.abs().max(1.0)), "{v1} vs {v2}");
    }
}

#[test]
fn second_derivative_of_square() {
    let e = Expression::parse("s^2").unwrap();
    assert_eq!(e.derivative().derivative(), Expression::Const(2.0));
    let c = Expression::parse("c").unwrap();
    assert_eq!(c.derivative(), Expression::Const(0.0));
}
