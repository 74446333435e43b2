use std::f64::consts::PI;

use renvol::metric::RadialProfile;
use renvol::quad::{
    integrate, integrate_semi_infinite, integrate_sqrt_endpoint, Integral, QuadError, SingularEnd,
    Tolerance,
};
use renvol::volume::{renormalized_volume, volume_between};

type Case = (&'static str, fn(&Tolerance) -> Result<Integral, QuadError>, f64);

fn battery() -> Vec<Case> {
    vec![
        ("x^7", |t| integrate(|x| x.powi(7), 0.0, 1.0, t), 0.125),
        ("sin", |t| integrate(f64::sin, 0.0, PI, t), 2.0),
        ("exp", |t| integrate(f64::exp, -1.0, 2.0, t), 2f64.exp() - (-1f64).exp()),
        ("arctan'", |t| integrate(|x| 1.0 / (1.0 + x * x), 0.0, 1.0, t), PI / 4.0),
        ("peak", |t| integrate(|x| 1e-2 / (1e-4 + (x - 0.3).powi(2)), 0.0, 1.0, t), (70f64).atan() + (30f64).atan()),
        (
            "(1+x)/sqrt(x)",
            |t| integrate_sqrt_endpoint(|x| (1.0 + x) / x.sqrt(), 0.0, 1.0, SingularEnd::Lower, t),
            8.0 / 3.0,
        ),
        (
            "1/sqrt(1-x)",
            |t| integrate_sqrt_endpoint(|x| 1.0 / (1.0 - x).sqrt(), 0.0, 1.0, SingularEnd::Upper, t),
            2.0,
        ),
        ("x e^-2x", |t| integrate_semi_infinite(|x| x * (-2.0 * x).exp(), 0.0, 1.0, t), 0.25),
    ]
}

#[test]
fn refinement_tightens_error() {
    for (name, run, exact) in battery() {
        let mut last_evals = 0;
        for rel in [1e-6, 1e-8, 1e-10, 1e-12] {
            let tol = Tolerance::new(rel, 1e-15).unwrap();
            let r = run(&tol).unwrap_or_else(|e| panic!("{name} at {rel}: {e}"));
            let err = (r.value - exact).abs();
            assert!(err <= 10.0 * tol.target(exact), "{name} at {rel}: error {err}");
            assert!(r.evaluations >= last_evals, "{name}: fewer evaluations at {rel}");
            last_evals = r.evaluations;
        }
    }
}

/// Composite Simpson in `u = sqrt(s - s_h)`, with `f` factored exactly as
/// `d (s + s_h + m / (s s_h))` for the AdS profile.
fn brute_force_shell(m: f64, s_h: f64, width: f64, panels: usize) -> f64 {
    let g = |u: f64| {
        let d = u * u;
        let s = s_h + d;
        let q = s + s_h + m / (s * s_h);
        2.0 * 4.0 * PI * s * s / q.sqrt()
    };
    let (a, b) = (0.0, width.sqrt());
    let h = (b - a) / panels as f64;
    let mut sum = g(a) + g(b);
    for i in 1..panels {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * g(a + i as f64 * h);
    }
    sum * h / 3.0
}

#[test]
fn horizon_shell_matches_brute_force() {
    let tol = Tolerance::new(1e-12, 1e-15).unwrap();
    for m in [0.1, 2.0, 30.0] {
        let p = RadialProfile::ads_schwarzschild(m).unwrap();
        let s_h = p.horizon().unwrap().unwrap().radius;
        for width in [0.5, 3.0] {
            let v = volume_between(&p, s_h, s_h + width, &tol).unwrap().value;
            let brute = brute_force_shell(m, s_h, width, 1_000_000);
            assert!((v - brute).abs() <= 1e-8 * brute, "m = {m}, width {width}: {v} vs {brute}");
        }
    }
}

#[test]
fn results_are_bitwise_deterministic() {
    let tol = Tolerance::default();
    for p in [
        RadialProfile::ads_schwarzschild(2.0).unwrap(),
        RadialProfile::rn_ads(4.0, 1.0).unwrap(),
        RadialProfile::hyperbolic(),
    ] {
        let a = renormalized_volume(&p, &tol).unwrap();
        let b = renormalized_volume(&p, &tol).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.evaluations, b.evaluations);
    }
    for (_, run, _) in battery() {
        assert_eq!(run(&tol).unwrap(), run(&tol).unwrap());
    }
}
