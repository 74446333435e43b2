//! The acceptance battery run by `renvol verify` and by the `acceptance`
//! test target. Each criterion returns a pass/fail flag and a one-line
//! summary of what it measured.

use std::f64::consts::PI;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::comparison::{
    di_eps_dalpha, di_lower_bound, i_alpha, i_eps, lemma_aux_margin, sweep_monotonicity,
    verify_theorem, IAlphaSpec, Verdict,
};
use crate::metric::{
    hawking_mass, hawking_mass_slope, mass_for_horizon_radius, s0_of_m, scalar_curvature,
    RadialProfile,
};
use crate::quad::Tolerance;
use crate::volume::{
    check_iso_identity, corollary_lower_bound, prop_volume_lower_bound, renormalized_volume,
    volume_between, FlowTime,
};

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionOutcome {
    pub id: u8,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for CriterionOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {:>2} {} {}: {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail
        )
    }
}

/// Collects failed sub-checks of one criterion.
struct Checks {
    failures: Vec<String>,
    count: usize,
}

impl Checks {
    fn new() -> Checks {
        Checks {
            failures: Vec::new(),
            count: 0,
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.count += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn fail(&mut self, what: String) {
        self.count += 1;
        self.failures.push(what);
    }

    fn finish(self, id: u8, name: &'static str, summary: String) -> CriterionOutcome {
        let passed = self.failures.is_empty();
        let detail = if passed {
            format!("{} checks; {summary}", self.count)
        } else {
            let shown: Vec<_> = self.failures.iter().take(3).cloned().collect();
            format!(
                "{} of {} checks failed: {}",
                self.failures.len(),
                self.count,
                shown.join("; ")
            )
        };
        CriterionOutcome {
            id,
            name,
            passed,
            detail,
        }
    }
}

fn tol() -> Tolerance {
    Tolerance::default()
}

fn log_points(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| (a.ln() + (b.ln() - a.ln()) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Charged profiles with a horizon and `c > 0`.
const CHARGED: [(f64, f64); 10] = [
    (1.0, 0.05),
    (2.0, 0.1),
    (2.0, 0.5),
    (3.0, 0.2),
    (4.0, 1.0),
    (5.0, 1.0),
    (6.0, 2.0),
    (8.0, 1.0),
    (10.0, 3.0),
    (20.0, 5.0),
];

pub fn horizon_exactness() -> CriterionOutcome {
    let mut c = Checks::new();
    for (m, s) in [(2.0, 1.0), (30.0, 3.0)] {
        match s0_of_m(m) {
            Ok(r) => c.check((r - s).abs() <= 1e-12, || format!("s0({m}) = {r}")),
            Err(e) => c.fail(format!("s0({m}): {e}")),
        }
    }
    let mut worst: f64 = 0.0;
    for m in log_points(1e-3, 1e3, 50) {
        match s0_of_m(m) {
            Ok(s) => {
                let f = 1.0 + s * s - m / s;
                worst = worst.max(f.abs());
                c.check(f.abs() <= 1e-12, || format!("f_m(s0) = {f:e} at m = {m}"));
            }
            Err(e) => c.fail(format!("s0({m}): {e}")),
        }
    }
    c.finish(1, "horizon exactness", format!("max |f_m(s0)| = {worst:.1e}"))
}

pub fn hawking_mass_constancy() -> CriterionOutcome {
    let mut c = Checks::new();
    let mut worst_spread: f64 = 0.0;
    for m in [0.5, 1.0, 2.0, 5.0] {
        let run = || -> Result<(f64, f64, f64), String> {
            let p = RadialProfile::ads_schwarzschild(m).map_err(|e| e.to_string())?;
            let s0 = s0_of_m(m).map_err(|e| e.to_string())?;
            let h = p.horizon().map_err(|e| e.to_string())?.ok_or("no horizon")?;
            let values: Vec<f64> = log_points(h.radius, 1e3, 200)
                .into_iter()
                .map(|s| hawking_mass(&p, s))
                .collect::<Result<_, _>>()
                .map_err(|e| e.to_string())?;
            let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let area = 4.0 * PI * s0 * s0;
            let at_horizon = 4.0 * area.sqrt() * (area + 4.0 * PI);
            Ok(((hi - lo) / hi.abs(), values[0], at_horizon))
        };
        match run() {
            Ok((spread, first, expected)) => {
                worst_spread = worst_spread.max(spread);
                c.check(spread < 1e-8, || format!("spread {spread:e} at m = {m}"));
                let rel = (first - expected).abs() / expected;
                c.check(rel <= 1e-10, || {
                    format!("m_H(s0) = {first} vs 4 A^(1/2) (A + 4 pi) = {expected} at m = {m}")
                });
            }
            Err(e) => c.fail(format!("m = {m}: {e}")),
        }
    }
    c.finish(
        2,
        "Hawking mass constancy",
        format!("max relative spread {worst_spread:.1e}"),
    )
}

/// `R = 2 (1 - f - s f') / s^2` with `f'` from a five-point stencil on a
/// hand-written profile.
fn curvature_oracle(f: impl Fn(f64) -> f64, s: f64) -> f64 {
    let h = 2e-4 * s;
    let df = (f(s - 2.0 * h) - 8.0 * f(s - h) + 8.0 * f(s + h) - f(s + 2.0 * h)) / (12.0 * h);
    2.0 * (1.0 - f(s) - s * df) / (s * s)
}

pub fn scalar_curvature_identity() -> CriterionOutcome {
    let mut c = Checks::new();
    let mut worst: f64 = 0.0;
    let mut record = |c: &mut Checks, label: &str, s: f64, got: f64, want: f64| {
        let err = (got - want).abs();
        worst = worst.max(err);
        c.check(err <= 1e-9, || format!("{label}: R({s}) = {got}, expected {want}"));
    };

    let hyperbolic = RadialProfile::hyperbolic();
    for s in log_points(1e-2, 1e4, 60) {
        match scalar_curvature(&hyperbolic, s) {
            Ok(r) => record(&mut c, "hyperbolic", s, r, -6.0),
            Err(e) => c.fail(format!("hyperbolic at {s}: {e}")),
        }
    }
    for m in [0.1, 0.5, 1.0, 2.0, 5.0, 30.0] {
        let p = match RadialProfile::ads_schwarzschild(m) {
            Ok(p) => p,
            Err(e) => {
                c.fail(format!("ads m = {m}: {e}"));
                continue;
            }
        };
        // the manifold is s >= s_h
        for s in log_points(s0_of_m(m).unwrap_or(1e-2), 1e4, 60) {
            match scalar_curvature(&p, s) {
                Ok(r) => record(&mut c, "ads", s, r, -6.0),
                Err(e) => c.fail(format!("ads m = {m} at {s}: {e}")),
            }
        }
    }
    for (m, q) in CHARGED.iter().copied().chain([(4.0, -1.0), (2.0, -0.3)]) {
        let p = match RadialProfile::rn_ads(m, q) {
            Ok(p) => p,
            Err(e) => {
                c.fail(format!("rn-ads ({m}, {q}): {e}"));
                continue;
            }
        };
        let f = |s: f64| 1.0 + s * s - m / s + q / (s * s);
        for s in log_points(0.5, 1e3, 40) {
            let exact = -6.0 + 2.0 * q / s.powi(4);
            record(&mut c, "fd oracle", s, curvature_oracle(f, s), exact);
            match scalar_curvature(&p, s) {
                Ok(r) => record(&mut c, "rn-ads", s, r, exact),
                Err(e) => c.fail(format!("rn-ads ({m}, {q}) at {s}: {e}")),
            }
        }
    }
    c.finish(3, "scalar curvature", format!("max |R - R_exact| = {worst:.1e}"))
}

pub fn iso_identity() -> CriterionOutcome {
    let mut c = Checks::new();
    let mut worst: f64 = 0.0;
    for m in [0.5, 1.0, 2.0, 5.0] {
        for tau in [0.5f64, 1.0, 2.0, 4.0] {
            let top = s0_of_m(m).map(|s0| s0 * (0.5 * tau).exp());
            match top.map_err(Into::into).and_then(|top| check_iso_identity(m, top, &tol())) {
                Ok(r) => {
                    worst = worst.max(r.rel_err);
                    c.check(r.rel_err < 1e-8, || {
                        format!("rel_err {:e} at m = {m}, tau = {tau}", r.rel_err)
                    });
                }
                Err(e) => c.fail(format!("m = {m}, tau = {tau}: {e}")),
            }
        }
    }
    c.finish(4, "coordinate-sphere identity", format!("max rel_err {worst:.1e}"))
}

fn flow_volume(p: &RadialProfile, tau: f64) -> Result<(f64, f64), String> {
    let h = p.horizon().map_err(|e| e.to_string())?.ok_or("no horizon")?;
    let top = FlowTime::new(&h, tau).map_err(|e| e.to_string())?.radius;
    let vol = volume_between(p, h.radius, top, &tol()).map_err(|e| e.to_string())?;
    Ok((vol.value, h.area))
}

pub fn prop_bound_equality() -> CriterionOutcome {
    let mut c = Checks::new();
    let mut worst: f64 = 0.0;
    let profiles = [
        RadialProfile::ads_schwarzschild(0.5),
        RadialProfile::ads_schwarzschild(2.0),
        RadialProfile::ads_schwarzschild(10.0),
        RadialProfile::rn_ads(4.0, 1.0),
        RadialProfile::rn_ads(2.0, 0.1),
    ];
    for p in profiles {
        let p = match p {
            Ok(p) => p,
            Err(e) => {
                c.fail(e.to_string());
                continue;
            }
        };
        for tau in [0.5, 2.0, 4.0] {
            let bound = prop_volume_lower_bound(&p, tau, &tol()).map_err(|e| e.to_string());
            match flow_volume(&p, tau).and_then(|v| Ok((v.0, bound?.value))) {
                Ok((vol, bound)) => {
                    let rel = (vol - bound).abs() / vol;
                    worst = worst.max(rel);
                    c.check(rel < 1e-8, || {
                        format!("{}: bound {bound} vs volume {vol} at tau = {tau}", p.label())
                    });
                }
                Err(e) => c.fail(format!("{} at tau = {tau}: {e}", p.label())),
            }
        }
    }
    c.finish(5, "flow bound equality", format!("max relative gap {worst:.1e}"))
}

pub fn corollary_ordering() -> CriterionOutcome {
    let mut c = Checks::new();
    let mut smallest_strict = f64::INFINITY;
    let cases = [(0.5, 0.0), (2.0, 0.0), (5.0, 0.0), (2.0, 0.1), (4.0, 1.0), (10.0, 3.0)];
    for (m, q) in cases {
        let p = if q == 0.0 {
            RadialProfile::ads_schwarzschild(m)
        } else {
            RadialProfile::rn_ads(m, q)
        };
        let p = match p {
            Ok(p) => p,
            Err(e) => {
                c.fail(e.to_string());
                continue;
            }
        };
        for tau in [1.0, 3.0] {
            let result = flow_volume(&p, tau).and_then(|(vol, area)| {
                let bound = corollary_lower_bound(area, tau, &tol()).map_err(|e| e.to_string())?;
                Ok((2.0 * vol, bound.value))
            });
            match result {
                Ok((twice, bound)) => {
                    c.check(bound <= twice * (1.0 + 1e-10), || {
                        format!("{}: bound {bound} > 2 vol {twice} at tau = {tau}", p.label())
                    });
                    let rel = (twice - bound) / twice;
                    if q == 0.0 {
                        c.check(rel.abs() <= 1e-8, || {
                            format!("{}: no equality at tau = {tau} (gap {rel:e})", p.label())
                        });
                    } else {
                        smallest_strict = smallest_strict.min(rel);
                        c.check(rel > 1e-8, || {
                            format!("{}: gap {rel:e} not strict at tau = {tau}", p.label())
                        });
                    }
                }
                Err(e) => c.fail(format!("{} at tau = {tau}: {e}", p.label())),
            }
        }
    }
    c.finish(
        6,
        "corollary ordering",
        format!("smallest relative gap for c > 0: {smallest_strict:.3e}"),
    )
}

pub fn renormalized_volume_checks() -> CriterionOutcome {
    let mut c = Checks::new();
    match renormalized_volume(&RadialProfile::hyperbolic(), &tol()) {
        Ok(r) => c.check(r.value.abs() <= 1e-9, || format!("V(hyperbolic) = {}", r.value)),
        Err(e) => c.fail(format!("hyperbolic: {e}")),
    }
    let mut worst: f64 = 0.0;
    for m in [0.5, 2.0, 5.0] {
        let r = RadialProfile::ads_schwarzschild(m)
            .map_err(|e| e.to_string())
            .and_then(|p| renormalized_volume(&p, &tol()).map_err(|e| e.to_string()));
        match r {
            Ok(r) => {
                worst = worst.max(r.stability);
                c.check(r.stability < 1e-6, || format!("stability {:e} at m = {m}", r.stability));
            }
            Err(e) => c.fail(format!("m = {m}: {e}")),
        }
    }
    match sweep_monotonicity(&log_points(0.1, 10.0, 20), &tol()) {
        Ok(s) => c.check(s.increasing, || "V(m) not increasing on the grid".into()),
        Err(e) => c.fail(format!("sweep: {e}")),
    }
    c.finish(
        7,
        "renormalized volume",
        format!("max |V(1e3) - V(1e4)| = {worst:.1e}"),
    )
}

pub fn appendix_suite() -> CriterionOutcome {
    let mut c = Checks::new();
    let t = tol();
    let spec = |a: f64, alpha: f64, eps: f64| IAlphaSpec::new(a, alpha, eps).map_err(|e| e.to_string());

    match spec(4.0 * PI, 0.0, 0.0).and_then(|s| i_alpha(&s, &t).map_err(|e| e.to_string())) {
        Ok(v) => c.check(v.abs() <= 1e-12, || format!("I(0) = {v}")),
        Err(e) => c.fail(format!("I(0): {e}")),
    }

    for a_bar in [PI, 4.0 * PI, 40.0 * PI] {
        let mut prev = 0.0;
        for k in 1..=12 {
            let alpha = 0.25 * k as f64;
            match spec(a_bar, alpha, 0.0).and_then(|s| i_alpha(&s, &t).map_err(|e| e.to_string())) {
                Ok(v) => {
                    c.check(v > prev, || {
                        format!("I({alpha}) = {v} not above {prev} for A_bar = {a_bar}")
                    });
                    prev = v;
                }
                Err(e) => c.fail(format!("I({alpha}), A_bar = {a_bar}: {e}")),
            }
        }
    }

    for (a_bar, alpha) in [(4.0 * PI, 1.0), (PI, 2.0), (40.0 * PI, 0.5)] {
        let base = spec(a_bar, alpha, 0.0).and_then(|s| i_alpha(&s, &t).map_err(|e| e.to_string()));
        let gaps: Result<Vec<f64>, String> = [1e-2, 1e-3, 1e-4, 1e-5]
            .iter()
            .map(|&eps| {
                let v = i_eps(&spec(a_bar, alpha, eps)?, &t).map_err(|e| e.to_string())?;
                Ok((v - base.clone()?).abs())
            })
            .collect();
        match gaps {
            Ok(g) => c.check(g.windows(2).all(|w| w[1] < w[0]), || {
                format!("|I_eps - I| not shrinking at A_bar = {a_bar}, alpha = {alpha}: {g:?}")
            }),
            Err(e) => c.fail(e),
        }
    }

    match (lemma_aux_margin(1e-4, 1.0, &t), lemma_aux_margin(1.0, 1.0, &t)) {
        (Ok(small), Ok(large)) => {
            c.check(small > 0.0, || format!("margin(1e-4, 1) = {small}"));
            c.check(large < 0.0, || format!("margin(1, 1) = {large}"));
        }
        (a, b) => c.fail(format!("lemma margins: {a:?}, {b:?}")),
    }
    for (eps, mu) in [(1e-4, 1.0), (0.05, 2.0), (1.0, 1.0)] {
        for lambda in [0.1, 10.0] {
            match (lemma_aux_margin(eps, mu, &t), lemma_aux_margin(lambda * eps, lambda * mu, &t)) {
                (Ok(base), Ok(scaled)) => {
                    let want = base / lambda.sqrt();
                    c.check((scaled - want).abs() <= 1e-10 * want.abs(), || {
                        format!("scaling off at eps = {eps}, mu = {mu}, lambda = {lambda}: {scaled} vs {want}")
                    });
                }
                (a, b) => c.fail(format!("lemma scaling: {a:?}, {b:?}")),
            }
        }
    }

    let mut worst_ratio = f64::INFINITY;
    for a_bar in [PI, 4.0 * PI, 40.0 * PI] {
        for alpha in [0.0, 0.25, 1.0, 2.0, 3.0] {
            let scale = a_bar + 4.0 * PI / 3.0 * (-alpha as f64).exp();
            for ratio in [1e-4, 1e-6, 1e-8] {
                match spec(a_bar, alpha, ratio * scale)
                    .and_then(|s| di_eps_dalpha(&s, &t).map_err(|e| e.to_string()))
                {
                    Ok(d) => {
                        worst_ratio = worst_ratio.min(d.value / di_lower_bound(a_bar, alpha));
                        c.check(d.satisfied, || {
                            format!(
                                "dI/dalpha = {} below {} at A_bar = {a_bar}, alpha = {alpha}, ratio {ratio}",
                                d.value, d.lower_bound
                            )
                        });
                    }
                    Err(e) => c.fail(format!("dI/dalpha at A_bar = {a_bar}, alpha = {alpha}: {e}")),
                }
            }
        }
    }
    c.finish(
        8,
        "appendix suite",
        format!("smallest dI/dalpha over its bound: {worst_ratio:.4}"),
    )
}

pub fn main_theorem() -> CriterionOutcome {
    let mut c = Checks::new();
    let t = tol();
    let mut smallest_margin = f64::INFINITY;
    for (m, q) in CHARGED {
        let report = RadialProfile::rn_ads(m, q).map_err(|e| e.to_string()).and_then(|p| {
            let h = p.horizon().map_err(|e| e.to_string())?.ok_or("no horizon")?;
            verify_theorem(&p, mass_for_horizon_radius(h.radius), &t).map_err(|e| e.to_string())
        });
        match report {
            Ok(r) => {
                let margin = r.margin.unwrap_or(f64::NAN);
                smallest_margin = smallest_margin.min(margin);
                c.check(r.verdict == Verdict::Holds && margin > 0.0, || {
                    format!("({m}, {q}): verdict {} margin {margin}", r.verdict)
                });
                let chain = r.chain_bound.unwrap_or(f64::NAN);
                c.check(2.0 * margin >= chain - 1e-6, || {
                    format!("({m}, {q}): 2 margin {} below {chain}", 2.0 * margin)
                });
            }
            Err(e) => c.fail(format!("({m}, {q}): {e}")),
        }
    }

    let self_cmp = RadialProfile::ads_schwarzschild(2.0)
        .map_err(|e| e.to_string())
        .and_then(|p| verify_theorem(&p, 2.0, &t).map_err(|e| e.to_string()));
    match self_cmp {
        Ok(r) => {
            let margin = r.margin.unwrap_or(f64::NAN);
            c.check(r.verdict == Verdict::Equality && margin.abs() <= 1e-8, || {
                format!("self comparison: verdict {} margin {margin}", r.verdict)
            });
        }
        Err(e) => c.fail(format!("self comparison: {e}")),
    }

    let negative = RadialProfile::rn_ads(4.0, -1.0)
        .map_err(|e| e.to_string())
        .and_then(|p| verify_theorem(&p, 4.0, &t).map_err(|e| e.to_string()));
    match negative {
        Ok(r) => {
            let w = r.hypotheses.scalar_curvature;
            c.check(
                r.verdict == Verdict::HypothesisFailed && !w.ok && w.min_value < -6.0,
                || format!("c = -1: verdict {} with R = {} at {}", r.verdict, w.min_value, w.witness),
            );
        }
        Err(e) => c.fail(format!("c = -1: {e}")),
    }

    // a model smaller than the profile exercises alpha > 0
    let smaller = RadialProfile::rn_ads(6.0, 2.0).map_err(|e| e.to_string()).and_then(|p| {
        verify_theorem(&p, 2.0, &t).map_err(|e| e.to_string())
    });
    match smaller {
        Ok(r) => {
            let (margin, chain) = (r.margin.unwrap_or(f64::NAN), r.chain_bound.unwrap_or(f64::NAN));
            c.check(r.verdict == Verdict::Holds && 2.0 * margin >= chain - 1e-6, || {
                format!("rn-ads(6, 2) vs m = 2: verdict {}, 2 margin {} vs {chain}", r.verdict, 2.0 * margin)
            });
        }
        Err(e) => c.fail(format!("rn-ads(6, 2) vs m = 2: {e}")),
    }

    c.finish(
        9,
        "main theorem end to end",
        format!("smallest margin over the charged battery {smallest_margin:.3e}"),
    )
}

pub fn monotonicity_identity() -> CriterionOutcome {
    let mut c = Checks::new();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst: f64 = 0.0;
    let mut profiles = 0;
    while profiles < 20 {
        let m = rng.gen_range(0.5..10.0);
        let q: f64 = rng.gen_range(-2.0..2.0);
        if q.abs() < 0.01 {
            continue;
        }
        let p = match RadialProfile::rn_ads(m, q) {
            Ok(p) => p,
            Err(e) => {
                c.fail(e.to_string());
                break;
            }
        };
        let h = match p.horizon() {
            Ok(Some(h)) => h,
            Ok(None) => continue,
            Err(e) => {
                c.fail(e.to_string());
                break;
            }
        };
        profiles += 1;

        for _ in 0..10 {
            let s = (rng.gen_range(h.radius.ln()..100f64.ln())).exp();
            let lhs = p
                .deviation(s)
                .and_then(|d| Ok(d + s * p.deviation_derivative(s)?));
            let rhs = scalar_curvature(&p, s).map(|r| 0.5 * s * s * (r + 6.0));
            match (lhs, rhs) {
                (Ok(l), Ok(r)) => {
                    let err = (l - r).abs() / l.abs().max(1.0);
                    worst = worst.max(err);
                    c.check(err <= 1e-9, || format!("m = {m}, c = {q}, s = {s}: {l} vs {r}"));
                }
                (l, r) => c.fail(format!("m = {m}, c = {q}, s = {s}: {l:?}, {r:?}")),
            }
        }

        let grid = log_points(h.radius, 100.0, 40);
        let masses: Result<Vec<f64>, _> = grid.iter().map(|&s| hawking_mass(&p, s)).collect();
        let slopes: Result<Vec<f64>, _> = grid.iter().map(|&s| hawking_mass_slope(&p, s)).collect();
        match (masses, slopes) {
            (Ok(mh), Ok(ds)) => {
                let increasing = mh.windows(2).all(|w| w[1] > w[0]);
                let decreasing = mh.windows(2).all(|w| w[1] < w[0]);
                c.check(increasing == (q > 0.0) && decreasing == (q < 0.0), || {
                    format!("m = {m}, c = {q}: sampled Hawking mass monotonicity does not follow sign(c)")
                });
                c.check(ds.iter().all(|&d| d.signum() == q.signum()), || {
                    format!("m = {m}, c = {q}: Hawking mass slope has the wrong sign")
                });
            }
            (a, b) => c.fail(format!("m = {m}, c = {q}: {a:?}, {b:?}")),
        }
    }
    c.finish(
        10,
        "monotonicity and curvature identity",
        format!("{profiles} random profiles, max relative residual {worst:.1e}"),
    )
}

/// Every criterion, in order.
pub fn run_all() -> Vec<CriterionOutcome> {
    vec![
        horizon_exactness(),
        hawking_mass_constancy(),
        scalar_curvature_identity(),
        iso_identity(),
        prop_bound_equality(),
        corollary_ordering(),
        renormalized_volume_checks(),
        appendix_suite(),
        main_theorem(),
        monotonicity_identity(),
    ]
}
