//! Rotationally symmetric metrics `g = f(s)^{-1} ds^2 + s^2 g_{S^2}` and the
//! pointwise geometry of their coordinate spheres.
//!
//! Every quantity in this class reduces to the profile `f` and its
//! derivatives:
//!
//! * area of the sphere of radius `s`: `4 pi s^2`,
//! * mean curvature: `H = 2 sqrt(f) / s`,
//! * scalar curvature: `R = 2 (1 - f - s f') / s^2`,
//! * Hawking mass: `m_H = 32 pi^{3/2} s (1 + s^2 - f)`.
//!
//! The Hawking mass follows the unnormalized convention
//! `m_H(S) = area(S)^{1/2} (16 pi - int_S (H^2 - 4))`; there is no
//! `(16 pi)^{-3/2}` prefactor. With it the Anti-deSitter-Schwarzschild
//! profile `1 + s^2 - m/s` has `m_H = 32 pi^{3/2} m` on every sphere.

use std::f64::consts::PI;
use std::sync::OnceLock;

use thiserror::Error;

use crate::expr::{Bindings, EvalError, Expression};
use crate::quad::{find_root_bracketed, find_root_newton, QuadError};

/// Decay exponent used by the built-in families when none is given.
pub const DEFAULT_DELTA: f64 = 0.2;

/// Geometric scan for horizons: `HORIZON_SCAN_POINTS` points on
/// `(HORIZON_SCAN_MIN, HORIZON_SCAN_MAX]`.
pub const HORIZON_SCAN_MIN: f64 = 1e-6;
pub const HORIZON_SCAN_MAX: f64 = 1e3;
pub const HORIZON_SCAN_POINTS: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error("mass must be positive, got {0}")]
    NonPositiveMass(f64),
    #[error("decay exponent must lie in (0, 1/4), got {0}")]
    InvalidDelta(f64),
    #[error("parameter `{0}` is not bound")]
    UnboundParameter(String),
    #[error("radius must be positive, got {0}")]
    NonPositiveRadius(f64),
    #[error("profile is negative at s = {s} (f = {f})")]
    NegativeProfile { s: f64, f: f64 },
    #[error("radius {s} lies inside the horizon s_h = {horizon}")]
    BelowHorizon { s: f64, horizon: f64 },
    #[error("not asymptotically hyperbolic: f(s) = {f} <= 0 at s = {s}")]
    NotAsymptoticallyHyperbolic { s: f64, f: f64 },
}

/// Outermost minimal coordinate sphere: the largest root of `f`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Horizon {
    pub radius: f64,
    /// `4 pi s_h^2`
    pub area: f64,
    /// `f'(s_h)`, positive for a nondegenerate horizon.
    pub slope: f64,
    /// `f''(s_h)`, used for the near-horizon expansion of `f`.
    pub curvature: f64,
}

impl Horizon {
    /// `f(s_h + d)` from the second order Taylor expansion at the horizon.
    pub fn profile_near(&self, d: f64) -> f64 {
        d * (self.slope + 0.5 * self.curvature * d)
    }
}

/// A profile function `f` together with its parameter bindings, the decay
/// exponent `delta` of the asymptotic hypothesis and a display label.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    label: String,
    f: Expression,
    df: Expression,
    d2f: Expression,
    deviation: Expression,
    d_deviation: Expression,
    deviation_reduced: bool,
    params: Bindings,
    delta: f64,
    horizon: OnceLock<Result<Option<Horizon>, MetricError>>,
}

impl RadialProfile {
    pub fn new(
        label: impl Into<String>,
        f: Expression,
        params: Bindings,
        delta: f64,
    ) -> Result<RadialProfile, MetricError> {
        if !(delta > 0.0 && delta < 0.25) {
            return Err(MetricError::InvalidDelta(delta));
        }
        if let Some(name) = f.params().into_iter().find(|p| !params.contains_key(p)) {
            return Err(MetricError::UnboundParameter(name));
        }
        let df = f.derivative();
        let d2f = df.derivative();
        let (deviation, deviation_reduced) = f.hyperbolic_deviation_reduced();
        let d_deviation = deviation.derivative();
        Ok(RadialProfile {
            label: label.into(),
            f,
            df,
            d2f,
            deviation,
            d_deviation,
            deviation_reduced,
            params,
            delta,
            horizon: OnceLock::new(),
        })
    }

    /// Hyperbolic space, `f = 1 + s^2`.
    pub fn hyperbolic() -> RadialProfile {
        let f = Expression::parse("1 + s^2").expect("builtin profile");
        RadialProfile::new("hyperbolic", f, Bindings::new(), DEFAULT_DELTA)
            .expect("builtin profile")
    }

    /// Anti-deSitter-Schwarzschild, `f = 1 + s^2 - m/s`.
    pub fn ads_schwarzschild(m: f64) -> Result<RadialProfile, MetricError> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(MetricError::NonPositiveMass(m));
        }
        let f = Expression::parse("1 + s^2 - m/s").expect("builtin profile");
        RadialProfile::new(
            format!("ads(m={m})"),
            f,
            Bindings::from([("m".to_string(), m)]),
            DEFAULT_DELTA,
        )
    }

    /// The charged family `f = 1 + s^2 - m/s + c/s^2`, with scalar curvature
    /// `-6 + 2c/s^4`.
    pub fn rn_ads(m: f64, c: f64) -> Result<RadialProfile, MetricError> {
        if !(m > 0.0 && m.is_finite()) {
            return Err(MetricError::NonPositiveMass(m));
        }
        let f = Expression::parse("1 + s^2 - m/s + c/s^2").expect("builtin profile");
        RadialProfile::new(
            format!("rn-ads(m={m},c={c})"),
            f,
            Bindings::from([("m".to_string(), m), ("c".to_string(), c)]),
            DEFAULT_DELTA,
        )
    }

    pub fn with_delta(self, delta: f64) -> Result<RadialProfile, MetricError> {
        RadialProfile::new(self.label, self.f, self.params, delta)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn expression(&self) -> &Expression {
        &self.f
    }

    pub fn params(&self) -> &Bindings {
        &self.params
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn f(&self, s: f64) -> Result<f64, MetricError> {
        Ok(self.f.eval(s, &self.params)?)
    }

    pub fn df(&self, s: f64) -> Result<f64, MetricError> {
        Ok(self.df.eval(s, &self.params)?)
    }

    pub fn d2f(&self, s: f64) -> Result<f64, MetricError> {
        Ok(self.d2f.eval(s, &self.params)?)
    }

    /// `1 + s^2 - f(s)`, evaluated from the cancelled form when possible.
    pub fn deviation(&self, s: f64) -> Result<f64, MetricError> {
        Ok(self.deviation.eval(s, &self.params)?)
    }

    pub fn deviation_derivative(&self, s: f64) -> Result<f64, MetricError> {
        Ok(self.d_deviation.eval(s, &self.params)?)
    }

    /// Whether [`deviation`](Self::deviation) is free of the `s^2`
    /// cancellation (true for profiles written as `1 + s^2 + ...`).
    pub fn deviation_is_reduced(&self) -> bool {
        self.deviation_reduced
    }

    /// Cached [`horizon`].
    pub fn horizon(&self) -> Result<Option<Horizon>, MetricError> {
        self.horizon.get_or_init(|| horizon(self)).clone()
    }

    fn check_outside_horizon(&self, s: f64) -> Result<(), MetricError> {
        if !(s > 0.0) {
            return Err(MetricError::NonPositiveRadius(s));
        }
        if let Some(h) = self.horizon()? {
            if s < h.radius * (1.0 - 1e-12) {
                return Err(MetricError::BelowHorizon {
                    s,
                    horizon: h.radius,
                });
            }
        }
        Ok(())
    }
}

/// The unique positive root of `s^3 + s - m`, i.e. the horizon radius of the
/// Anti-deSitter-Schwarzschild metric of mass `m`.
pub fn s0_of_m(m: f64) -> Result<f64, MetricError> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(MetricError::NonPositiveMass(m));
    }
    let hi = m.cbrt().max(1.0) + 1.0;
    Ok(find_root_newton(
        |s| (s * s * s + s - m, 3.0 * s * s + 1.0),
        0.0,
        hi,
        1e-15,
    )?)
}

/// Horizon area of the Anti-deSitter-Schwarzschild metric of mass `m`.
pub fn ads_horizon_area(m: f64) -> Result<f64, MetricError> {
    let s0 = s0_of_m(m)?;
    Ok(4.0 * PI * s0 * s0)
}

/// Mass whose Anti-deSitter-Schwarzschild horizon has radius `s`.
pub fn mass_for_horizon_radius(s: f64) -> f64 {
    s * s * s + s
}

fn scan_radius(i: usize) -> f64 {
    let span = (HORIZON_SCAN_MAX / HORIZON_SCAN_MIN).ln();
    let frac = i as f64 / (HORIZON_SCAN_POINTS - 1) as f64;
    if i + 1 == HORIZON_SCAN_POINTS {
        HORIZON_SCAN_MAX
    } else {
        HORIZON_SCAN_MIN * (span * frac).exp()
    }
}

/// Locate the outermost root of `f` by a geometric sign scan followed by
/// bracketed refinement. `None` when `f > 0` throughout the scanned range
/// (or down to the edge of its domain).
pub fn horizon(p: &RadialProfile) -> Result<Option<Horizon>, MetricError> {
    let outer = p.f(HORIZON_SCAN_MAX)?;
    if !(outer > 0.0) {
        return Err(MetricError::NotAsymptoticallyHyperbolic {
            s: HORIZON_SCAN_MAX,
            f: outer,
        });
    }

    let mut above = HORIZON_SCAN_MAX;
    let mut bracket = None;
    for i in (0..HORIZON_SCAN_POINTS - 1).rev() {
        let s = scan_radius(i);
        let Ok(value) = p.f(s) else {
            // left the domain of f without a sign change
            break;
        };
        if value <= 0.0 {
            bracket = Some((s, above));
            break;
        }
        above = s;
    }
    let Some((lo, hi)) = bracket else {
        return Ok(None);
    };

    let radius = find_root_bracketed(
        |s| p.f(s).unwrap_or(f64::NAN),
        lo,
        hi,
        1e-14,
    )?;

    // beyond the scan range, f must stay positive up to 10^3 s_h
    if radius * 1e3 > HORIZON_SCAN_MAX {
        let n = 200;
        let ratio = (radius * 1e3 / HORIZON_SCAN_MAX).ln();
        for i in 1..=n {
            let s = HORIZON_SCAN_MAX * (ratio * i as f64 / n as f64).exp();
            let value = p.f(s)?;
            if !(value > 0.0) {
                return Err(MetricError::NotAsymptoticallyHyperbolic { s, f: value });
            }
        }
    }

    Ok(Some(Horizon {
        radius,
        area: 4.0 * PI * radius * radius,
        slope: p.df(radius)?,
        curvature: p.d2f(radius)?,
    }))
}

/// `R(s) = 2 (1 - f - s f') / s^2`.
pub fn scalar_curvature(p: &RadialProfile, s: f64) -> Result<f64, MetricError> {
    if !(s > 0.0) {
        return Err(MetricError::NonPositiveRadius(s));
    }
    let f = p.f(s)?;
    let df = p.df(s)?;
    Ok(2.0 * (1.0 - f - s * df) / (s * s))
}

/// Mean curvature `2 sqrt(f) / s` of the coordinate sphere of radius `s`.
pub fn sphere_mean_curvature(p: &RadialProfile, s: f64) -> Result<f64, MetricError> {
    if !(s > 0.0) {
        return Err(MetricError::NonPositiveRadius(s));
    }
    let f = p.f(s)?;
    if f < 0.0 {
        return Err(MetricError::NegativeProfile { s, f });
    }
    Ok(2.0 * f.sqrt() / s)
}

/// Hawking mass of the coordinate sphere of radius `s` (unnormalized, see
/// the module documentation).
pub fn hawking_mass(p: &RadialProfile, s: f64) -> Result<f64, MetricError> {
    p.check_outside_horizon(s)?;
    Ok(32.0 * PI.powf(1.5) * s * p.deviation(s)?)
}

/// `d/ds m_H(s)`, which equals `16 pi^{3/2} s^2 (R + 6)`.
pub fn hawking_mass_slope(p: &RadialProfile, s: f64) -> Result<f64, MetricError> {
    p.check_outside_horizon(s)?;
    Ok(32.0 * PI.powf(1.5) * (p.deviation(s)? + s * p.deviation_derivative(s)?))
}

/// Outcome of the sampled decay check `|g - g_hyp| = O(s^{-2-4 delta})`.
#[derive(Debug, Clone, PartialEq)]
pub struct AsymptoticsReport {
    pub pass: bool,
    /// Fitted exponent of `|g - g_hyp|`; `-inf` when the deviation vanishes
    /// on the whole grid.
    pub measured_rate: f64,
    /// `-(2 + 4 delta)`
    pub required_rate: f64,
    pub samples_used: usize,
    /// Sampled trend of `s |d/ds (1 + s^2 - f)| / f`: true when it does not
    /// grow across the grid. Reported only; this is not a certificate.
    pub derivative_trend_ok: bool,
}

pub const ASYMPTOTIC_FIT_TOLERANCE: f64 = 0.05;

/// Fit the decay rate of `|g - g_hyp|_{g_hyp} = |1 + s^2 - f| / f` on a
/// logarithmic grid `s in [1e2, 1e6]`.
pub fn validate_asymptotics(p: &RadialProfile) -> Result<AsymptoticsReport, MetricError> {
    const N: usize = 41;
    let required_rate = -(2.0 + 4.0 * p.delta());
    let mut xs = Vec::with_capacity(N);
    let mut ys = Vec::with_capacity(N);
    let mut trend = Vec::with_capacity(N);
    for i in 0..N {
        let s = 1e2 * 10f64.powf(4.0 * i as f64 / (N - 1) as f64);
        let f = p.f(s)?;
        if !(f > 0.0) {
            return Err(MetricError::NotAsymptoticallyHyperbolic { s, f });
        }
        let dev = p.deviation(s)?;
        trend.push(s * p.deviation_derivative(s)?.abs() / f);
        // without the symbolic cancellation, deviations below the rounding
        // level of 1 + s^2 are noise
        let resolved =
            p.deviation_is_reduced() || dev.abs() > 1e3 * f64::EPSILON * (1.0 + s * s);
        if dev != 0.0 && resolved {
            xs.push(s.ln());
            ys.push((dev.abs() / f).ln());
        }
    }
    let derivative_trend_ok = trend.last() <= trend.first().map(|t| t * (1.0 + 1e-9)).as_ref();

    let measured_rate = if xs.len() < 2 {
        f64::NEG_INFINITY
    } else {
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        sxy / sxx
    };
    Ok(AsymptoticsReport {
        pass: measured_rate <= required_rate + ASYMPTOTIC_FIT_TOLERANCE,
        measured_rate,
        required_rate,
        samples_used: xs.len(),
        derivative_trend_ok,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, steps: usize) -> f64 {
        for _ in 0..steps {
            let m = 0.5 * (a + b);
            if f(m).signum() == f(a).signum() {
                a = m;
            } else {
                b = m;
            }
        }
        0.5 * (a + b)
    }

    #[test]
    fn ads_horizons() {
        assert!((s0_of_m(2.0).unwrap() - 1.0).abs() < 1e-15);
        assert!((s0_of_m(30.0).unwrap() - 3.0).abs() < 3e-15);
        let oracle = bisect(|s| s * s * s + s - 1.0, 0.0, 1.0, 60);
        assert!((s0_of_m(1.0).unwrap() - oracle).abs() < 1e-12 * oracle);
        assert!(matches!(s0_of_m(0.0), Err(MetricError::NonPositiveMass(_))));
        assert!(matches!(
            RadialProfile::ads_schwarzschild(0.0),
            Err(MetricError::NonPositiveMass(_))
        ));

        let h = RadialProfile::ads_schwarzschild(2.0).unwrap().horizon().unwrap().unwrap();
        assert!((h.radius - 1.0).abs() < 1e-13);
        assert!((h.area - 4.0 * PI).abs() < 1e-12);
        let h = RadialProfile::ads_schwarzschild(30.0).unwrap().horizon().unwrap().unwrap();
        assert!((h.radius - 3.0).abs() < 1e-13);
    }

    #[test]
    fn hyperbolic_has_no_horizon() {
        assert_eq!(RadialProfile::hyperbolic().horizon().unwrap(), None);
    }

    #[test]
    fn outermost_root_of_charged_profile() {
        let p = RadialProfile::rn_ads(4.0, 1.0).unwrap();
        let f = |s: f64| 1.0 + s * s - 4.0 / s + 1.0 / (s * s);
        assert!(f(1.2) < 0.0 && f(1.3) > 0.0);
        let oracle = bisect(f, 1.2, 1.3, 60);
        let h = p.horizon().unwrap().unwrap();
        assert!((h.radius - oracle).abs() < 1e-13);
        assert!(p.f(h.radius).unwrap().abs() < 1e-12 * h.radius.powi(2).max(1.0));
        // inner root exists as well: f > 0 near s = 0.1
        assert!(f(0.1) > 0.0 && f(0.5) < 0.0);
    }

    #[test]
    fn not_asymptotically_hyperbolic() {
        let f = Expression::parse("1 - s^2").unwrap();
        let p = RadialProfile::new("bad", f, Bindings::new(), 0.1).unwrap();
        assert!(matches!(
            p.horizon(),
            Err(MetricError::NotAsymptoticallyHyperbolic { .. })
        ));
    }

    #[test]
    fn construction_errors() {
        let f = Expression::parse("1 + s^2 - m/s").unwrap();
        assert_eq!(
            RadialProfile::new("x", f.clone(), Bindings::new(), 0.1).unwrap_err(),
            MetricError::UnboundParameter("m".into())
        );
        let b = Bindings::from([("m".to_string(), 1.0)]);
        assert!(RadialProfile::new("x", f.clone(), b.clone(), 0.25).is_err());
        assert!(RadialProfile::new("x", f, b, 0.0).is_err());
    }

    #[test]
    fn curvature_examples() {
        let hyp = RadialProfile::hyperbolic();
        assert!((scalar_curvature(&hyp, 1.7).unwrap() + 6.0).abs() < 1e-14);
        let ads = RadialProfile::ads_schwarzschild(2.0).unwrap();
        assert!((scalar_curvature(&ads, 3.0).unwrap() + 6.0).abs() < 1e-13);
        let rn = RadialProfile::rn_ads(4.0, 1.0).unwrap();
        assert!((scalar_curvature(&rn, 1.0).unwrap() + 4.0).abs() < 1e-13);
        assert!(scalar_curvature(&rn, 0.0).is_err());
    }

    #[test]
    fn mean_curvature_examples() {
        let ads = RadialProfile::ads_schwarzschild(2.0).unwrap();
        assert!(sphere_mean_curvature(&ads, 1.0).unwrap().abs() < 1e-14);
        let hyp = RadialProfile::hyperbolic();
        assert!((sphere_mean_curvature(&hyp, 1.0).unwrap() - 2.0 * 2f64.sqrt()).abs() < 1e-15);
        assert!((sphere_mean_curvature(&hyp, 1e6).unwrap() - 2.0).abs() < 1e-11);
        assert!(matches!(
            sphere_mean_curvature(&ads, 0.5),
            Err(MetricError::NegativeProfile { .. })
        ));
    }

    #[test]
    fn hawking_mass_examples() {
        let ads = RadialProfile::ads_schwarzschild(2.0).unwrap();
        let expected = 64.0 * PI.powf(1.5);
        for s in [1.0, 2.0, 5.0, 50.0] {
            let m = hawking_mass(&ads, s).unwrap();
            assert!((m - expected).abs() < 1e-12 * expected, "s = {s}: {m}");
        }
        // horizon formula 4 A^{1/2} (A + 4 pi) with A = 4 pi
        let a = 4.0 * PI;
        assert!((hawking_mass(&ads, 1.0).unwrap() - 4.0 * a.sqrt() * (a + 4.0 * PI)).abs() < 1e-10);
        assert!(matches!(
            hawking_mass(&ads, 0.5),
            Err(MetricError::BelowHorizon { .. })
        ));
        assert_eq!(hawking_mass(&RadialProfile::hyperbolic(), 3.0).unwrap(), 0.0);
    }

    #[test]
    fn hawking_mass_from_its_definition() {
        // area^{1/2} (16 pi - int (H^2 - 4) dmu) with a constant integrand on the sphere
        let p = RadialProfile::rn_ads(3.0, 0.5).unwrap();
        for s in [1.5, 4.0, 20.0] {
            let area = 4.0 * PI * s * s;
            let h = sphere_mean_curvature(&p, s).unwrap();
            let direct = area.sqrt() * (16.0 * PI - area * (h * h - 4.0));
            let m = hawking_mass(&p, s).unwrap();
            assert!((m - direct).abs() < 1e-9 * direct.abs(), "{m} vs {direct}");
        }
    }

    #[test]
    fn asymptotics() {
        let ads = RadialProfile::ads_schwarzschild(2.0).unwrap();
        let r = validate_asymptotics(&ads).unwrap();
        assert!(r.pass, "{r:?}");
        assert!((r.measured_rate + 3.0).abs() < 1e-3);
        assert!(r.derivative_trend_ok);

        let r = validate_asymptotics(&RadialProfile::hyperbolic()).unwrap();
        assert!(r.pass);
        assert_eq!(r.measured_rate, f64::NEG_INFINITY);

        let slow = RadialProfile::new(
            "slow",
            Expression::parse("1 + s^2 - s").unwrap(),
            Bindings::new(),
            0.1,
        )
        .unwrap();
        // |g - g_hyp| ~ s^{-1} by direct evaluation at 1e3 and 1e4
        let h = |s: f64| s / (1.0 + s * s - s);
        let oracle_rate = (h(1e4) / h(1e3)).log10();
        assert!((oracle_rate + 1.0).abs() < 1e-3);
        let r = validate_asymptotics(&slow).unwrap();
        assert!(!r.pass);
        assert!((r.measured_rate - oracle_rate).abs() < 1e-2);
    }

    #[test]
    fn asymptotics_without_symbolic_cancellation() {
        // s*s does not cancel structurally against s^2; the noise filter keeps
        // the fit on resolved samples
        let f = Expression::parse("1 + s*s - m/s").unwrap();
        let p = RadialProfile::new("ads-alt", f, Bindings::from([("m".into(), 2.0)]), 0.2).unwrap();
        assert!(!p.deviation_is_reduced());
        let r = validate_asymptotics(&p).unwrap();
        assert!(r.pass, "{r:?}");
    }
}
