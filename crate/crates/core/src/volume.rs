//! Volumes of coordinate-sphere regions and the volume bounds along the
//! inverse mean curvature flow.
//!
//! In the rotationally symmetric class the flow starting at the horizon moves
//! through coordinate spheres, `s(t) = s_h e^{t/2}`, so the flow bounds become
//! one-dimensional integrals in `t` that can be compared against the metric
//! volume `int 4 pi s^2 f^{-1/2} ds`.

use std::f64::consts::PI;

use thiserror::Error;

use crate::metric::{hawking_mass, s0_of_m, Horizon, MetricError, RadialProfile};
use crate::quad::{
    integrate, integrate_sqrt_offset, inv_sqrt_difference, Integral, QuadError, Tolerance,
};

/// Default truncation radius for the renormalized volume.
pub const DEFAULT_TRUNCATION_RADIUS: f64 = 1e3;

/// Below this distance from the horizon (relative to `max(1, s_h)`) the
/// profile is evaluated from its Taylor expansion at the horizon.
const NEAR_HORIZON: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VolumeError {
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error("profile has no horizon")]
    NoHorizon,
    #[error("invalid radial range [{s1}, {s2}]")]
    InvalidRange { s1: f64, s2: f64 },
    #[error("profile is not positive at s = {s} (f = {f}) inside the integration range")]
    NonPositiveProfile { s: f64, f: f64 },
    #[error("flow time must be finite and nonnegative, got {0}")]
    InvalidFlowTime(f64),
    #[error("area must be positive, got {0}")]
    InvalidArea(f64),
    #[error("flow is not mean convex at t = {t}: 4 e^t A + 16 pi - e^(-t/2) A^(-1/2) m_H = {inner}")]
    NotMeanConvex { t: f64, inner: f64 },
    #[error(
        "Hawking mass form of the flow integrand ({from_mass}) disagrees with 16 pi f ({from_profile}) at t = {t}"
    )]
    CrossCheck {
        t: f64,
        from_mass: f64,
        from_profile: f64,
    },
    #[error(
        "renormalized volume depends on the truncation radius: |V(r) - V(10 r)| = {stability} > {threshold} (V(r) = {value})"
    )]
    Unstable {
        value: f64,
        stability: f64,
        threshold: f64,
    },
    #[error("decay exponent must lie in (0, 1/4), got {0}")]
    InvalidDelta(f64),
}

/// A time along the symmetric flow from the horizon.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowTime {
    pub t: f64,
    /// `s_h e^{t/2}`
    pub radius: f64,
}

impl FlowTime {
    pub fn new(horizon: &Horizon, t: f64) -> Result<FlowTime, VolumeError> {
        if !(t >= 0.0 && t.is_finite()) {
            return Err(VolumeError::InvalidFlowTime(t));
        }
        Ok(FlowTime {
            t,
            radius: horizon.radius * (0.5 * t).exp(),
        })
    }

    /// Flow time at which the sphere of radius `s` is reached.
    pub fn at_radius(horizon: &Horizon, s: f64) -> Result<FlowTime, VolumeError> {
        FlowTime::new(horizon, 2.0 * (s / horizon.radius).ln())
    }

    /// Area of the flow surface, `4 pi s^2 = e^t A`.
    pub fn area(&self) -> f64 {
        4.0 * PI * self.radius * self.radius
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenVolResult {
    pub value: f64,
    pub truncation_radius: f64,
    pub tail_correction: f64,
    /// `V(10 r)`
    pub check_value: f64,
    /// `|V(r) - V(10 r)|`
    pub stability: f64,
    pub evaluations: usize,
}

fn require_horizon(p: &RadialProfile) -> Result<Horizon, VolumeError> {
    p.horizon()?.ok_or(VolumeError::NoHorizon)
}

/// `f(s_h + d)`, switching to the horizon expansion when `d` is tiny so that
/// the value keeps full relative precision.
fn profile_from_horizon(p: &RadialProfile, h: &Horizon, d: f64) -> Result<f64, MetricError> {
    if d <= NEAR_HORIZON * h.radius.max(1.0) {
        Ok(h.profile_near(d))
    } else {
        p.f(h.radius + d)
    }
}

fn is_at_horizon(h: Option<&Horizon>, s: f64) -> bool {
    h.is_some_and(|h| (s - h.radius).abs() <= 1e-12 * h.radius.max(1.0))
}

/// Runs `integrate` with an integrand that may fail; the first failure is
/// reported instead of the quadrature's non-finite error.
fn guarded<F, Q>(mut integrand: F, quadrature: Q) -> Result<Integral, VolumeError>
where
    F: FnMut(f64) -> Result<f64, VolumeError>,
    Q: FnOnce(&mut dyn FnMut(f64) -> f64) -> Result<Integral, QuadError>,
{
    let mut failure = None;
    let mut wrapped = |x: f64| match integrand(x) {
        Ok(v) => v,
        Err(e) => {
            failure.get_or_insert(e);
            f64::NAN
        }
    };
    let result = quadrature(&mut wrapped);
    match (result, failure) {
        (_, Some(e)) => Err(e),
        (r, None) => Ok(r?),
    }
}

fn positive(s: f64, f: f64) -> Result<f64, VolumeError> {
    if f > 0.0 {
        Ok(f)
    } else {
        Err(VolumeError::NonPositiveProfile { s, f })
    }
}

/// Geometric breakpoints from `a` to `b` with ratio at most 4.
fn breakpoints(a: f64, b: f64) -> Vec<f64> {
    let mut out = vec![a];
    let mut x = a;
    while x * 4.0 < b {
        x *= 4.0;
        out.push(x);
    }
    out.push(b);
    out
}

/// Metric volume `int_{s1}^{s2} 4 pi s^2 f^{-1/2} ds` of the shell between two
/// coordinate spheres. The square root singularity at a horizon is removed
/// by substitution.
pub fn volume_between(
    p: &RadialProfile,
    s1: f64,
    s2: f64,
    tol: &Tolerance,
) -> Result<Integral, VolumeError> {
    if !(s1 >= 0.0 && s1 <= s2 && s2.is_finite()) {
        return Err(VolumeError::InvalidRange { s1, s2 });
    }
    let horizon = p.horizon()?;
    if let Some(h) = &horizon {
        if s1 < h.radius * (1.0 - 1e-12) {
            return Err(MetricError::BelowHorizon {
                s: s1,
                horizon: h.radius,
            }
            .into());
        }
    }
    if s1 == s2 {
        return Ok(Integral::ZERO);
    }
    if let Some(h) = horizon.filter(|h| is_at_horizon(Some(h), s1)) {
        let start = h.radius;
        return guarded(
            |d| {
                let s = start + d;
                let f = positive(s, profile_from_horizon(p, &h, d)?)?;
                Ok(4.0 * PI * s * s / f.sqrt())
            },
            |g| integrate_sqrt_offset(g, start, s2, tol),
        );
    }
    guarded(
        |s| {
            let f = positive(s, p.f(s)?)?;
            Ok(4.0 * PI * s * s / f.sqrt())
        },
        |g| integrate(g, s1, s2, tol),
    )
}

/// Renormalized volume truncated at `r`, with the asymptotic tail beyond `r`
/// added back. Returns `(value, tail, evaluations)`.
fn truncated_renormalized_volume(
    p: &RadialProfile,
    r: f64,
    tol: &Tolerance,
) -> Result<(f64, f64, usize), VolumeError> {
    let horizon = p.horizon()?;
    let start = horizon.map_or(0.0, |h| h.radius);
    if !(r > start) {
        return Err(VolumeError::InvalidRange { s1: start, s2: r });
    }

    // 4 pi s^2 (f^{-1/2} - (1 + s^2)^{-1/2}) as one difference, via 1 + s^2 - f
    let difference = |s: f64, f: f64| -> Result<f64, VolumeError> {
        let f = positive(s, f)?;
        let y = 1.0 + s * s;
        Ok(4.0 * PI * s * s * inv_sqrt_difference(f, y, p.deviation(s)?))
    };

    let mut total = Integral::ZERO;
    let mut lower = start;
    if let Some(h) = horizon {
        let width = h.radius.max(1.0).min(r - h.radius);
        total = total.combine(guarded(
            |d| difference(h.radius + d, profile_from_horizon(p, &h, d)?),
            |g| integrate_sqrt_offset(g, h.radius, h.radius + width, tol),
        )?);
        lower = h.radius + width;
    } else if lower == 0.0 {
        let first = r.min(1.0);
        total = total.combine(guarded(
            |s| difference(s, p.f(s)?),
            |g| integrate(g, 0.0, first, tol),
        )?);
        lower = first;
    }
    for w in breakpoints(lower, r).windows(2) {
        total = total.combine(guarded(
            |s| difference(s, p.f(s)?),
            |g| integrate(g, w[0], w[1], tol),
        )?);
    }

    // hyperbolic volume of the excised ball {s <= s_h}
    if start > 0.0 {
        let ball = integrate(|s| 4.0 * PI * s * s / (1.0 + s * s).sqrt(), 0.0, start, tol)?;
        total = total.combine(ball.scale(-1.0));
    }

    let tail = tail_beyond(p, r)?;
    Ok((total.value + tail, tail, total.evaluations))
}

/// Integral of the renormalized-volume integrand over `[r, inf)` from its
/// large-s expansion. The deviation `1 + s^2 - f` is modelled as
/// `a/s + b/s^2` with coefficients matched at `r` and `2r`; the leading term
/// `2 pi a / r` is the mass-aspect tail.
fn tail_beyond(p: &RadialProfile, r: f64) -> Result<f64, VolumeError> {
    let at_r = r * p.deviation(r)?;
    let at_2r = 2.0 * r * p.deviation(2.0 * r)?;
    let b = 2.0 * r * (at_r - at_2r);
    let a = at_r - b / r;
    let (r2, r3, r4) = (r * r, r * r * r, r * r * r * r);
    Ok(2.0 * PI * (a / r + b / (2.0 * r2) - a / (2.0 * r3) - 3.0 * b / (8.0 * r4))
        + 3.0 * PI * a * a / (8.0 * r4))
}

/// Renormalized volume at the default truncation radius, checked against
/// the truncation at ten times that radius.
pub fn renormalized_volume(p: &RadialProfile, tol: &Tolerance) -> Result<RenVolResult, VolumeError> {
    renormalized_volume_at(p, DEFAULT_TRUNCATION_RADIUS, tol)
}

/// Renormalized volume truncated at `r` (plus the modelled tail), failing
/// with [`VolumeError::Unstable`] when `|V(r) - V(10 r)|` exceeds ten times
/// the quadrature tolerance.
pub fn renormalized_volume_at(
    p: &RadialProfile,
    r: f64,
    tol: &Tolerance,
) -> Result<RenVolResult, VolumeError> {
    let (value, tail, evals_r) = truncated_renormalized_volume(p, r, tol)?;
    let (check, _, evals_10r) = truncated_renormalized_volume(p, 10.0 * r, tol)?;
    let stability = (value - check).abs();
    let threshold = 10.0 * tol.target(value.abs().max(1.0));
    if !(stability <= threshold) {
        return Err(VolumeError::Unstable {
            value,
            stability,
            threshold,
        });
    }
    Ok(RenVolResult {
        value,
        truncation_radius: r,
        tail_correction: tail,
        check_value: check,
        stability,
        evaluations: evals_r + evals_10r,
    })
}

/// Renormalized volume truncated at `r`, without the stability check.
pub fn renormalized_volume_unchecked(
    p: &RadialProfile,
    r: f64,
    tol: &Tolerance,
) -> Result<f64, VolumeError> {
    Ok(truncated_renormalized_volume(p, r, tol)?.0)
}

/// The flow lower bound on `vol(Omega_tau)`:
/// `int_0^tau e^{3t/2} A^{3/2} (4 e^t A + 16 pi - e^{-t/2} A^{-1/2} m_H(Sigma_t))^{-1/2} dt`
/// with `Sigma_t` the coordinate sphere `s_h e^{t/2}`.
///
/// The bracket equals `16 pi f(s(t))` in this class. Both forms are evaluated
/// and must agree; the integrand uses the profile form, which keeps full
/// precision near the horizon where the Hawking-mass form cancels.
pub fn prop_volume_lower_bound(
    p: &RadialProfile,
    tau: f64,
    tol: &Tolerance,
) -> Result<Integral, VolumeError> {
    let h = require_horizon(p)?;
    FlowTime::new(&h, tau)?;
    if tau == 0.0 {
        return Ok(Integral::ZERO);
    }
    let area = h.area;
    let integrand = |t: f64| -> Result<f64, VolumeError> {
        let d = h.radius * (0.5 * t).exp_m1();
        let s = h.radius + d;
        let grown = t.exp() * area;
        let mass_term = (-0.5 * t).exp() * hawking_mass(p, s)? / area.sqrt();
        let from_mass = 4.0 * grown + 16.0 * PI - mass_term;
        let from_profile = 16.0 * PI * profile_from_horizon(p, &h, d)?;
        let scale = 4.0 * grown + 16.0 * PI + mass_term.abs();
        if (from_mass - from_profile).abs() > 1e-9 * scale {
            return Err(VolumeError::CrossCheck {
                t,
                from_mass,
                from_profile,
            });
        }
        if !(from_profile > 0.0) {
            return Err(VolumeError::NotMeanConvex {
                t,
                inner: from_profile,
            });
        }
        Ok((1.5 * t).exp() * area.powf(1.5) / from_profile.sqrt())
    };
    guarded(integrand, |g| integrate_sqrt_offset(g, 0.0, tau, tol))
}

/// `(1 - e^{-3t/2}) A + 4 pi (e^{-t} - e^{-3t/2})` without cancellation at
/// small `t`.
pub(crate) fn model_bracket(area: f64, t: f64) -> f64 {
    -(-1.5 * t).exp_m1() * area + 4.0 * PI * (-1.5 * t).exp() * (0.5 * t).exp_m1()
}

/// The lower bound obtained from Hawking mass monotonicity:
/// `int_0^tau e^t A^{3/2} ((1 - e^{-3t/2}) A + 4 pi (e^{-t} - e^{-3t/2}))^{-1/2} dt`.
///
/// With the model horizon area in place of `A` this is also twice the volume
/// enclosed by the model's coordinate sphere of area `e^tau A`.
pub fn corollary_lower_bound(area: f64, tau: f64, tol: &Tolerance) -> Result<Integral, VolumeError> {
    if !(area > 0.0 && area.is_finite()) {
        return Err(VolumeError::InvalidArea(area));
    }
    if !(tau >= 0.0 && tau.is_finite()) {
        return Err(VolumeError::InvalidFlowTime(tau));
    }
    let scale = area.powf(1.5);
    Ok(integrate_sqrt_offset(
        |t| t.exp() * scale / model_bracket(area, t).sqrt(),
        0.0,
        tau,
        tol,
    )?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IsoCheck {
    /// `2 vol({s0 <= s <= s_top})` in the model metric.
    pub lhs: f64,
    /// Corollary integral with the model horizon area, up to the flow time of `s_top`.
    pub rhs: f64,
    pub rel_err: f64,
    pub tau_bar: f64,
    pub evaluations: usize,
}

/// Equality case for coordinate spheres in the Anti-deSitter-Schwarzschild
/// model of mass `m`: twice the enclosed volume equals the corollary
/// integral evaluated with the model horizon area.
pub fn check_iso_identity(m: f64, s_top: f64, tol: &Tolerance) -> Result<IsoCheck, VolumeError> {
    let s0 = s0_of_m(m)?;
    if !(s_top >= s0 * (1.0 - 1e-12)) {
        return Err(VolumeError::InvalidRange { s1: s0, s2: s_top });
    }
    let p = RadialProfile::ads_schwarzschild(m)?;
    let top = s_top.max(s0);
    let vol = volume_between(&p, s0, top, tol)?;
    let tau_bar = 2.0 * (top / s0).ln();
    let bound = corollary_lower_bound(4.0 * PI * s0 * s0, tau_bar, tol)?;
    let lhs = 2.0 * vol.value;
    let rhs = bound.value;
    let denom = lhs.abs().max(rhs.abs());
    Ok(IsoCheck {
        lhs,
        rhs,
        rel_err: if denom == 0.0 { 0.0 } else { (lhs - rhs).abs() / denom },
        tau_bar,
        evaluations: vol.evaluations + bound.evaluations,
    })
}

/// Factor `s_h e^{delta t / 2}` by which the flow sphere at time `t` lies
/// outside the barrier sphere `{s = e^{(1 - delta) t / 2}}`.
pub fn barrier_margin(p: &RadialProfile, delta: f64, t: f64) -> Result<f64, VolumeError> {
    if !(delta > 0.0 && delta < 0.25) {
        return Err(VolumeError::InvalidDelta(delta));
    }
    let h = require_horizon(p)?;
    let flow = FlowTime::new(&h, t)?;
    Ok(flow.radius * (-(1.0 - delta) * t / 2.0).exp())
}
