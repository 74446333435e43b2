//! The function `I(alpha)`, its regularization `I_eps(alpha)`, the lower bound
//! on `dI_eps/dalpha` and the auxiliary integral inequality behind it.
//!
//! All integrals over `t in [0, inf)` against `e^{-t/2}` are written with
//! `u = e^{-t/2}` and then in the offset `v = 1 - u`, where the brackets
//! factor exactly (`1 - u^3 = v (3 - 3v + v^2)`). Differences of inverse
//! powers are taken in closed form so that nothing cancels at small `v` or
//! large `t`.

use std::f64::consts::PI;

use crate::quad::{
    find_root_bracketed, integrate, integrate_semi_infinite_offset, integrate_sqrt_offset,
    inv_sqrt_difference, inv_three_halves_difference, Integral, QuadError, Tolerance,
};
use crate::volume::model_bracket;

use super::ComparisonError;

/// Arguments of `I`, `I_eps` and its derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IAlphaSpec {
    pub a_bar: f64,
    pub alpha: f64,
    pub epsilon: f64,
}

impl IAlphaSpec {
    pub fn new(a_bar: f64, alpha: f64, epsilon: f64) -> Result<IAlphaSpec, ComparisonError> {
        if !(a_bar > 0.0 && a_bar.is_finite()) {
            return Err(ComparisonError::InvalidInput(format!(
                "A_bar must be positive, got {a_bar}"
            )));
        }
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(ComparisonError::InvalidInput(format!(
                "alpha must be nonnegative, got {alpha}"
            )));
        }
        if !(epsilon >= 0.0 && epsilon.is_finite()) {
            return Err(ComparisonError::InvalidInput(format!(
                "eps must be nonnegative, got {epsilon}"
            )));
        }
        Ok(IAlphaSpec {
            a_bar,
            alpha,
            epsilon,
        })
    }

    fn require_positive_eps(&self) -> Result<(), ComparisonError> {
        if self.epsilon > 0.0 {
            Ok(())
        } else {
            Err(ComparisonError::InvalidInput(format!(
                "eps must be positive, got {}",
                self.epsilon
            )))
        }
    }
}

/// Value of `dI_eps/dalpha` against its lower bound
/// `(e^alpha / 4) (A_bar + (4 pi / 3) e^{-alpha})^{-1/2}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeCheck {
    pub value: f64,
    pub lower_bound: f64,
    pub satisfied: bool,
}

/// `I(alpha)`. Requires `spec.epsilon == 0`; see [`i_eps`] otherwise.
pub fn i_alpha(spec: &IAlphaSpec, tol: &Tolerance) -> Result<f64, ComparisonError> {
    if spec.epsilon != 0.0 {
        return Err(ComparisonError::InvalidInput(
            "I(alpha) takes eps = 0; use I_eps for eps > 0".into(),
        ));
    }
    Ok(regularized(spec, tol)?.value)
}

/// `I_eps(alpha)`, the same integrals with `eps` added inside both radicals.
pub fn i_eps(spec: &IAlphaSpec, tol: &Tolerance) -> Result<f64, ComparisonError> {
    spec.require_positive_eps()?;
    Ok(regularized(spec, tol)?.value)
}

/// Shared evaluation of `I_eps` for `eps >= 0`.
///
/// `int_alpha^inf e^t [X^{-1/2} - Y^{-1/2}] dt - int_0^alpha e^t Y^{-1/2} dt` where
/// `Y(t) = (1 - e^{-3t/2}) A + 4 pi (e^{-t} - e^{-3t/2})` and `X` is `Y` with
/// the flow restarted at `alpha`. `Y - X = e^{-3t/2} (A (e^{3 alpha/2} - 1) + 4 pi (e^{alpha/2} - 1))`.
fn regularized(spec: &IAlphaSpec, tol: &Tolerance) -> Result<Integral, ComparisonError> {
    let IAlphaSpec {
        a_bar,
        alpha,
        epsilon,
    } = *spec;
    if alpha == 0.0 {
        return Ok(Integral::ZERO);
    }
    let gap = a_bar * (1.5 * alpha).exp_m1() + 4.0 * PI * (0.5 * alpha).exp_m1();
    let x_of = |h: f64, t: f64| -(-1.5 * h).exp_m1() * a_bar - 4.0 * PI * (-t).exp() * (-0.5 * h).exp_m1();

    let outer = |h: f64| {
        let t = alpha + h;
        let x = epsilon + x_of(h, t);
        let y = epsilon + model_bracket(a_bar, t);
        t.exp() * inv_sqrt_difference(x, y, (-1.5 * t).exp() * gap)
    };
    let near = integrate_sqrt_offset(outer, alpha, alpha + 1.0, tol)?;
    let far = integrate_semi_infinite_offset(|d| outer(1.0 + d), alpha + 1.0, 0.5, false, tol)?;
    let inner = integrate_sqrt_offset(
        |t| t.exp() / (epsilon + model_bracket(a_bar, t)).sqrt(),
        0.0,
        alpha,
        tol,
    )?;
    Ok(near.combine(far).combine(inner.scale(-1.0)))
}

/// `int_0^1 g(v) dv` for an integrand concentrated in a layer of width
/// `width` at `v = 0`.
fn integrate_unit_with_layer<F: FnMut(f64) -> f64>(
    mut g: F,
    width: f64,
    tol: &Tolerance,
) -> Result<Integral, QuadError> {
    let mut cuts = vec![0.0];
    let mut x = width.max(1e-300);
    while x < 0.25 {
        cuts.push(x);
        x *= 4.0;
    }
    cuts.push(1.0);
    let mut total = Integral::ZERO;
    for w in cuts.windows(2) {
        total = total.combine(integrate(&mut g, w[0], w[1], tol)?);
    }
    Ok(total)
}

/// `dI_eps/dalpha` from
/// `(e^alpha / 4)(3 A + 4 pi e^{-alpha}) int_0^inf e^{-t/2} (eps + Y_alpha(t))^{-3/2} dt - e^alpha eps^{-1/2}`,
/// with `Y_alpha` the bracket of `Y` whose `4 pi` term carries `e^{-alpha}`.
///
/// The `eps^{-1/2}` term is folded into the integral against the linearized
/// bracket `K v`, which integrates in closed form, leaving an integrand that
/// is regular as `eps -> 0`.
pub fn di_eps_dalpha(spec: &IAlphaSpec, tol: &Tolerance) -> Result<DerivativeCheck, ComparisonError> {
    spec.require_positive_eps()?;
    let IAlphaSpec {
        a_bar,
        alpha,
        epsilon,
    } = *spec;
    let b = 4.0 * PI * (-alpha).exp();
    let k = 3.0 * a_bar + b;
    let diff = integrate_unit_with_layer(
        |v| {
            let w = 1.0 - v;
            let x = epsilon + v * ((3.0 - 3.0 * v + v * v) * a_bar + b * w * w);
            let y = epsilon + k * v;
            let gap = v * v * (a_bar * (3.0 - v) + b * (2.0 - v));
            inv_three_halves_difference(x, y, gap)
        },
        epsilon / k,
        tol,
    )?;
    let e = alpha.exp();
    let value = 0.25 * e * k * 2.0 * diff.value - e / (epsilon + k).sqrt();
    let lower_bound = di_lower_bound(a_bar, alpha);
    Ok(DerivativeCheck {
        value,
        lower_bound,
        satisfied: value >= lower_bound,
    })
}

/// `(e^alpha / 4)(A + (4 pi / 3) e^{-alpha})^{-1/2}`
pub fn di_lower_bound(a_bar: f64, alpha: f64) -> f64 {
    0.25 * alpha.exp() / (a_bar + 4.0 * PI / 3.0 * (-alpha).exp()).sqrt()
}

/// `3 mu int_0^inf e^{-t/2} (eps + (1 - e^{-3t/2}) mu)^{-3/2} dt - 4 eps^{-1/2} - mu^{-1/2}`.
///
/// Positive when `eps / mu` is small enough. Homogeneous of degree `-1/2`
/// in `(eps, mu)`.
pub fn lemma_aux_margin(eps: f64, mu: f64, tol: &Tolerance) -> Result<f64, ComparisonError> {
    if !(eps > 0.0 && eps.is_finite() && mu > 0.0 && mu.is_finite()) {
        return Err(ComparisonError::InvalidInput(format!(
            "eps and mu must be positive, got eps = {eps}, mu = {mu}"
        )));
    }
    // 4 eps^{-1/2} is 6 mu int_0^1 (eps + 3 mu v)^{-3/2} dv + 4 (eps + 3 mu)^{-1/2}
    let diff = integrate_unit_with_layer(
        |v| {
            let x = eps + mu * v * (3.0 - 3.0 * v + v * v);
            let y = eps + 3.0 * mu * v;
            inv_three_halves_difference(x, y, mu * v * v * (3.0 - v))
        },
        eps / (3.0 * mu),
        tol,
    )?;
    Ok(6.0 * mu * diff.value - 4.0 / (eps + 3.0 * mu).sqrt() - 1.0 / mu.sqrt())
}

/// The ratio `rho* = eps / mu` at which [`lemma_aux_margin`] changes sign,
/// searched for in `log10 rho in [-12, 0]`.
pub fn lemma_aux_threshold(mu: f64, tol: &Tolerance) -> Result<f64, ComparisonError> {
    if !(mu > 0.0 && mu.is_finite()) {
        return Err(ComparisonError::InvalidInput(format!(
            "mu must be positive, got {mu}"
        )));
    }
    let mut failure = None;
    let margin = |log_rho: f64| match lemma_aux_margin(10f64.powf(log_rho) * mu, mu, tol) {
        Ok(v) => v,
        Err(e) => {
            failure.get_or_insert(e);
            f64::NAN
        }
    };
    let root = find_root_bracketed(margin, -12.0, 0.0, 1e-13);
    if let Some(e) = failure {
        return Err(e);
    }
    match root {
        Ok(log_rho) => Ok(10f64.powf(log_rho)),
        Err(QuadError::NoSignChange { .. }) => Err(ComparisonError::NoSignChange),
        Err(e) => Err(e.into()),
    }
}
