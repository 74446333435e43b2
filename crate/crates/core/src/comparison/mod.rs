//! Comparison of a profile against an Anti-deSitter-Schwarzschild model:
//! hypothesis checks, renormalized volumes, the matching exponent `alpha`
//! and the `I(alpha)` lower bound on the volume gap.

mod appendix;

use std::fmt;

use thiserror::Error;

pub use appendix::{
    di_eps_dalpha, di_lower_bound, i_alpha, i_eps, lemma_aux_margin, lemma_aux_threshold,
    DerivativeCheck, IAlphaSpec,
};

use crate::metric::{
    ads_horizon_area, scalar_curvature, validate_asymptotics, AsymptoticsReport, Horizon,
    MetricError, RadialProfile,
};
use crate::quad::{QuadError, Tolerance};
use crate::volume::{renormalized_volume, VolumeError};

/// Relative tolerance on both the volume margin and `alpha` for an equality verdict.
pub const EQUALITY_TOLERANCE: f64 = 1e-8;

/// Upper end of the scalar-curvature sample grid.
pub const CURVATURE_GRID_MAX: f64 = 1e4;
pub const CURVATURE_GRID_POINTS: usize = 2000;
/// Allowed relative undershoot of `R` below `-6`.
pub const CURVATURE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ComparisonError {
    #[error(transparent)]
    Volume(#[from] VolumeError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error("{0}")]
    InvalidInput(String),
    #[error("boundary area {area} is below the model horizon area {a_bar}")]
    AreaBelowModel { area: f64, a_bar: f64 },
    #[error("margin does not change sign for eps/mu in [1e-12, 1]")]
    NoSignChange,
    #[error("mass grid is empty")]
    EmptyGrid,
    #[error("mass grid is not strictly increasing at index {index}")]
    GridNotIncreasing { index: usize },
}

/// `log(A / A_bar)`.
pub fn alpha(area: f64, a_bar: f64) -> Result<f64, ComparisonError> {
    if !(a_bar > 0.0 && area.is_finite()) {
        return Err(ComparisonError::InvalidInput(format!(
            "areas must be positive and finite, got A = {area}, A_bar = {a_bar}"
        )));
    }
    if area < a_bar {
        return Err(ComparisonError::AreaBelowModel { area, a_bar });
    }
    Ok((area / a_bar).ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    Equality,
    HypothesisFailed,
    /// All hypotheses passed and the volume of the profile came out smaller.
    Violated,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Holds => "holds",
            Verdict::Equality => "equality",
            Verdict::HypothesisFailed => "hypothesis_failed",
            Verdict::Violated => "violated",
        })
    }
}

/// Sampled check of `R >= -6`. Sampling cannot certify the bound between
/// samples; `min_value` is the smallest value seen after refinement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvatureCheck {
    pub ok: bool,
    pub min_value: f64,
    /// Radius at which `min_value` was attained.
    pub witness: f64,
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Hypotheses {
    pub scalar_curvature: CurvatureCheck,
    pub horizon: Option<Horizon>,
    pub area_ok: bool,
    pub asymptotics: AsymptoticsReport,
}

impl Hypotheses {
    pub fn all_ok(&self) -> bool {
        self.scalar_curvature.ok
            && self.horizon.is_some()
            && self.area_ok
            && self.asymptotics.pass
    }

    /// One line per failed hypothesis.
    pub fn failures(&self) -> Vec<String> {
        let mut out = Vec::new();
        let r = &self.scalar_curvature;
        if !r.ok {
            out.push(format!(
                "scalar curvature below -6 (sampled): R({:.6e}) = {:.12e}",
                r.witness, r.min_value
            ));
        }
        if self.horizon.is_none() {
            out.push("no horizon".into());
        }
        if self.horizon.is_some() && !self.area_ok {
            out.push("horizon area below the model horizon area".into());
        }
        if !self.asymptotics.pass {
            out.push(format!(
                "not asymptotically hyperbolic at the required rate: measured decay {:.3}, required {:.3}",
                self.asymptotics.measured_rate, self.asymptotics.required_rate
            ));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub hypotheses: Hypotheses,
    pub model_mass: f64,
    /// Horizon area of the profile.
    pub area: Option<f64>,
    pub a_bar: f64,
    pub alpha: Option<f64>,
    pub v_g: Option<f64>,
    pub v_model: Option<f64>,
    /// `V_g - V_model`
    pub margin: Option<f64>,
    /// `A_bar^{3/2} I(alpha)`, a lower bound for `2 margin`.
    pub chain_bound: Option<f64>,
    pub verdict: Verdict,
}

fn log_grid(a: f64, b: f64, n: usize) -> Vec<f64> {
    let (la, lb) = (a.ln(), b.ln());
    (0..n)
        .map(|i| (la + (lb - la) * i as f64 / (n - 1) as f64).exp())
        .collect()
}

/// Samples `R` on a log grid over `[lo, hi]` and refines the smallest sample
/// by golden-section search between its neighbours.
pub fn check_scalar_curvature(
    p: &RadialProfile,
    lo: f64,
    hi: f64,
) -> Result<CurvatureCheck, ComparisonError> {
    let grid = log_grid(lo, hi, CURVATURE_GRID_POINTS);
    let mut values = Vec::with_capacity(grid.len());
    for &s in &grid {
        values.push(scalar_curvature(p, s)?);
    }
    let (i_min, _) = values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |best, (i, &v)| if v < best.1 { (i, v) } else { best });
    let (mut witness, mut min_value) = (grid[i_min], values[i_min]);

    let mut a = grid[i_min.saturating_sub(1)].ln();
    let mut b = grid[(i_min + 1).min(grid.len() - 1)].ln();
    let ratio = 0.5 * (5f64.sqrt() - 1.0);
    let r_at = |x: f64| scalar_curvature(p, x.exp());
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (r_at(c)?, r_at(d)?);
    for _ in 0..80 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = r_at(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = r_at(d)?;
        }
    }
    for (x, v) in [(c, fc), (d, fd)] {
        if v < min_value {
            min_value = v;
            witness = x.exp();
        }
    }
    Ok(CurvatureCheck {
        ok: min_value >= -6.0 * (1.0 + CURVATURE_TOLERANCE),
        min_value,
        witness,
        samples: grid.len(),
    })
}

/// Compares `p` against the model of mass `m`.
///
/// Hypothesis failures are part of the report; an `Err` means a numerical
/// failure while computing the volumes.
pub fn verify_theorem(
    p: &RadialProfile,
    m: f64,
    tol: &Tolerance,
) -> Result<ComparisonReport, ComparisonError> {
    let model = RadialProfile::ads_schwarzschild(m)?;
    let a_bar = ads_horizon_area(m)?;
    let horizon = p.horizon()?;
    let lo = horizon.map_or(1e-3, |h| h.radius);
    let scalar = check_scalar_curvature(p, lo, CURVATURE_GRID_MAX.max(10.0 * lo))?;
    let area = horizon.map(|h| h.area);
    let area_ok = area.is_some_and(|a| a >= a_bar * (1.0 - 1e-12));
    let hypotheses = Hypotheses {
        scalar_curvature: scalar,
        horizon,
        area_ok,
        asymptotics: match validate_asymptotics(p) {
            Err(MetricError::NotAsymptoticallyHyperbolic { .. }) => AsymptoticsReport {
                pass: false,
                measured_rate: f64::NAN,
                required_rate: -(2.0 + 4.0 * p.delta()),
                samples_used: 0,
                derivative_trend_ok: false,
            },
            other => other?,
        },
    };

    let mut report = ComparisonReport {
        hypotheses,
        model_mass: m,
        area,
        a_bar,
        alpha: None,
        v_g: None,
        v_model: None,
        margin: None,
        chain_bound: None,
        verdict: Verdict::HypothesisFailed,
    };
    if !report.hypotheses.all_ok() {
        return Ok(report);
    }

    let alpha = alpha(area.unwrap().max(a_bar), a_bar)?;
    let v_g = renormalized_volume(p, tol)?.value;
    let v_model = renormalized_volume(&model, tol)?.value;
    let margin = v_g - v_model;
    let chain = a_bar.powf(1.5) * i_alpha(&IAlphaSpec::new(a_bar, alpha, 0.0)?, tol)?;

    let scale = v_model.abs().max(1.0);
    report.verdict = if margin.abs() <= EQUALITY_TOLERANCE * scale && alpha <= EQUALITY_TOLERANCE {
        Verdict::Equality
    } else if margin > 0.0 {
        Verdict::Holds
    } else {
        Verdict::Violated
    };
    report.alpha = Some(alpha);
    report.v_g = Some(v_g);
    report.v_model = Some(v_model);
    report.margin = Some(margin);
    report.chain_bound = Some(chain);
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub m: f64,
    pub volume: f64,
    /// `V(m_i) - V(m_{i-1})`, absent on the first row.
    pub dv_prev: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sweep {
    pub rows: Vec<SweepRow>,
    /// All consecutive differences are positive.
    pub increasing: bool,
}

/// Renormalized volumes of the models over a strictly increasing mass grid.
pub fn sweep_monotonicity(grid: &[f64], tol: &Tolerance) -> Result<Sweep, ComparisonError> {
    if grid.is_empty() {
        return Err(ComparisonError::EmptyGrid);
    }
    if let Some(i) = grid.windows(2).position(|w| !(w[1] > w[0])) {
        return Err(ComparisonError::GridNotIncreasing { index: i + 1 });
    }
    let mut rows: Vec<SweepRow> = Vec::with_capacity(grid.len());
    for &m in grid {
        let volume = renormalized_volume(&RadialProfile::ads_schwarzschild(m)?, tol)?.value;
        let dv_prev = rows.last().map(|r| volume - r.volume);
        rows.push(SweepRow { m, volume, dv_prev });
    }
    let increasing = rows.iter().all(|r| r.dv_prev.map_or(true, |d| d > 0.0));
    Ok(Sweep { rows, increasing })
}
