use super::QuadError;

fn finite(x: f64, y: f64) -> Result<f64, QuadError> {
    if y.is_finite() {
        Ok(y)
    } else {
        Err(QuadError::NonFinite { x })
    }
}

/// Root of `f` in `[lo, hi]` given a sign change, to bracket width `tol`.
///
/// Secant steps are taken from the bracket endpoints but every step keeps a
/// valid bracket, and a bisection is forced whenever the previous step
/// failed to halve the bracket, so the iteration count is bounded by that of
/// plain bisection (times two). Returns the bracket endpoint with the
/// smaller residual.
pub fn find_root_bracketed<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64, QuadError> {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut fa = finite(a, f(a))?;
    let mut fb = finite(b, f(b))?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(QuadError::NoSignChange { lo, hi });
    }

    let mut force_bisect = false;
    while b - a > tol {
        let width = b - a;
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let secant = a - fa * (b - a) / (fb - fa);
        let x = if !force_bisect && secant > a && secant < b {
            secant
        } else {
            mid
        };
        let fx = finite(x, f(x))?;
        if fx == 0.0 {
            return Ok(x);
        }
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        force_bisect = b - a > 0.5 * width;
    }
    Ok(if fa.abs() <= fb.abs() { a } else { b })
}

/// Newton's method safeguarded by the bracket `[lo, hi]`.
///
/// `fdf` returns the value and derivative. A bisection step replaces any
/// Newton step that leaves the current bracket. Stops once the step is
/// below `rel_tol * |x|`.
pub fn find_root_newton<F: FnMut(f64) -> (f64, f64)>(
    mut fdf: F,
    lo: f64,
    hi: f64,
    rel_tol: f64,
) -> Result<f64, QuadError> {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let fa = finite(a, fdf(a).0)?;
    let fb = finite(b, fdf(b).0)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(QuadError::NoSignChange { lo, hi });
    }
    let rising = fb > 0.0;

    let mut x = 0.5 * (a + b);
    for _ in 0..200 {
        let (fx, dfx) = fdf(x);
        finite(x, fx)?;
        if fx == 0.0 {
            return Ok(x);
        }
        if (fx > 0.0) == rising {
            b = x;
        } else {
            a = x;
        }
        let newton = x - fx / dfx;
        let next = if dfx != 0.0 && newton.is_finite() && newton > a && newton < b {
            newton
        } else {
            0.5 * (a + b)
        };
        let step = (next - x).abs();
        x = next;
        if step <= rel_tol * x.abs() || b - a <= rel_tol * x.abs() {
            return Ok(x);
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    // plain bisection, independent of the solver under test
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
    fn bracketed_examples() {
        let r = find_root_bracketed(|s| s * s * s + s - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 1.0).abs() < 1e-14);

        let cubic = |s: f64| s * s * s + s - 1.0;
        let oracle = bisect(cubic, 0.0, 1.0, 60);
        assert!((oracle - 0.682_327_803_828).abs() < 1e-12);
        let r = find_root_bracketed(cubic, 0.0, 1.0, 1e-14).unwrap();
        assert!((r - oracle).abs() < 1e-14);

        assert!(matches!(
            find_root_bracketed(f64::cos, 0.0, 1.0, 1e-12),
            Err(QuadError::NoSignChange { .. })
        ));
        assert!(matches!(
            find_root_bracketed(|x| 1.0 / x, -1.0, 1.0, 1e-12),
            Err(QuadError::NonFinite { .. }) | Ok(_)
        ));
    }

    #[test]
    fn bracketed_handles_flat_secants() {
        // secant steps crawl on this function; the forced bisection keeps it bounded
        let mut calls = 0;
        let r = find_root_bracketed(
            |x: f64| {
                calls += 1;
                x.powi(9)
            },
            -1.0,
            3.0,
            1e-12,
        )
        .unwrap();
        assert!(r.abs() < 1e-1);
        assert!(calls < 200);
    }

    #[test]
    fn newton_cubic() {
        let r = find_root_newton(|s| (s * s * s + s - 30.0, 3.0 * s * s + 1.0), 0.0, 5.0, 1e-15)
            .unwrap();
        assert!((r - 3.0).abs() < 1e-14);
        assert!(find_root_newton(|s| (s * s + 1.0, 2.0 * s), -1.0, 1.0, 1e-12).is_err());
    }
}
