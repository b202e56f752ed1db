//! Adaptive Simpson quadrature.

use super::NumericsError;

/// Default relative tolerance for [`integrate`].
pub const DEFAULT_REL_TOL: f64 = 1e-9;

const INITIAL_PANELS: usize = 32;
const MAX_DEPTH: u32 = 48;

/// Integrates `f` over `[a, b]` with adaptive Simpson's rule.
///
/// The absolute error target is `rel_tol` times an estimate of `∫|f|`, so
/// integrals that cancel to zero still terminate.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> Result<f64, NumericsError> {
    integrate_with_breaks(f, &[a, b], rel_tol)
}

/// Integrates over consecutive intervals `points[0]..points[1]..`, which lets
/// callers place known kinks and steep features on panel boundaries.
pub fn integrate_with_breaks<F: Fn(f64) -> f64>(f: F, points: &[f64], rel_tol: f64) -> Result<f64, NumericsError> {
    if points.len() < 2 {
        return Err(NumericsError::InvalidArgument("need at least two integration limits".into()));
    }
    if points.windows(2).any(|w| !(w[0] <= w[1])) {
        return Err(NumericsError::InvalidArgument("integration limits must be ordered".into()));
    }
    if !(rel_tol > 0.0) {
        return Err(NumericsError::InvalidArgument("rel_tol must be positive".into()));
    }

    // Coarse pass: panel endpoints/midpoints and a scale for the tolerance.
    let mut panels = Vec::new();
    let mut abs_scale = 0.0;
    for w in points.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi == lo {
            continue;
        }
        let width = (hi - lo) / INITIAL_PANELS as f64;
        for p in 0..INITIAL_PANELS {
            let x0 = lo + p as f64 * width;
            let x2 = if p + 1 == INITIAL_PANELS { hi } else { lo + (p + 1) as f64 * width };
            let x1 = 0.5 * (x0 + x2);
            let (f0, f1, f2) = (eval(&f, x0)?, eval(&f, x1)?, eval(&f, x2)?);
            abs_scale += (x2 - x0) / 6.0 * (f0.abs() + 4.0 * f1.abs() + f2.abs());
            panels.push([x0, x1, x2, f0, f1, f2]);
        }
    }
    if panels.is_empty() {
        return Ok(0.0);
    }
    let span = points[points.len() - 1] - points[0];
    let tol = rel_tol * abs_scale.max(f64::MIN_POSITIVE);

    let mut total = 0.0;
    for [x0, _, x2, f0, f1, f2] in panels {
        let whole = (x2 - x0) / 6.0 * (f0 + 4.0 * f1 + f2);
        let local_tol = tol * (x2 - x0) / span;
        total += simpson_step(&f, x0, x2, f0, f1, f2, whole, local_tol, MAX_DEPTH)?;
    }
    Ok(total)
}

fn eval<F: Fn(f64) -> f64>(f: &F, x: f64) -> Result<f64, NumericsError> {
    let y = f(x);
    if y.is_finite() {
        Ok(y)
    } else {
        Err(NumericsError::NonFinite(format!("integrand at x = {x}")))
    }
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> Result<f64, NumericsError> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = eval(f, lm)?;
    let frm = eval(f, rm)?;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if delta.abs() <= 15.0 * tol {
        return Ok(left + right + delta / 15.0);
    }
    if depth == 0 || m <= a || m >= b {
        return Err(NumericsError::Quadrature { a, b });
    }
    Ok(simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)?
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)?)
}
