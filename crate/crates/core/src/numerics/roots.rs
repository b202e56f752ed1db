use super::NumericsError;

/// Relative bracket width used by [`bisect_root_default`].
pub const DEFAULT_BRACKET_TOL: f64 = 1e-12;

/// Bisection on `[lo, hi]` until the bracket is no wider than `tol`.
///
/// Infinite function values are allowed (only their sign is used); NaN is not.
pub fn bisect_root<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, tol: f64) -> Result<f64, NumericsError> {
    if !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(NumericsError::InvalidArgument(format!("invalid bracket [{lo}, {hi}]")));
    }
    let (mut a, mut b) = (lo, hi);
    let mut fa = checked(&f, a)?;
    let fb = checked(&f, b)?;
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(NumericsError::RootNotBracketed { lo, hi });
    }
    for _ in 0..2000 {
        if b - a <= tol {
            break;
        }
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = checked(&f, mid)?;
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}

/// [`bisect_root`] with a bracket tolerance of `1e-12 * (hi - lo)`.
pub fn bisect_root_default<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64) -> Result<f64, NumericsError> {
    bisect_root(f, lo, hi, DEFAULT_BRACKET_TOL * (hi - lo))
}

fn checked<F: Fn(f64) -> f64>(f: &F, x: f64) -> Result<f64, NumericsError> {
    let y = f(x);
    if y.is_nan() {
        Err(NumericsError::NonFinite(format!("root function at x = {x}")))
    } else {
        Ok(y)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_and_sqrt2() {
        assert!((bisect_root_default(|x| x - 1.0, 0.0, 2.0).unwrap() - 1.0).abs() < 1e-11);
        let r = bisect_root_default(|x| x * x - 2.0, 0.0, 2.0).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-11);
    }

    #[test]
    fn no_sign_change() {
        assert!(matches!(
            bisect_root_default(|x| x * x + 1.0, -1.0, 1.0),
            Err(NumericsError::RootNotBracketed { .. })
        ));
    }

    #[test]
    fn infinite_endpoint_is_usable() {
        let r = bisect_root_default(|x: f64| if x >= 1.0 { f64::INFINITY } else { x - 0.25 }, 0.0, 1.0).unwrap();
        assert!((r - 0.25).abs() < 1e-11);
    }
}
