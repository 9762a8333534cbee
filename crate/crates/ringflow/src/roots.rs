//! Bracketing root finders.

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Hard cap on bisection steps.
pub const MAX_BISECTION_ITERS: usize = 200;

/// Bisection for a sign change of `f` on `[lo, hi]`.
///
/// Stops when the bracket is narrower than `tol` or `f` vanishes exactly.
pub fn bisect<T: Real, F: FnMut(T) -> T>(mut f: F, mut lo: T, mut hi: T, tol: T) -> Result<T> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == T::zero() {
        return Ok(lo);
    }
    if fhi == T::zero() {
        return Ok(hi);
    }
    if (flo > T::zero()) == (fhi > T::zero()) || flo.is_nan() || fhi.is_nan() {
        return Err(Error::Bracket(format!(
            "no sign change on [{:?}, {:?}]: f = {:?}, {:?}",
            lo, hi, flo, fhi
        )));
    }
    let half = T::lit(0.5);
    for _ in 0..MAX_BISECTION_ITERS {
        let mid = lo + (hi - lo) * half;
        if mid <= lo || mid >= hi || (hi - lo) <= tol {
            break;
        }
        let fm = f(mid);
        if fm == T::zero() {
            return Ok(mid);
        }
        if (fm > T::zero()) == (flo > T::zero()) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(lo + (hi - lo) * half)
}

/// Bisection down to `coarse`, then up to `newton_steps` safeguarded Newton
/// steps that never leave the final bracket.
pub fn bisect_newton<T: Real, F, D>(
    mut f: F,
    mut df: D,
    lo: T,
    hi: T,
    coarse: T,
    newton_steps: usize,
) -> Result<T>
where
    F: FnMut(T) -> T,
    D: FnMut(T) -> T,
{
    let sign_lo = f(lo) > T::zero();
    let mut a = lo;
    let mut b = hi;
    // narrow the bracket first
    let half = T::lit(0.5);
    let mut it = 0;
    while b - a > coarse && it < MAX_BISECTION_ITERS {
        let m = a + (b - a) * half;
        let fm = f(m);
        if fm == T::zero() {
            return Ok(m);
        }
        if (fm > T::zero()) == sign_lo {
            a = m;
        } else {
            b = m;
        }
        it += 1;
    }
    let mut x = a + (b - a) * half;
    for _ in 0..newton_steps {
        let fx = f(x);
        if fx == T::zero() {
            break;
        }
        let d = df(x);
        let step = fx / d;
        let next = x - step;
        if !next.is_finite() || next <= a || next >= b {
            break;
        }
        if (next - x).abs() <= T::epsilon() * x.abs().max(T::min_positive_value()) {
            x = next;
            break;
        }
        x = next;
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt2() {
        let r = bisect(|x: f64| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn bisect_rejects_missing_sign_change() {
        assert!(bisect(|x: f64| x * x + 1.0, -1.0, 1.0, 1e-14).is_err());
    }

    #[test]
    fn newton_polish_stays_in_bracket() {
        let r = bisect_newton(|x: f64| x.powi(3) - 0.5, |x| 3.0 * x * x, 0.0, 1.0, 1e-6, 5).unwrap();
        assert!((r - 0.5f64.cbrt()).abs() < 1e-15);
    }
}
