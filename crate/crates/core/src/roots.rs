//! Bracketing root finder.

use crate::error::{Error, Result};
use crate::Real;

/// Bisection for a root of `f` in `[lo, hi]`.
///
/// `f(lo)` and `f(hi)` must differ in sign (or one of them be zero). Iterates
/// until the bracket width is below `x_tol` or can no longer shrink.
pub fn bisect<T: Real, F: FnMut(T) -> T>(mut f: F, mut lo: T, mut hi: T, x_tol: T) -> Result<T> {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == T::zero() {
        return Ok(lo);
    }
    if f_hi == T::zero() {
        return Ok(hi);
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::Contract(format!(
            "bisect: no sign change on [{lo}, {hi}] (f = {f_lo}, {f_hi})"
        )));
    }
    // Bounded by the number of representable halvings of any finite interval.
    for _ in 0..2200 {
        let mid = lo + (hi - lo) / T::lit(2.0);
        if hi - lo <= x_tol || mid <= lo || mid >= hi {
            break;
        }
        let f_mid = f(mid);
        if f_mid == T::zero() {
            return Ok(mid);
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo + (hi - lo) / T::lit(2.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let r = bisect(|x: f64| x * x - 2.0, 0.0, 2.0, 1e-15).unwrap();
        assert!((r - std::f64::consts::SQRT_2).abs() < 1e-15);
    }

    #[test]
    fn rejects_unbracketed() {
        assert!(bisect(|x: f64| x * x + 1.0, -1.0, 1.0, 1e-12).is_err());
    }

    #[test]
    fn endpoint_roots() {
        assert_eq!(bisect(|x: f64| x, 0.0, 1.0, 1e-12).unwrap(), 0.0);
        assert_eq!(bisect(|x: f64| x - 1.0, 0.0, 1.0, 1e-12).unwrap(), 1.0);
    }
}
