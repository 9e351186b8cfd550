//! Numerical integration.
//!
//! Two integrators cover everything the analytic side needs:
//!
//! * [`gauss_kronrod`]: globally adaptive 7/15-point Gauss–Kronrod bisection,
//!   for smooth integrands on finite intervals.
//! * [`tanh_sinh`]: the double-exponential rule, for integrands with
//!   integrable endpoint singularities (square-root edges, `1/sqrt` blow-ups).
//!   Abscissae are generated as distances from the nearer endpoint so the
//!   integrand is never sampled at a rounded-onto-the-endpoint point.

use std::collections::BinaryHeap;
use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::Real;

/// Convergence target: stop once the error estimate is below
/// `max(abs, rel * |estimate|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance<T> {
    pub abs: T,
    pub rel: T,
}

impl<T: Real> Tolerance<T> {
    pub fn absolute(abs: T) -> Self {
        Tolerance { abs, rel: T::zero() }
    }

    pub fn relative(rel: T) -> Self {
        Tolerance { abs: T::zero(), rel }
    }

    fn target(&self, estimate: T) -> T {
        self.abs.max(self.rel * estimate.abs())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<T> {
    pub value: T,
    pub error: T,
    pub evaluations: usize,
}

// Kronrod 15-point abscissae (non-negative half) and weights; every odd index
// is also a 7-point Gauss node.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

struct Segment<T> {
    lo: T,
    hi: T,
    value: T,
    error: T,
}

impl<T: Real> PartialEq for Segment<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<T: Real> Eq for Segment<T> {}
impl<T: Real> PartialOrd for Segment<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for Segment<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

fn kronrod_segment<T: Real, F: FnMut(T) -> T>(f: &mut F, lo: T, hi: T) -> Segment<T> {
    let half = (hi - lo) / T::lit(2.0);
    let center = lo + half;
    let fc = f(center);
    let mut kronrod = fc * T::lit(WGK[7]);
    let mut gauss = fc * T::lit(WG[3]);
    for j in 0..7 {
        let dx = half * T::lit(XGK[j]);
        let pair = f(center - dx) + f(center + dx);
        kronrod = kronrod + pair * T::lit(WGK[j]);
        if j % 2 == 1 {
            gauss = gauss + pair * T::lit(WG[j / 2]);
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).abs();
    Segment { lo, hi, value, error }
}

/// Globally adaptive Gauss–Kronrod (G7/K15) on `[lo, hi]`.
///
/// Splits the segment with the largest local error until the summed error
/// estimate meets `tol`. Fails with [`Error::Quadrature`] once
/// `max_segments` is reached or the estimate stops being finite.
pub fn gauss_kronrod<T: Real, F: FnMut(T) -> T>(
    mut f: F,
    lo: T,
    hi: T,
    tol: Tolerance<T>,
    max_segments: usize,
) -> Result<Integral<T>> {
    if lo == hi {
        return Ok(Integral {
            value: T::zero(),
            error: T::zero(),
            evaluations: 0,
        });
    }
    if hi < lo {
        let r = gauss_kronrod(f, hi, lo, tol, max_segments)?;
        return Ok(Integral { value: -r.value, ..r });
    }

    let mut heap = BinaryHeap::new();
    let first = kronrod_segment(&mut f, lo, hi);
    let mut value = first.value;
    let mut error = first.error;
    let mut evaluations = 15;
    heap.push(first);

    while !(error <= tol.target(value)) {
        if heap.len() >= max_segments || !value.is_finite() || error.is_nan() {
            return Err(Error::Quadrature {
                lo: lo.as_f64(),
                hi: hi.as_f64(),
                estimate: value.as_f64(),
                error_estimate: error.as_f64(),
                evaluations,
            });
        }
        let worst = heap.pop().expect("heap never empty");
        let mid = worst.lo + (worst.hi - worst.lo) / T::lit(2.0);
        if !(mid > worst.lo && mid < worst.hi) {
            // Segment no longer divisible at this precision; accept what we have.
            heap.push(worst);
            break;
        }
        let left = kronrod_segment(&mut f, worst.lo, mid);
        let right = kronrod_segment(&mut f, mid, worst.hi);
        evaluations += 30;
        value = value - worst.value + left.value + right.value;
        error = error - worst.error + left.error + right.error;
        heap.push(left);
        heap.push(right);

        // Re-sum occasionally to stop cancellation drift in the running totals.
        if heap.len() % 64 == 0 {
            value = heap.iter().map(|s| s.value).sum();
            error = heap.iter().map(|s| s.error).sum();
        }
    }

    let value = heap.iter().map(|s| s.value).sum();
    let error = heap.iter().map(|s| s.error).sum();
    Ok(Integral {
        value,
        error,
        evaluations,
    })
}

/// Deepest refinement level of [`tanh_sinh`]; step `2^-MAX_LEVEL`.
pub const TANH_SINH_MAX_LEVEL: usize = 12;

/// Double-exponential quadrature on `[lo, hi]`.
///
/// `f` is never evaluated at either endpoint, so integrands that are singular
/// (but integrable) there are fine. Nodes cannot get closer to an endpoint
/// than its ulp, so put a singular endpoint at zero when full accuracy
/// matters. Refines by halving the step until two successive levels agree
/// to within `tol`.
pub fn tanh_sinh<T: Real, F: FnMut(T) -> T>(
    mut f: F,
    lo: T,
    hi: T,
    tol: Tolerance<T>,
) -> Result<Integral<T>> {
    if lo == hi {
        return Ok(Integral {
            value: T::zero(),
            error: T::zero(),
            evaluations: 0,
        });
    }
    if hi < lo {
        let r = tanh_sinh(f, hi, lo, tol)?;
        return Ok(Integral { value: -r.value, ..r });
    }

    let width = hi - lo;
    let half_pi = T::FRAC_PI_2();
    let two = T::lit(2.0);
    let mut evaluations = 0usize;

    // Contribution of the node pair at +-t (or the centre when t == 0),
    // already multiplied by the weight but not by the step.
    let mut pair = |t: T, evaluations: &mut usize| -> Option<T> {
        let u = half_pi * t.sinh();
        let cosh_u = u.cosh();
        // Distance from the nearer endpoint: width / (1 + e^{2u}).
        let dist = width / (T::one() + (two * u).exp());
        let weight = width / two * half_pi * t.cosh() / (cosh_u * cosh_u);
        if !(dist > T::zero()) || !weight.is_finite() || weight == T::zero() {
            return None;
        }
        if t == T::zero() {
            *evaluations += 1;
            return Some(weight * f(lo + dist));
        }
        let a = lo + dist;
        let b = hi - dist;
        let mut acc = T::zero();
        let mut any = false;
        if a > lo {
            acc = acc + f(a);
            *evaluations += 1;
            any = true;
        }
        if b < hi {
            acc = acc + f(b);
            *evaluations += 1;
            any = true;
        }
        any.then(|| weight * acc)
    };

    // Level 0: unit step, nodes at every integer t.
    let mut sum = pair(T::zero(), &mut evaluations).unwrap_or(T::zero());
    let mut k = 1;
    while let Some(c) = pair(T::lit(k as f64), &mut evaluations) {
        sum = sum + c;
        k += 1;
    }
    let mut h = T::one();
    let mut estimate = sum * h;
    let mut last_diff = T::infinity();

    for level in 1..=TANH_SINH_MAX_LEVEL {
        h = h / two;
        let mut fresh = T::zero();
        let mut j = 1usize;
        // Odd multiples of the new step are the only new nodes.
        while let Some(c) = pair(h * T::lit(j as f64), &mut evaluations) {
            fresh = fresh + c;
            j += 2;
        }
        sum = sum + fresh;
        let next = sum * h;
        let diff = (next - estimate).abs();
        estimate = next;
        if level >= 3 && diff <= tol.target(estimate) {
            return Ok(Integral {
                value: estimate,
                error: diff,
                evaluations,
            });
        }
        last_diff = diff;
    }

    Err(Error::Quadrature {
        lo: lo.as_f64(),
        hi: hi.as_f64(),
        estimate: estimate.as_f64(),
        error_estimate: last_diff.as_f64(),
        evaluations,
    })
}
