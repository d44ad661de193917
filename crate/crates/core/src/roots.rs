//! Derivative-free bracketing: a uniform sign-change scan followed by bisection.

use crate::error::{Error, Result};

/// Subintervals of `[lo, hi]` (split into `pieces` equal parts) on whose
/// endpoints `f` changes sign or vanishes.
pub(crate) fn scan_brackets<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    pieces: usize,
) -> Vec<(f64, f64)> {
    let step = (hi - lo) / pieces as f64;
    let point = |k: usize| if k == pieces { hi } else { lo + step * k as f64 };
    let mut out = Vec::new();
    let mut left = point(0);
    let mut f_left = f(left);
    for k in 1..=pieces {
        let right = point(k);
        let f_right = f(right);
        if f_left.is_finite() && f_right.is_finite() && f_left * f_right <= 0.0 {
            // A root exactly on a grid point is reported once.
            if !(f_left == 0.0 && out.last().is_some_and(|&(_, b)| b == left)) {
                out.push((left, right));
            }
        }
        left = right;
        f_left = f_right;
    }
    out
}

/// Bisection on a sign-changing bracket until its width is below `tol`.
pub(crate) fn bisect<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }
    if !(f_lo * f_hi < 0.0) {
        return Err(Error::RootFinding(format!(
            "no sign change on [{lo}, {hi}]: f = ({f_lo}, {f_hi})"
        )));
    }
    // 200 halvings exhaust f64 resolution on any finite bracket.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid == lo || mid == hi {
            return Ok(mid);
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if !f_mid.is_finite() {
            return Err(Error::RootFinding(format!("f({mid}) = {f_mid}")));
        }
        if (f_mid < 0.0) == (f_lo < 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}
