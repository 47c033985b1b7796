//! Scalar root bracketing, bisection and golden-section minimization.

use crate::error::{Error, Result};

/// Scans `[start, end]` in steps of `step` and returns the first interval on
/// which `f` changes sign (or hits zero).
pub fn scan_sign_change(
    f: impl Fn(f64) -> f64,
    start: f64,
    end: f64,
    step: f64,
) -> Result<(f64, f64)> {
    if !(step > 0.0) || !(end > start) {
        return Err(Error::InvalidArgument { name: "scan step", value: step });
    }
    let mut a = start;
    let mut fa = f(a);
    if fa == 0.0 {
        return Ok((a, a));
    }
    let mut i = 1u64;
    loop {
        let b = (start + i as f64 * step).min(end);
        let fb = f(b);
        if fb == 0.0 || fa.signum() != fb.signum() {
            return Ok((a, b));
        }
        if b >= end {
            return Err(Error::NoBracket);
        }
        a = b;
        fa = fb;
        i += 1;
    }
}

/// Bisection on a bracket `[lo, hi]` with `f(lo)` and `f(hi)` of opposite
/// sign, to absolute tolerance `tol` in the abscissa.
pub fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::NoBracket);
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fmid = f(mid);
        if fmid == 0.0 {
            return Ok(mid);
        }
        if fmid.signum() == flo.signum() {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Golden-section search for a minimum of a unimodal `f` on `[lo, hi]`.
/// Returns `(x_min, f(x_min))`.
pub fn golden_section_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
    // 1/phi
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 < f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    let x = 0.5 * (lo + hi);
    (x, f(x))
}
