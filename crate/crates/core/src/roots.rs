//! Bracketing bisection for monotone scalar equations.

use crate::error::{Error, Result};
use crate::scalar::Real;

const MAX_DOUBLINGS: usize = 2048;
const MAX_BISECTIONS: usize = 4096;

/// Bisection on `[lo, hi]` where `f(lo)` and `f(hi)` have opposite signs.
///
/// Stops once the bracket is narrower than `rel_tol * max(|lo|, |hi|)` or can
/// no longer be split in floating point.
pub fn bisect<T: Real, F>(f: F, mut lo: T, mut hi: T, rel_tol: T) -> Result<T>
where
    F: Fn(T) -> T,
{
    let rel_tol = T::clamp_tol(rel_tol);
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo.is_nan() || fhi.is_nan() {
        return Err(Error::NoBracket(format!("f is NaN at an end of [{lo}, {hi}]")));
    }
    if flo == T::zero() {
        return Ok(lo);
    }
    if fhi == T::zero() {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::NoBracket(format!("no sign change on [{lo}, {hi}]: f = ({flo}, {fhi})")));
    }
    let two = T::lit(2.0);
    for _ in 0..MAX_BISECTIONS {
        let mid = lo + (hi - lo) / two;
        if mid <= lo || mid >= hi {
            break;
        }
        let fmid = f(mid);
        if fmid == T::zero() {
            return Ok(mid);
        }
        if fmid.signum() == flo.signum() {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
        if hi - lo <= rel_tol * lo.abs().max(hi.abs()) {
            break;
        }
    }
    Ok(lo + (hi - lo) / T::lit(2.0))
}

/// Doubles `hi` (keeping `lo` fixed) until `f` changes sign on `[lo, hi]`.
pub fn expand_upward<T: Real, F>(f: &F, lo: T, mut hi: T) -> Result<(T, T)>
where
    F: Fn(T) -> T,
{
    if hi <= lo {
        return Err(Error::NoBracket(format!("empty initial bracket [{lo}, {hi}]")));
    }
    let flo = f(lo);
    let width = hi - lo;
    let mut step = width;
    for _ in 0..MAX_DOUBLINGS {
        let fhi = f(hi);
        if fhi.is_nan() {
            break;
        }
        if fhi == T::zero() || fhi.signum() != flo.signum() {
            return Ok((lo, hi));
        }
        step = step * T::lit(2.0);
        hi = lo + step;
        if !hi.is_finite() {
            break;
        }
    }
    Err(Error::NoBracket(format!("no sign change above {lo}")))
}

/// Root of an increasing function on `(lo, ∞)`, starting from the guess
/// bracket `[lo, hi]` and doubling its width as needed.
pub fn increasing_root<T: Real, F>(f: F, lo: T, hi: T, rel_tol: T) -> Result<T>
where
    F: Fn(T) -> T,
{
    let (a, b) = expand_upward(&f, lo, hi)?;
    bisect(f, a, b, rel_tol)
}
