//! Bisection for monotone functions.

use crate::error::{Error, Result};

/// A root located by bisection: `value` lies in `[lo, hi]` and
/// `residual = f(value) - target`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BracketedRoot {
    pub lo: f64,
    pub hi: f64,
    pub value: f64,
    pub residual: f64,
}

const MAX_BISECTIONS: usize = 2_000;

/// Solves `f(x) = target` for `f` monotone (either direction) on `[lo, hi]`.
///
/// Stops once the bracket is no wider than `tol`, or cannot be narrowed further in
/// floating point.
pub fn bisect_monotone<F>(f: F, lo: f64, hi: f64, target: f64, tol: f64) -> Result<BracketedRoot>
where
    F: Fn(f64) -> f64,
{
    try_bisect_monotone(|x| Ok(f(x)), lo, hi, target, tol)
}

/// [`bisect_monotone`] for functions whose evaluation can fail.
pub fn try_bisect_monotone<F>(
    mut f: F,
    lo: f64,
    hi: f64,
    target: f64,
    tol: f64,
) -> Result<BracketedRoot>
where
    F: FnMut(f64) -> Result<f64>,
{
    if !(lo <= hi) || !(tol > 0.0) || !target.is_finite() {
        return Err(Error::domain(format!(
            "bisection needs lo <= hi, tol > 0 and a finite target (lo = {lo}, hi = {hi}, tol = {tol})"
        )));
    }
    let f_lo = f(lo)?;
    let f_hi = f(hi)?;
    let below_lo = f_lo - target;
    let below_hi = f_hi - target;
    if below_lo == 0.0 {
        return Ok(BracketedRoot {
            lo,
            hi: lo,
            value: lo,
            residual: 0.0,
        });
    }
    if below_hi == 0.0 {
        return Ok(BracketedRoot {
            lo: hi,
            hi,
            value: hi,
            residual: 0.0,
        });
    }
    if below_lo.signum() == below_hi.signum() || below_lo.is_nan() || below_hi.is_nan() {
        return Err(Error::NoBracket { f_lo, f_hi, target });
    }
    let increasing = below_hi > 0.0;

    let (mut a, mut b) = (lo, hi);
    for _ in 0..MAX_BISECTIONS {
        if b - a <= tol {
            break;
        }
        let mid = a + 0.5 * (b - a);
        if mid <= a || mid >= b {
            break;
        }
        let r = f(mid)? - target;
        if r == 0.0 {
            return Ok(BracketedRoot {
                lo: mid,
                hi: mid,
                value: mid,
                residual: 0.0,
            });
        }
        if (r > 0.0) == increasing {
            b = mid;
        } else {
            a = mid;
        }
    }
    let value = a + 0.5 * (b - a);
    let residual = f(value)? - target;
    Ok(BracketedRoot {
        lo: a,
        hi: b,
        value,
        residual,
    })
}
