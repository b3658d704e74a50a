//! Inversion of strictly monotone functions by bracketed bisection.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const MAX_ITERATIONS: usize = 200;
pub const RELATIVE_TOLERANCE: f64 = 1e-12;

/// Monotone direction of a real function.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Increasing,
    Decreasing,
}

impl Direction {
    pub fn flip(self) -> Self {
        match self {
            Direction::Increasing => Direction::Decreasing,
            Direction::Decreasing => Direction::Increasing,
        }
    }
}

/// Solves `f(x) = target` for a strictly monotone `f` on the open interval
/// `(lower, upper)` (endpoints may be infinite).
///
/// The bracket is grown geometrically from `seed` until it encloses the
/// target, then halved until its width falls below the relative tolerance or
/// the iteration cap is hit. `f` may fail (overflow); such points are treated
/// as lying beyond the target in the direction of travel.
pub fn invert_monotone<T, F>(
    f: F,
    direction: Direction,
    lower: T,
    upper: T,
    seed: T,
    target: T,
) -> Result<T>
where
    T: Scalar,
    F: Fn(T) -> Result<T>,
{
    // Work with an increasing function: g(x) = f(x) - target or its negation.
    let sign = match direction {
        Direction::Increasing => T::one(),
        Direction::Decreasing => -T::one(),
    };
    let excess = |x: T| -> Option<T> {
        match f(x) {
            Ok(v) if v.is_finite() => Some(sign * (v - target)),
            _ => None,
        }
    };

    let two = T::lit(2.0);
    let half = T::lit(0.5);
    let mut step = T::one().max(seed.abs());

    let mut lo = seed;
    let mut hi = seed;
    // Expand downward until excess(lo) <= 0.
    let mut found_lo = matches!(excess(lo), Some(e) if e <= T::zero());
    let mut lo_fails = false;
    let mut iter = 0;
    while !found_lo {
        iter += 1;
        if iter > 2 * MAX_ITERATIONS {
            return Err(Error::NonFinite { at: target.as_f64() });
        }
        let cand = lo - step;
        lo = if cand > lower { cand } else { lower + (lo - lower) * half };
        step *= two;
        match excess(lo) {
            Some(e) if e <= T::zero() => found_lo = true,
            Some(_) => {}
            None => {
                found_lo = true;
                lo_fails = true;
            }
        }
    }
    step = T::one().max(seed.abs());
    let mut found_hi = matches!(excess(hi), Some(e) if e >= T::zero());
    iter = 0;
    while !found_hi {
        iter += 1;
        if iter > 2 * MAX_ITERATIONS {
            return Err(Error::NonFinite { at: target.as_f64() });
        }
        let cand = hi + step;
        hi = if cand < upper { cand } else { upper - (upper - hi) * half };
        step *= two;
        match excess(hi) {
            Some(e) if e >= T::zero() => found_hi = true,
            // Overflow above the crossing point still brackets the root.
            None => found_hi = true,
            Some(_) => {}
        }
    }

    let tol = T::lit(RELATIVE_TOLERANCE);
    for _ in 0..MAX_ITERATIONS {
        let mid = lo + (hi - lo) * half;
        if mid <= lo || mid >= hi {
            break;
        }
        match excess(mid) {
            Some(e) if e == T::zero() => return Ok(mid),
            Some(e) if e < T::zero() => lo = mid,
            Some(_) => hi = mid,
            None if lo_fails => lo = mid,
            None => hi = mid,
        }
        let scale = lo.abs().max(hi.abs());
        if hi - lo <= tol * scale {
            break;
        }
    }
    Ok(lo + (hi - lo) * half)
}
