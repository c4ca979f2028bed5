use num_bigint::{BigInt, Sign};
use num_traits::{One, Signed, Zero};

use super::{Precision, RatInterval, Rational};
use crate::error::{Error, Result};

/// Exact square root of a non-negative rational whose numerator and denominator are perfect squares.
fn exact_sqrt(r: &Rational) -> Option<Rational> {
    let n = r.numer().sqrt();
    let d = r.denom().sqrt();
    (&n * &n == *r.numer() && &d * &d == *r.denom()).then(|| Rational::new(n, d))
}

fn floor_scaled(r: &Rational, shift: u32) -> BigInt {
    num_integer::Integer::div_floor(&(r.numer() << shift), r.denom())
}

fn ceil_scaled(r: &Rational, shift: u32) -> BigInt {
    -num_integer::Integer::div_floor(&(-(r.numer() << shift)), r.denom())
}

/// Certified enclosure `[l, h]` of `√v` with `l² ≤ v.lo` and `h² ≥ v.hi`.
///
/// Endpoints are multiples of `2^-(bits+2)` obtained from integer square roots of
/// outward-rounded scaled endpoints; perfect-square point inputs are returned exactly.
pub fn sqrt_enclosure(v: &RatInterval, p: Precision) -> Result<RatInterval> {
    if v.lo().is_negative() {
        return Err(Error::Domain(format!(
            "square root of interval {v} with negative part"
        )));
    }
    if v.is_point() {
        if let Some(r) = exact_sqrt(v.lo()) {
            return Ok(RatInterval::point(r));
        }
    }
    let s = p.bits() + 2;
    let denom = BigInt::one() << s;
    // floor(√floor(lo·4^s)) ≤ √(lo)·2^s ≤ ... ≤ ceil(√ceil(hi·4^s))
    let lo_scaled = floor_scaled(v.lo(), 2 * s);
    let lo_root = lo_scaled.sqrt();
    let hi_scaled = ceil_scaled(v.hi(), 2 * s);
    let mut hi_root = hi_scaled.sqrt();
    if &hi_root * &hi_root != hi_scaled {
        hi_root += 1;
    }
    debug_assert!(lo_root.sign() != Sign::Minus);
    let lo = if lo_root.is_zero() {
        Rational::zero()
    } else {
        Rational::new(lo_root, denom.clone())
    };
    Ok(RatInterval::new(lo, Rational::new(hi_root, denom)))
}
