use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use super::{rational_serde, Rational};
use crate::error::{Error, Result};

/// Closed interval `[lo, hi]` with exact rational endpoints.
///
/// Every interval produced by an operation encloses the exact real value of the
/// expression it was computed from.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RatInterval {
    #[serde(with = "rational_serde")]
    lo: Rational,
    #[serde(with = "rational_serde")]
    hi: Rational,
}

/// Outcome of a strict comparison between two enclosures. Never wrong, possibly undecided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum CompareResult {
    Less,
    Greater,
    Inconclusive,
}

impl CompareResult {
    pub fn reversed(self) -> Self {
        match self {
            CompareResult::Less => CompareResult::Greater,
            CompareResult::Greater => CompareResult::Less,
            CompareResult::Inconclusive => CompareResult::Inconclusive,
        }
    }
}

impl RatInterval {
    /// # Panics
    /// Panics if `lo > hi`.
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "interval endpoints out of order: {lo} > {hi}");
        RatInterval { lo, hi }
    }

    pub fn point(v: Rational) -> Self {
        RatInterval {
            lo: v.clone(),
            hi: v,
        }
    }

    pub fn from_integer(n: i64) -> Self {
        RatInterval::point(Rational::from_integer(n.into()))
    }

    pub fn zero() -> Self {
        RatInterval::from_integer(0)
    }

    pub fn one() -> Self {
        RatInterval::from_integer(1)
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(2.into())
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    pub fn contains(&self, v: &Rational) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn overlaps(&self, other: &RatInterval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    /// Smallest interval containing both.
    pub fn hull(&self, other: &RatInterval) -> RatInterval {
        RatInterval {
            lo: self.lo.clone().min(other.lo.clone()),
            hi: self.hi.clone().max(other.hi.clone()),
        }
    }

    pub fn abs(&self) -> RatInterval {
        if !self.lo.is_negative() {
            self.clone()
        } else if !self.hi.is_positive() {
            -self
        } else {
            RatInterval {
                lo: Rational::zero(),
                hi: self.hi.clone().max(-&self.lo),
            }
        }
    }

    /// `x²` over the interval; tighter than `self * self` when the interval straddles 0.
    pub fn square(&self) -> RatInterval {
        let a = self.abs();
        RatInterval {
            lo: &a.lo * &a.lo,
            hi: &a.hi * &a.hi,
        }
    }

    pub fn recip(&self) -> Result<RatInterval> {
        if self.contains_zero() {
            return Err(Error::Domain(format!(
                "reciprocal of interval {self} containing 0"
            )));
        }
        Ok(RatInterval {
            lo: self.hi.recip(),
            hi: self.lo.recip(),
        })
    }

    pub fn checked_div(&self, other: &RatInterval) -> Result<RatInterval> {
        Ok(self * &other.recip()?)
    }

    pub fn scale(&self, c: &Rational) -> RatInterval {
        self * &RatInterval::point(c.clone())
    }

    /// `Less` iff `self.hi < other.lo`, `Greater` iff `self.lo > other.hi`.
    pub fn compare_strict(&self, other: &RatInterval) -> CompareResult {
        if self.hi < other.lo {
            CompareResult::Less
        } else if self.lo > other.hi {
            CompareResult::Greater
        } else {
            CompareResult::Inconclusive
        }
    }

    /// Certifies `value ≥ 0` for every value in the interval.
    pub fn certainly_nonneg(&self) -> bool {
        !self.lo.is_negative()
    }

    pub fn certainly_positive(&self) -> bool {
        self.lo.is_positive()
    }

    pub fn certainly_negative(&self) -> bool {
        self.hi.is_negative()
    }

    /// Rounds endpoints outward to multiples of `2^-bits` when their denominators
    /// exceed `2^(bits+8)`; exact short endpoints are left alone.
    pub fn coarsen(&self, bits: u32) -> RatInterval {
        let limit = u64::from(bits) + 8;
        let needs = |r: &Rational| r.denom().bits() > limit;
        if !needs(&self.lo) && !needs(&self.hi) {
            return self.clone();
        }
        let scale = BigInt::one() << bits;
        let round = |r: &Rational, up: bool| -> Rational {
            if !needs(r) {
                return r.clone();
            }
            let scaled = r.numer() * &scale;
            let (q, rem) = scaled.div_mod_floor(r.denom());
            let q = if up && !rem.is_zero() { q + 1 } else { q };
            Rational::new(q, scale.clone())
        };
        RatInterval {
            lo: round(&self.lo, false),
            hi: round(&self.hi, true),
        }
    }
}

impl fmt::Display for RatInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

impl Add for &RatInterval {
    type Output = RatInterval;
    fn add(self, o: &RatInterval) -> RatInterval {
        RatInterval {
            lo: &self.lo + &o.lo,
            hi: &self.hi + &o.hi,
        }
    }
}

impl Sub for &RatInterval {
    type Output = RatInterval;
    fn sub(self, o: &RatInterval) -> RatInterval {
        RatInterval {
            lo: &self.lo - &o.hi,
            hi: &self.hi - &o.lo,
        }
    }
}

impl Mul for &RatInterval {
    type Output = RatInterval;
    fn mul(self, o: &RatInterval) -> RatInterval {
        let cands = [
            &self.lo * &o.lo,
            &self.lo * &o.hi,
            &self.hi * &o.lo,
            &self.hi * &o.hi,
        ];
        let lo = cands.iter().min().unwrap().clone();
        let hi = cands.iter().max().unwrap().clone();
        RatInterval { lo, hi }
    }
}

impl Neg for &RatInterval {
    type Output = RatInterval;
    fn neg(self) -> RatInterval {
        RatInterval {
            lo: -&self.hi,
            hi: -&self.lo,
        }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for RatInterval {
            type Output = RatInterval;
            fn $m(self, o: RatInterval) -> RatInterval {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for RatInterval {
    type Output = RatInterval;
    fn neg(self) -> RatInterval {
        -&self
    }
}

/// Binary operation selector for [`RatInterval::apply`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl RatInterval {
    pub fn apply(&self, op: IntervalOp, other: &RatInterval) -> Result<RatInterval> {
        Ok(match op {
            IntervalOp::Add => self + other,
            IntervalOp::Sub => self - other,
            IntervalOp::Mul => self * other,
            IntervalOp::Div => self.checked_div(other)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::parse_rational;

    fn iv(a: &str, b: &str) -> RatInterval {
        RatInterval::new(parse_rational(a).unwrap(), parse_rational(b).unwrap())
    }

    #[test]
    fn basic_ops() {
        assert_eq!(
            iv("1", "1").apply(IntervalOp::Add, &iv("2", "2")).unwrap(),
            iv("3", "3")
        );
        assert_eq!(
            iv("0", "1").apply(IntervalOp::Mul, &iv("-1", "1")).unwrap(),
            iv("-1", "1")
        );
        assert!(matches!(
            iv("1", "2").apply(IntervalOp::Div, &iv("0", "1")),
            Err(Error::Domain(_))
        ));
        assert_eq!(
            iv("1", "2").apply(IntervalOp::Div, &iv("2", "4")).unwrap(),
            iv("1/4", "1")
        );
        assert_eq!(iv("-2", "1").square(), iv("0", "4"));
    }

    #[test]
    fn compare() {
        assert_eq!(
            iv("0", "1").compare_strict(&iv("2", "3")),
            CompareResult::Less
        );
        assert_eq!(
            iv("0", "2").compare_strict(&iv("1", "3")),
            CompareResult::Inconclusive
        );
        assert_eq!(
            iv("2", "3").compare_strict(&iv("0", "1")),
            CompareResult::Greater
        );
    }

    #[test]
    fn coarsening_is_outward_and_keeps_short_endpoints() {
        let x = iv("1/3", "1/3");
        assert_eq!(x.coarsen(4), x);
        let y = RatInterval::point(Rational::new(1.into(), BigInt::from(3) << 40));
        let c = y.coarsen(16);
        assert!(c.contains(y.lo()));
        assert!(c.width() <= crate::arith::pow2(-16));
    }

    #[test]
    fn serializes_as_strings() {
        let s = serde_json::to_string(&iv("-1/2", "3")).unwrap();
        assert_eq!(s, r#"{"lo":"-1/2","hi":"3"}"#);
        let back: RatInterval = serde_json::from_str(&s).unwrap();
        assert_eq!(back, iv("-1/2", "3"));
    }
}
