use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{parse_rational, Rational};
use crate::error::{Error, Result};

/// `k / 2^n` in normalized form: `k` odd, or `k = 0` with `n = 0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DyadicRational {
    k: BigInt,
    n: u32,
}

impl DyadicRational {
    pub fn new(k: impl Into<BigInt>, n: u32) -> Self {
        let mut k = k.into();
        let mut n = n;
        if k.is_zero() {
            return DyadicRational { k, n: 0 };
        }
        while n > 0 && k.is_even() {
            k >>= 1;
            n -= 1;
        }
        DyadicRational { k, n }
    }

    pub fn zero() -> Self {
        DyadicRational::new(0, 0)
    }

    pub fn half() -> Self {
        DyadicRational::new(1, 1)
    }

    pub fn numerator(&self) -> &BigInt {
        &self.k
    }

    /// The exponent `n` of the normalized form.
    pub fn exponent(&self) -> u32 {
        self.n
    }

    pub fn to_rational(&self) -> Rational {
        Rational::new(self.k.clone(), BigInt::one() << self.n)
    }

    /// Converts an exact rational whose denominator is a power of two.
    pub fn from_rational(r: &Rational) -> Option<Self> {
        let den = r.denom();
        let n = den.bits().checked_sub(1)?;
        (*den == BigInt::one() << n).then(|| DyadicRational::new(r.numer().clone(), n as u32))
    }

    /// Grid level: the least `n ≥ 1` with the point in `D_n` (ignoring the range check).
    pub fn level(&self) -> u32 {
        self.n.max(1)
    }

    /// Whether the value lies in the half-unit interval `[0, 1/2]`.
    pub fn in_half_unit(&self) -> bool {
        !self.k.is_negative() && self.n >= 1 && self.k <= (BigInt::one() << (self.n - 1))
            || self.k.is_zero()
    }

    /// Exact membership in `D_n = {k/2^n : 0 ≤ k ≤ 2^(n-1)}`.
    pub fn in_grid(&self, n: u32) -> bool {
        n >= 1 && self.in_half_unit() && self.level() <= n
    }

    /// The two neighbors `t ± 2^-n` in `D_(n-1)`, for a point first appearing at level `n ≥ 2`.
    pub fn parents(&self) -> Option<(DyadicRational, DyadicRational)> {
        if self.n < 2 {
            return None;
        }
        Some((
            DyadicRational::new(&self.k - 1, self.n),
            DyadicRational::new(&self.k + 1, self.n),
        ))
    }

    /// Index of the point in the grid `D_level` (so that `t = index / 2^level`).
    pub fn grid_index(&self, level: u32) -> Option<usize> {
        if self.n > level {
            return None;
        }
        let idx: BigInt = &self.k << (level - self.n);
        usize::try_from(idx).ok()
    }

    pub fn midpoint(&self, other: &DyadicRational) -> DyadicRational {
        let m = self.n.max(other.n);
        let a: BigInt = &self.k << (m - self.n);
        let b: BigInt = &other.k << (m - other.n);
        DyadicRational::new(a + b, m + 1)
    }
}

impl Ord for DyadicRational {
    fn cmp(&self, other: &Self) -> Ordering {
        let n = self.n.max(other.n);
        let a: BigInt = &self.k << (n - self.n);
        let b: BigInt = &other.k << (n - other.n);
        a.cmp(&b)
    }
}

impl PartialOrd for DyadicRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for DyadicRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.n == 0 {
            write!(f, "{}", self.k)
        } else {
            write!(f, "{}/{}", self.k, BigInt::one() << self.n)
        }
    }
}

impl FromStr for DyadicRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let r = parse_rational(s)?;
        DyadicRational::from_rational(&r)
            .ok_or_else(|| Error::Domain(format!("{s} is not a binary rational")))
    }
}
