use num_traits::{One, Signed};

use crate::arith::{sqrt_enclosure, Precision, RatInterval, Rational};
use crate::error::{Error, Result};

/// Extra bits carried by square roots so that the quotient still meets the target width.
const GUARD_BITS: u32 = 8;

/// Enclosure of `M[a,b] = (a+b) / sqrt(4 + (a-b)^2)`.
pub fn nonlinear_mean(a: &RatInterval, b: &RatInterval, p: Precision) -> RatInterval {
    let sum = a + b;
    let diff = a - b;
    let radicand = &diff.square() + &RatInterval::from_integer(4);
    let root = sqrt_enclosure(&radicand, p.plus(GUARD_BITS)).expect("radicand is at least 4");
    sum.checked_div(&root)
        .expect("root is at least 2")
        .coarsen(p.bits() + GUARD_BITS)
}

/// Enclosure of `X(x, tau) = (x + tau) / sqrt(1 - tau^2)`.
pub fn x_map(x: &RatInterval, tau: &RatInterval, p: Precision) -> Result<RatInterval> {
    let one = Rational::one();
    if tau.lo() <= &-one.clone() || tau.hi() >= &one {
        return Err(Error::Domain(format!("tau {tau} is not inside (-1, 1)")));
    }
    let radicand = &RatInterval::one() - &tau.square();
    let root = sqrt_enclosure(&radicand, p.plus(GUARD_BITS))?;
    if !root.lo().is_positive() {
        return Err(Error::Inconclusive {
            what: format!("sqrt(1 - tau^2) for tau {tau}"),
            cap: p.cap(),
        });
    }
    Ok((x + tau).checked_div(&root)?.coarsen(p.bits() + GUARD_BITS))
}

/// Enclosure of `tau = d / sqrt(4 + d^2)` with `d = x_plus - x_minus`, so that
/// `x_minus = X(x, -tau)` and `x_plus = X(x, tau)` for `x = M[x_minus, x_plus]`.
pub fn tau_of(x_minus: &RatInterval, x_plus: &RatInterval, p: Precision) -> RatInterval {
    let d = x_plus - x_minus;
    let radicand = &d.square() + &RatInterval::from_integer(4);
    let root = sqrt_enclosure(&radicand, p.plus(GUARD_BITS)).expect("radicand is at least 4");
    d.checked_div(&root)
        .expect("root is at least 2")
        .coarsen(p.bits() + GUARD_BITS)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{parse_rational, pow2};

    fn pt(s: &str) -> RatInterval {
        RatInterval::point(parse_rational(s).unwrap())
    }

    #[test]
    fn mean_of_equal_arguments_is_exact() {
        let m = nonlinear_mean(&pt("1/2"), &pt("1/2"), Precision::default());
        assert_eq!(m, pt("1/2"));
    }

    #[test]
    fn mean_of_zero_and_one_is_inverse_root_five() {
        let p = Precision::new(100);
        let m = nonlinear_mean(&pt("0"), &pt("1"), p);
        let five = Rational::from_integer(5.into());
        assert!(&five * m.lo() * m.lo() <= Rational::one());
        assert!(&five * m.hi() * m.hi() >= Rational::one());
        assert!(m.width() <= pow2(-100));
    }

    #[test]
    fn x_map_examples() {
        let p = Precision::default();
        assert_eq!(x_map(&pt("3/4"), &pt("0"), p).unwrap(), pt("3/4"));
        assert_eq!(x_map(&pt("0"), &pt("3/5"), p).unwrap(), pt("3/4"));
        assert!(x_map(&pt("0"), &pt("1"), p).is_err());
        assert!(x_map(&pt("0"), &pt("-3/2"), p).is_err());
    }

    #[test]
    fn triple_round_trip() {
        let p = Precision::default();
        let (a, b) = (pt("0"), pt("1"));
        let x = nonlinear_mean(&a, &b, p);
        let tau = tau_of(&a, &b, p);
        assert!(x_map(&x, &-tau.clone(), p).unwrap().contains(a.lo()));
        assert!(x_map(&x, &tau, p).unwrap().contains(b.lo()));
    }
}
