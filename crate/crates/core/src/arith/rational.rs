use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always stored in lowest terms with a positive denominator.
pub type Rational = BigRational;

/// `2^n` as an exact integer-valued rational (negative `n` gives `2^-|n|`).
pub fn pow2(n: i64) -> Rational {
    let p = BigInt::one() << n.unsigned_abs();
    if n >= 0 {
        Rational::from_integer(p)
    } else {
        Rational::new(BigInt::one(), p)
    }
}

/// Parses `"p"`, `"p/q"` and the dyadic shorthand `"k/2^n"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("malformed rational {s:?}"));
    let parse_int = |t: &str| -> Result<BigInt> {
        let t = t.trim();
        let digits = t.strip_prefix(['-', '+']).unwrap_or(t);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        t.parse::<BigInt>().map_err(|_| bad())
    };
    match s.split_once('/') {
        None => Ok(Rational::from_integer(parse_int(s)?)),
        Some((p, q)) => {
            let num = parse_int(p)?;
            let den = match q.trim().split_once('^') {
                Some((base, exp)) => {
                    let base = parse_int(base)?;
                    let exp: u32 = exp.trim().parse().map_err(|_| bad())?;
                    num_traits::pow(base, exp as usize)
                }
                None => parse_int(q)?,
            };
            if den.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            Ok(Rational::new(num, den))
        }
    }
}

/// Formats as `"p/q"`, omitting `q` when it is 1.
pub fn format_rational(r: &Rational) -> String {
    r.to_string()
}

/// Serde adapter that writes rationals as `"p/q"` strings.
pub mod rational_serde {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rational, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Rational, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_all_forms() {
        assert_eq!(
            parse_rational("7").unwrap(),
            Rational::from_integer(7.into())
        );
        assert_eq!(
            parse_rational("-6/4").unwrap(),
            Rational::new((-3).into(), 2.into())
        );
        assert_eq!(
            parse_rational("3/2^3").unwrap(),
            Rational::new(3.into(), 8.into())
        );
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.5").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn formats_without_unit_denominator() {
        assert_eq!(format_rational(&parse_rational("10/5").unwrap()), "2");
        assert_eq!(format_rational(&parse_rational("17/35").unwrap()), "17/35");
        assert_eq!(format_rational(&pow2(-3)), "1/8");
    }
}
