use num_traits::{One, Zero};
use rayon::prelude::*;

use super::mean::nonlinear_mean;
use crate::arith::{pow2, refine, DyadicRational, Precision, RatInterval, Rational};
use crate::error::{Error, Result};

fn check_domain(t: &DyadicRational) -> Result<()> {
    if !t.in_half_unit() {
        return Err(Error::Domain(format!("{t} is not in [0, 1/2]")));
    }
    Ok(())
}

/// Working precision for a computation that chains `depth` means.
fn working(p: Precision, depth: u32) -> Precision {
    p.plus(depth + 16)
}

/// Enclosure of `A(t)` of width at most `2^-bits`.
///
/// Follows the bisection path from `[0, 1/2]` down to `t`: each midpoint of the
/// current bracket is a grid point whose construction parents are the bracket ends.
pub fn bridge_value(t: &DyadicRational, p: Precision) -> Result<RatInterval> {
    check_domain(t)?;
    let target = pow2(-i64::from(p.bits()));
    let depth = t.level();
    refine(
        working(p, depth),
        || format!("A({t}) to {} bits", p.bits()),
        |w| {
            let v = descend_to(t, w);
            Ok((v.width() <= target).then_some(v))
        },
    )
}

fn descend_to(t: &DyadicRational, w: Precision) -> RatInterval {
    let mut lo = (DyadicRational::zero(), RatInterval::zero());
    let mut hi = (DyadicRational::half(), RatInterval::one());
    if *t == lo.0 {
        return lo.1;
    }
    if *t == hi.0 {
        return hi.1;
    }
    loop {
        let mid = lo.0.midpoint(&hi.0);
        let value = nonlinear_mean(&lo.1, &hi.1, w);
        match mid.cmp(t) {
            std::cmp::Ordering::Equal => return value,
            std::cmp::Ordering::Less => lo = (mid, value),
            std::cmp::Ordering::Greater => hi = (mid, value),
        }
    }
}

/// Enclosures of `A` on the whole grid `D_level`.
///
/// Snapshots are immutable; [`BridgeCache::refined`] produces a new one.
#[derive(Debug, Clone)]
pub struct BridgeCache {
    level: u32,
    precision: Precision,
    values: Vec<RatInterval>,
}

impl BridgeCache {
    /// Builds the grid with every enclosure of width at most `2^-bits` and
    /// neighbouring enclosures strictly ordered.
    pub fn build(level: u32, p: Precision) -> Result<Self> {
        if level == 0 || level > 24 {
            return Err(Error::Domain(format!(
                "grid level {level} is outside 1..=24"
            )));
        }
        let target = pow2(-i64::from(p.bits()));
        refine(
            working(p, level),
            || format!("grid D_{level} at {} bits", p.bits()),
            |w| {
                let values = grid_values(level, w);
                let narrow = values.iter().all(|v| v.width() <= target);
                let ordered = values.windows(2).all(|pair| pair[0].hi() < pair[1].lo());
                Ok((narrow && ordered).then_some(BridgeCache {
                    level,
                    precision: p,
                    values,
                }))
            },
        )
    }

    /// Same grid at doubled precision.
    pub fn refined(&self) -> Result<Self> {
        let next = self
            .precision
            .doubled()
            .ok_or_else(|| Error::Inconclusive {
                what: format!("refinement of grid D_{}", self.level),
                cap: self.precision.cap(),
            })?;
        BridgeCache::build(self.level, next)
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn precision(&self) -> Precision {
        self.precision
    }

    /// Enclosures in grid order, index `i` holding `A(i / 2^level)`.
    pub fn values(&self) -> &[RatInterval] {
        &self.values
    }

    pub fn point(&self, i: usize) -> DyadicRational {
        DyadicRational::new(i, self.level)
    }

    pub fn get(&self, t: &DyadicRational) -> Option<&RatInterval> {
        t.grid_index(self.level).and_then(|i| self.values.get(i))
    }

    pub fn iter(&self) -> impl Iterator<Item = (DyadicRational, &RatInterval)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(|(i, v)| (self.point(i), v))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn grid_values(level: u32, w: Precision) -> Vec<RatInterval> {
    let mut values = vec![RatInterval::zero(), RatInterval::one()];
    for _ in 2..=level {
        let fresh: Vec<RatInterval> = values
            .par_windows(2)
            .map(|pair| nonlinear_mean(&pair[0], &pair[1], w))
            .collect();
        let mut next = Vec::with_capacity(values.len() + fresh.len());
        for (i, v) in values.into_iter().enumerate() {
            next.push(v);
            if let Some(f) = fresh.get(i) {
                next.push(f.clone());
            }
        }
        values = next;
    }
    values
}

/// Dyadic bracket `[t_lo, t_hi]` of `A^{-1}(x)` with `t_hi - t_lo <= tol`.
///
/// Interior brackets satisfy `A(t_lo) < x < A(t_hi)` with certified comparisons;
/// when `x` equals a grid value exactly the bracket collapses to that point.
pub fn bridge_inverse(
    x: &Rational,
    tol: &DyadicRational,
    p: Precision,
) -> Result<(DyadicRational, DyadicRational)> {
    if x < &Rational::zero() || x > &Rational::one() {
        return Err(Error::Domain(format!("{x} is not in [0, 1]")));
    }
    if tol.to_rational() <= Rational::zero() {
        return Err(Error::Domain("tolerance must be positive".into()));
    }
    if x.is_zero() {
        return Ok((DyadicRational::zero(), DyadicRational::zero()));
    }
    if x.is_one() {
        return Ok((DyadicRational::half(), DyadicRational::half()));
    }
    let tol = tol.to_rational();
    let mut steps = 0u32;
    while pow2(-i64::from(steps) - 1) > tol {
        steps += 1;
    }
    let xi = RatInterval::point(x.clone());
    refine(
        working(p.plus(steps), steps),
        || format!("A^-1({x})"),
        |w| {
            let mut lo = (DyadicRational::zero(), RatInterval::zero());
            let mut hi = (DyadicRational::half(), RatInterval::one());
            while (hi.0.to_rational() - lo.0.to_rational()) > tol {
                let mid = lo.0.midpoint(&hi.0);
                let value = nonlinear_mean(&lo.1, &hi.1, w);
                if value.hi() < x {
                    lo = (mid, value);
                } else if value.lo() > x {
                    hi = (mid, value);
                } else if value == xi {
                    return Ok(Some((mid.clone(), mid)));
                } else {
                    return Ok(None);
                }
            }
            Ok(Some((lo.0, hi.0)))
        },
    )
}

/// Enclosure of `B(x) = 1 - A^{-1}(x)` for `x <= 1` of width at most `2^-bits`.
///
/// `x > 1` is refused with the known upper bound `1/(1+x^2)` attached.
pub fn big_b(x: &Rational, p: Precision) -> Result<RatInterval> {
    if x <= &Rational::zero() {
        return Ok(RatInterval::one());
    }
    if x > &Rational::one() {
        return Err(Error::BeyondKnownRange {
            upper_bound: tilde_b(x),
        });
    }
    let tol = DyadicRational::new(1, p.bits());
    let (lo, hi) = bridge_inverse(x, &tol, p)?;
    let one = Rational::one();
    Ok(RatInterval::new(
        &one - hi.to_rational(),
        &one - lo.to_rational(),
    ))
}

/// Enclosure of `B` over an interval of arguments, using that `B` is non-increasing.
pub fn big_b_interval(x: &RatInterval, p: Precision) -> Result<RatInterval> {
    if x.is_point() {
        return big_b(x.lo(), p);
    }
    let low = big_b(x.hi(), p)?;
    let high = big_b(x.lo(), p)?;
    Ok(RatInterval::new(low.lo().clone(), high.hi().clone()))
}

/// `1 / (1 + x^2)` for `x >= 0`, and `1` for `x <= 0`.
pub fn tilde_b(x: &Rational) -> Rational {
    if x <= &Rational::zero() {
        return Rational::one();
    }
    Rational::one() / (Rational::one() + x * x)
}

/// Enclosure of `tilde_b` over an interval (the function is non-increasing).
pub fn tilde_b_interval(x: &RatInterval) -> RatInterval {
    RatInterval::new(tilde_b(x.hi()), tilde_b(x.lo()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::parse_rational;

    fn d(s: &str) -> DyadicRational {
        s.parse().unwrap()
    }

    fn q(s: &str) -> Rational {
        parse_rational(s).unwrap()
    }

    #[test]
    fn endpoints_are_exact() {
        let p = Precision::default();
        assert_eq!(bridge_value(&d("0"), p).unwrap(), RatInterval::zero());
        assert_eq!(bridge_value(&d("1/2"), p).unwrap(), RatInterval::one());
        assert!(bridge_value(&d("5/8"), p).is_err());
    }

    #[test]
    fn quarter_is_inverse_root_five() {
        let a = bridge_value(&d("1/4"), Precision::default()).unwrap();
        let five = q("5");
        assert!(&five * a.lo() * a.lo() < Rational::one());
        assert!(&five * a.hi() * a.hi() > Rational::one());
        assert!(a.width() <= pow2(-128));
    }

    #[test]
    fn cache_agrees_with_descent() {
        let p = Precision::new(64);
        let cache = BridgeCache::build(5, p).unwrap();
        assert_eq!(cache.len(), 17);
        for (t, v) in cache.iter() {
            let direct = bridge_value(&t, p).unwrap();
            assert!(v.overlaps(&direct), "mismatch at {t}");
        }
        assert_eq!(cache.get(&d("1/2")), Some(&RatInterval::one()));
    }

    #[test]
    fn inverse_brackets() {
        let p = Precision::new(64);
        assert_eq!(
            bridge_inverse(&q("0"), &d("1/1024"), p).unwrap(),
            (d("0"), d("0"))
        );
        assert_eq!(
            bridge_inverse(&q("1"), &d("1/1024"), p).unwrap(),
            (d("1/2"), d("1/2"))
        );
        let a = bridge_value(&d("1/4"), p).unwrap();
        let (lo, hi) = bridge_inverse(&a.midpoint(), &d("1/1024"), p).unwrap();
        assert!(lo <= d("1/4") && d("1/4") <= hi);
        assert!(hi.to_rational() - lo.to_rational() <= q("1/1024"));
        assert!(bridge_inverse(&q("3/2"), &d("1/4"), p).is_err());
    }

    #[test]
    fn big_b_values() {
        let p = Precision::default();
        assert_eq!(big_b(&q("-3"), p).unwrap(), RatInterval::one());
        assert_eq!(big_b(&q("1"), p).unwrap(), RatInterval::point(q("1/2")));
        match big_b(&q("2"), p) {
            Err(Error::BeyondKnownRange { upper_bound }) => assert_eq!(upper_bound, q("1/5")),
            other => panic!("unexpected {other:?}"),
        }
        let a = bridge_value(&d("1/4"), p).unwrap();
        assert!(big_b_interval(&a, p).unwrap().contains(&q("3/4")));
    }

    #[test]
    fn tilde_b_values() {
        assert_eq!(tilde_b(&q("0")), q("1"));
        assert_eq!(tilde_b(&q("1")), q("1/2"));
        assert_eq!(tilde_b(&q("2")), q("1/5"));
        assert_eq!(tilde_b(&q("-7")), q("1"));
    }
}
