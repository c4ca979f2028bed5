use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::mean::nonlinear_mean;
use super::value::{big_b_interval, tilde_b_interval, BridgeCache};
use crate::arith::{pow2, DyadicRational, Precision, RatInterval, Rational};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Check {
    Holds,
    Violated,
    Inconclusive,
}

/// Outcome of a grid audit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Audit {
    pub check: Check,
    /// Number of cases examined.
    pub cases: usize,
    /// Cases settled as exact equalities by construction.
    pub equalities: usize,
    /// First offending case, if any.
    pub first_problem: Option<String>,
}

impl Audit {
    pub fn holds(&self) -> bool {
        self.check == Check::Holds
    }
}

/// A candidate Bellman function that can be enclosed on intervals of arguments.
pub trait BellmanCandidate: Sync {
    fn enclose(&self, x: &RatInterval, p: Precision) -> Result<RatInterval>;
}

/// `B = 1 - A^{-1}` on `(-inf, 1]`.
#[derive(Debug, Clone, Copy, Default)]
pub struct BigB;

/// `1 / (1 + x^2)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct TildeB;

impl BellmanCandidate for BigB {
    fn enclose(&self, x: &RatInterval, p: Precision) -> Result<RatInterval> {
        big_b_interval(x, p)
    }
}

impl BellmanCandidate for TildeB {
    fn enclose(&self, x: &RatInterval, _p: Precision) -> Result<RatInterval> {
        Ok(tilde_b_interval(x))
    }
}

impl<F> BellmanCandidate for F
where
    F: Fn(&RatInterval, Precision) -> Result<RatInterval> + Sync,
{
    fn enclose(&self, x: &RatInterval, p: Precision) -> Result<RatInterval> {
        self(x, p)
    }
}

/// Certifies the sign of `B(M[x-, x+]) - (B(x-) + B(x+))/2`.
///
/// Equal arguments hold exactly because `M[a,a] = a`. Otherwise precision is
/// doubled until the sign is certified or the cap is reached.
pub fn check_bellman_triple(
    b: &dyn BellmanCandidate,
    x_minus: &RatInterval,
    x_plus: &RatInterval,
    p: Precision,
) -> Result<Check> {
    if x_minus.lo().is_negative() || x_plus.lo().is_negative() {
        return Err(Error::Domain(
            "triple arguments must be non-negative".into(),
        ));
    }
    if x_minus == x_plus && x_minus.is_point() {
        return Ok(Check::Holds);
    }
    let half = Rational::new(1.into(), 2.into());
    let mut w = p;
    loop {
        let x = nonlinear_mean(x_minus, x_plus, w);
        let gap =
            &b.enclose(&x, w)? - &(&b.enclose(x_minus, w)? + &b.enclose(x_plus, w)?).scale(&half);
        if gap.certainly_nonneg() {
            return Ok(Check::Holds);
        }
        if gap.certainly_negative() {
            return Ok(Check::Violated);
        }
        match w.doubled() {
            Some(next) => w = next,
            None => return Ok(Check::Inconclusive),
        }
    }
}

/// Runs `judge` over every case on successively refined grids until nothing is inconclusive.
pub(crate) fn audit_on_grid<C: Sync + Send>(
    level: u32,
    p: Precision,
    cases: impl Fn(&BridgeCache) -> Vec<C>,
    judge: impl Fn(&BridgeCache, &C) -> (Check, bool) + Sync,
    describe: impl Fn(&C) -> String,
) -> Result<Audit> {
    let mut cache = BridgeCache::build(level, p)?;
    loop {
        let list = cases(&cache);
        let verdicts: Vec<(Check, bool)> = list.par_iter().map(|c| judge(&cache, c)).collect();
        let equalities = verdicts.iter().filter(|v| v.1).count();
        if let Some(i) = verdicts.iter().position(|v| v.0 == Check::Violated) {
            return Ok(Audit {
                check: Check::Violated,
                cases: list.len(),
                equalities,
                first_problem: Some(describe(&list[i])),
            });
        }
        match verdicts.iter().position(|v| v.0 == Check::Inconclusive) {
            None => {
                return Ok(Audit {
                    check: Check::Holds,
                    cases: list.len(),
                    equalities,
                    first_problem: None,
                })
            }
            Some(i) => match cache.refined() {
                Ok(next) => cache = next,
                Err(Error::Inconclusive { .. }) => {
                    return Ok(Audit {
                        check: Check::Inconclusive,
                        cases: list.len(),
                        equalities,
                        first_problem: Some(describe(&list[i])),
                    })
                }
                Err(e) => return Err(e),
            },
        }
    }
}

/// Non-strict comparison `small <= large` on enclosures.
pub(crate) fn le(small: &RatInterval, large: &RatInterval) -> Check {
    if small.hi() <= large.lo() {
        Check::Holds
    } else if small.lo() > large.hi() {
        Check::Violated
    } else {
        Check::Inconclusive
    }
}

/// `A(t) / t` is non-decreasing over consecutive points of `D_n \ {0}`.
pub fn check_ratio_monotone(n: u32, p: Precision) -> Result<Audit> {
    if n <= 1 {
        return Ok(Audit {
            check: Check::Holds,
            cases: 0,
            equalities: 0,
            first_problem: None,
        });
    }
    audit_on_grid(
        n,
        p,
        |c| (1..c.len() - 1).collect(),
        |c, &i| {
            // A(t_i)/t_i <= A(t_{i+1})/t_{i+1}  <=>  A(t_i) * (i+1) <= A(t_{i+1}) * i
            let v = c.values();
            let lhs = v[i].scale(&Rational::from_integer((i + 1).into()));
            let rhs = v[i + 1].scale(&Rational::from_integer(i.into()));
            (le(&lhs, &rhs), false)
        },
        |&i| format!("t = {}/2^{n}", i),
    )
}

/// `A(t) <= 2t` on `D_n`.
pub fn audit_double_bound(n: u32, p: Precision) -> Result<Audit> {
    audit_on_grid(
        n,
        p,
        |c| (0..c.len()).collect(),
        |c, &i| {
            let two_t =
                RatInterval::point(c.point(i).to_rational() * Rational::from_integer(2.into()));
            (le(&c.values()[i], &two_t), false)
        },
        |&i| format!("t = {}/2^{n}", i),
    )
}

/// Neighbouring values on `D_n` differ by at most `(3/4)^(n-1)`.
pub fn audit_neighbor_bound(n: u32, p: Precision) -> Result<Audit> {
    let bound = num_traits::pow(Rational::new(3.into(), 4.into()), (n.max(1) - 1) as usize);
    audit_on_grid(
        n,
        p,
        |c| (0..c.len() - 1).collect(),
        |c, &i| {
            let v = c.values();
            let diff = &v[i + 1] - &v[i];
            (le(&diff, &RatInterval::point(bound.clone())), false)
        },
        |&i| format!("between {}/2^{n} and {}/2^{n}", i, i + 1),
    )
}

/// Strict increase of `A` on `D_n`.
pub fn audit_monotone(n: u32, p: Precision) -> Result<Audit> {
    audit_on_grid(
        n,
        p,
        |c| (0..c.len() - 1).collect(),
        |c, &i| {
            let v = c.values();
            let check = if v[i].hi() < v[i + 1].lo() {
                Check::Holds
            } else if v[i].lo() >= v[i + 1].hi() {
                Check::Violated
            } else {
                Check::Inconclusive
            };
            (check, false)
        },
        |&i| format!("between {}/2^{n} and {}/2^{n}", i, i + 1),
    )
}

/// `A((s+t)/2) >= M[A(s), A(t)]` for all `s <= t` in `D_n`.
///
/// Pairs that are the construction parents of their midpoint (and `s = t`)
/// hold with equality by definition and are counted as such.
pub fn audit_midpoint(n: u32, p: Precision) -> Result<Audit> {
    let step = 1usize << 1; // D_n index i sits at 2i on D_{n+1}
    audit_on_grid(
        n + 1,
        p,
        |c| {
            let m = (c.len() - 1) / 2;
            let mut pairs = Vec::new();
            for i in 0..=m {
                for j in i..=m {
                    pairs.push((i, j));
                }
            }
            pairs
        },
        |c, &(i, j)| {
            if i == j {
                return (Check::Holds, true);
            }
            let (s, t) = (step * i, step * j);
            let mid = (s + t) / 2;
            let ds = DyadicRational::new(s, n + 1);
            let dt = DyadicRational::new(t, n + 1);
            let dm = DyadicRational::new(mid, n + 1);
            if dm.parents() == Some((ds.clone(), dt.clone())) {
                return (Check::Holds, true);
            }
            let v = c.values();
            let m = nonlinear_mean(&v[s], &v[t], c.precision().plus(16));
            (le(&m, &v[mid]), false)
        },
        |&(i, j)| format!("s = {i}/2^{n}, t = {j}/2^{n}"),
    )
}

/// Largest upper bound on neighbouring differences over `D_n`.
pub fn max_neighbor_gap(cache: &BridgeCache) -> Rational {
    cache
        .values()
        .windows(2)
        .map(|w| w[1].hi() - w[0].lo())
        .max()
        .unwrap_or_else(Rational::zero)
}

/// Checks of the listed mean properties on one rational pair `(a, b)` in `[0,1]^2`.
///
/// Covered: `M[a,a] = a`, symmetry, `M <= (a+b)/2`, strict betweenness for
/// `a != b`, and `|M[a,b] - a| <= 3/4 |a-b|`.
pub fn mean_properties(a: &Rational, b: &Rational, p: Precision) -> Result<Check> {
    let unit = |r: &Rational| r >= &Rational::zero() && r <= &Rational::one();
    if !unit(a) || !unit(b) {
        return Err(Error::Domain(
            "mean properties are checked on [0,1]^2".into(),
        ));
    }
    let (ia, ib) = (RatInterval::point(a.clone()), RatInterval::point(b.clone()));
    let mut w = p;
    loop {
        let m = nonlinear_mean(&ia, &ib, w);
        let mut verdict = Check::Holds;
        let mut update = |c: Check| {
            verdict = match (verdict, c) {
                (Check::Violated, _) | (_, Check::Violated) => Check::Violated,
                (Check::Inconclusive, _) | (_, Check::Inconclusive) => Check::Inconclusive,
                _ => Check::Holds,
            }
        };
        if nonlinear_mean(&ia, &ia, w) != ia {
            update(Check::Violated);
        }
        if nonlinear_mean(&ib, &ia, w) != m {
            update(Check::Violated);
        }
        let avg = RatInterval::point((a + b) / Rational::from_integer(2.into()));
        update(le(&m, &avg));
        if a != b {
            let (small, large) = if a < b { (&ia, &ib) } else { (&ib, &ia) };
            update(strict_lt(small, &m));
            update(strict_lt(&m, large));
        }
        let dev = (&m - &ia).abs();
        let bound = RatInterval::point((a - b).abs() * Rational::new(3.into(), 4.into()));
        update(le(&dev, &bound));
        if verdict != Check::Inconclusive {
            return Ok(verdict);
        }
        match w.doubled() {
            Some(next) => w = next,
            None => return Ok(Check::Inconclusive),
        }
    }
}

/// Strict increase in the first argument: `M[a,b] < M[a',b]` for `a < a'`.
pub fn mean_increasing(a: &Rational, a2: &Rational, b: &Rational, p: Precision) -> Check {
    let (x, y, z) = (
        RatInterval::point(a.clone()),
        RatInterval::point(a2.clone()),
        RatInterval::point(b.clone()),
    );
    let mut w = p;
    loop {
        let c = strict_lt(&nonlinear_mean(&x, &z, w), &nonlinear_mean(&y, &z, w));
        if c != Check::Inconclusive {
            return c;
        }
        match w.doubled() {
            Some(next) => w = next,
            None => return Check::Inconclusive,
        }
    }
}

fn strict_lt(a: &RatInterval, b: &RatInterval) -> Check {
    if a.hi() < b.lo() {
        Check::Holds
    } else if a.lo() >= b.hi() {
        Check::Violated
    } else {
        Check::Inconclusive
    }
}

/// Width bound used by callers that want enclosures no wider than `2^-bits`.
pub fn width_target(p: Precision) -> Rational {
    pow2(-i64::from(p.bits()))
}
