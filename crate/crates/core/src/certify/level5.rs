use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use web_time::Instant;

use num_traits::{Signed, Zero};
use serde_json::json;

use super::certificate::{Certificate, StepKind};
use crate::arith::{sqrt_enclosure, Precision, RatInterval, Rational};
use crate::bridge::nonlinear_mean;
use crate::poly::{linear_test, parse_polynomial, Context};

/// An element `a + b sqrt(d)` of the quadratic field `Q(sqrt d)`, `d` a non-square.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuadElem {
    pub a: Rational,
    pub b: Rational,
    pub d: i64,
}

fn q(a: i64, b: i64) -> Rational {
    Rational::new(a.into(), b.into())
}

impl QuadElem {
    pub fn new(a: Rational, b: Rational, d: i64) -> Self {
        Self { a, b, d }
    }

    pub fn int(a: i64, b: i64, d: i64) -> Self {
        Self::new(q(a, 1), q(b, 1), d)
    }

    fn same_field(&self, other: &Self) {
        assert_eq!(self.d, other.d, "elements of different quadratic fields");
    }

    pub fn conjugate(&self) -> Self {
        Self::new(self.a.clone(), -self.b.clone(), self.d)
    }

    /// `a^2 - d b^2`.
    pub fn norm(&self) -> Rational {
        &self.a * &self.a - Rational::from_integer(self.d.into()) * &self.b * &self.b
    }

    pub fn recip(&self) -> Option<Self> {
        let n = self.norm();
        if n.is_zero() {
            return None;
        }
        let c = self.conjugate();
        Some(Self::new(c.a / &n, c.b / &n, self.d))
    }

    pub fn div(&self, other: &Self) -> Option<Self> {
        other.recip().map(|r| self * &r)
    }

    /// Exact sign, comparing `a^2` with `d b^2`.
    pub fn signum(&self) -> i32 {
        let sa = sign(&self.a);
        let sb = sign(&self.b);
        if sa == sb || sb == 0 {
            return sa;
        }
        if sa == 0 {
            return sb;
        }
        let a2 = &self.a * &self.a;
        let db2 = Rational::from_integer(self.d.into()) * &self.b * &self.b;
        if a2 > db2 {
            sa
        } else if a2 < db2 {
            sb
        } else {
            0
        }
    }

    pub fn enclose(&self, p: Precision) -> RatInterval {
        let root = sqrt_enclosure(&RatInterval::from_integer(self.d), p).expect("d is positive");
        &RatInterval::point(self.a.clone()) + &root.scale(&self.b)
    }
}

fn sign(r: &Rational) -> i32 {
    if r.is_positive() {
        1
    } else if r.is_negative() {
        -1
    } else {
        0
    }
}

impl Add for &QuadElem {
    type Output = QuadElem;
    fn add(self, o: &QuadElem) -> QuadElem {
        self.same_field(o);
        QuadElem::new(&self.a + &o.a, &self.b + &o.b, self.d)
    }
}

impl Sub for &QuadElem {
    type Output = QuadElem;
    fn sub(self, o: &QuadElem) -> QuadElem {
        self.same_field(o);
        QuadElem::new(&self.a - &o.a, &self.b - &o.b, self.d)
    }
}

impl Mul for &QuadElem {
    type Output = QuadElem;
    fn mul(self, o: &QuadElem) -> QuadElem {
        self.same_field(o);
        let d = Rational::from_integer(self.d.into());
        QuadElem::new(
            &self.a * &o.a + d * &self.b * &o.b,
            &self.a * &o.b + &self.b * &o.a,
            self.d,
        )
    }
}

impl Neg for &QuadElem {
    type Output = QuadElem;
    fn neg(self) -> QuadElem {
        QuadElem::new(-self.a.clone(), -self.b.clone(), self.d)
    }
}

impl fmt::Display for QuadElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}*sqrt({})", self.a, self.b, self.d)
    }
}

fn int_gt(cert: &mut Certificate, lhs: (&str, i64), rhs: (&str, i64)) {
    cert.record(
        StepKind::RationalCompare,
        format!("{} = {} > {} = {}", lhs.0, lhs.1, rhs.1, rhs.0),
        lhs.1 > rhs.1,
    );
}

fn field_eq(
    cert: &mut Certificate,
    desc: &str,
    lhs: Option<QuadElem>,
    rhs: Option<QuadElem>,
) -> Option<QuadElem> {
    let ok = matches!((&lhs, &rhs), (Some(l), Some(r)) if l == r);
    cert.record(StepKind::Identity, desc, ok);
    lhs
}

/// Margin `M[1/(2 sqrt 5), M[1/sqrt 5, 1]] - 1/sqrt 5` enclosed at precision `p`.
pub fn level5_margin(p: Precision) -> RatInterval {
    let root5 = sqrt_enclosure(&RatInterval::from_integer(5), p.plus(16)).expect("positive");
    let inv = RatInterval::one().checked_div(&root5).expect("nonzero");
    let half_inv = inv.scale(&q(1, 2));
    let inner = nonlinear_mean(&inv, &RatInterval::one(), p.plus(8));
    let outer = nonlinear_mean(&half_inv, &inner, p.plus(8));
    &outer - &inv
}

/// The final numerical inequality `M[1/(2 sqrt 5), M[1/sqrt 5, 1]] > 1/sqrt 5`.
///
/// Every step of the chain is an integer comparison or an identity in a quadratic
/// field; interval arithmetic then checks the same inequality independently.
pub fn prove_level5() -> Certificate {
    let start = Instant::now();
    let mut cert = Certificate::new("level5");
    let p = Precision::new(128);

    int_gt(&mut cert, ("7^2", 49), ("5*3^2", 45));
    int_gt(&mut cert, ("(13 sqrt 5)^2", 13 * 13 * 5), ("29^2", 29 * 29));

    // M[1/sqrt 5, 1]^2 = (sqrt 5 + 1)^2 / (4 + (1 - 1/sqrt 5)^2) * (1/5) / (1/5)
    let s5 = |a, b| QuadElem::int(a, b, 5);
    let inner_sq = {
        let x = QuadElem::new(Rational::zero(), q(1, 5), 5);
        let one = s5(1, 0);
        let sum = &x + &one;
        let diff = &one - &x;
        (&sum * &sum).div(&(&s5(4, 0) + &(&diff * &diff)))
    };
    let sq = field_eq(
        &mut cert,
        "M[1/sqrt5, 1]^2 == (sqrt5+1)^2/(26-2 sqrt5) in Q(sqrt5)",
        inner_sq,
        (&s5(1, 1) * &s5(1, 1)).div(&s5(26, -2)),
    );
    field_eq(
        &mut cert,
        "(sqrt5+1)^2/(26-2 sqrt5) == (3+sqrt5)/(13-sqrt5) in Q(sqrt5)",
        sq.clone(),
        s5(3, 1).div(&s5(13, -1)),
    );
    field_eq(
        &mut cert,
        "(3+sqrt5)/(13-sqrt5) == (39+13 sqrt5)/(169-13 sqrt5) in Q(sqrt5)",
        s5(3, 1).div(&s5(13, -1)),
        s5(39, 13).div(&s5(169, -13)),
    );
    let bound = q(39 + 29, 169 - 29);
    cert.record(
        StepKind::Identity,
        "(39+29)/(169-29) == 68/140 == 17/35",
        bound == q(68, 140) && bound == q(17, 35),
    );
    // (39+s)/(169-s) increases in s on [0,169), and 13 sqrt5 > 29
    let gap = sq.map(|v| &v - &QuadElem::new(q(17, 35), Rational::zero(), 5));
    cert.record(
        StepKind::RationalCompare,
        "(sqrt5+1)^2/(26-2 sqrt5) - 17/35 > 0 by exact sign in Q(sqrt5)",
        gap.as_ref().is_some_and(|g| g.signum() > 0),
    );

    int_gt(&mut cert, ("36*119", 36 * 119), ("65^2", 65 * 65));
    cert.record(
        StepKind::Identity,
        "1/(2 sqrt5) = sqrt7/sqrt140 and sqrt(17/35) = 2 sqrt17/sqrt140",
        q(1, 20) == q(7, 140) && q(17, 35) == q(4 * 17, 140),
    );
    // with sqrt17*sqrt7 = sqrt119: (2 sqrt17 +- sqrt7)^2 = 75 +- 4 sqrt119
    let s119 = |a, b| QuadElem::int(a, b, 119);
    let plus_sq = s119(4 * 17 + 7, 4);
    let minus_sq = s119(4 * 17 + 7, -4);
    let m_sq = plus_sq.div(&(&s119(4 * 140, 0) + &minus_sq));
    let m_sq = field_eq(
        &mut cert,
        "(2 sqrt17+sqrt7)^2/(4*140+(2 sqrt17-sqrt7)^2) == (75+4 sqrt119)/(635-4 sqrt119) in Q(sqrt119)",
        m_sq,
        s119(75, 4).div(&s119(635, -4)),
    );
    field_eq(
        &mut cert,
        "(75+4 sqrt119)/(635-4 sqrt119) == (225+12 sqrt119)/(1905-12 sqrt119) in Q(sqrt119)",
        s119(75, 4).div(&s119(635, -4)),
        s119(225, 12).div(&s119(1905, -12)),
    );
    int_gt(
        &mut cert,
        ("(12 sqrt119)^2", 144 * 119),
        ("130^2", 130 * 130),
    );
    let last = q(225 + 130, 1905 - 130);
    cert.record(
        StepKind::Identity,
        "(225+130)/(1905-130) == 355/1775 == 1/5",
        last == q(355, 1775) && last == q(1, 5),
    );
    let gap = m_sq
        .as_ref()
        .map(|v| v - &QuadElem::new(q(1, 5), Rational::zero(), 119));
    cert.record(
        StepKind::RationalCompare,
        "M[1/(2 sqrt5), sqrt(17/35)]^2 - 1/5 > 0 by exact sign in Q(sqrt119)",
        gap.as_ref().is_some_and(|g| g.signum() > 0),
    );

    // the outer step uses that M increases in each argument on [0,1]^2:
    // d/da (a+b)/sqrt(4+(a-b)^2) has numerator 4+(a-b)^2-(a+b)(a-b) = 2(2-ab+b^2)
    let mut ctx = Context::new(&["a", "b"]);
    let numerator = ctx.eval_str("(4+(a-b)^2)-(a+b)*(a-b)-(4-2*a*b+2*b^2)");
    cert.record(
        StepKind::Identity,
        "(4+(a-b)^2)-(a+b)(a-b) == 4-2ab+2b^2 (numerator of dM/da)",
        numerator.is_ok_and(|f| f.is_zero()),
    );
    let positive = parse_polynomial("4-2*a*b+2*b^2", &["a", "b"])
        .map(|p| linear_test(&p, &["b", "a"]).passed());
    cert.record(
        StepKind::LinearTest,
        "4-2ab+2b^2 >= 0 on [0,1]^2, so M increases in each argument",
        positive.unwrap_or(false),
    );

    // the exact values agree with interval arithmetic
    let inner = nonlinear_mean(
        &sqrt_enclosure(&RatInterval::point(q(1, 5)), p).expect("positive"),
        &RatInterval::one(),
        p,
    );
    let agree = s5(39, 13)
        .div(&s5(169, -13))
        .is_some_and(|v| v.enclose(p).overlaps(&inner.square()))
        && s119(75, 4).div(&s119(635, -4)).is_some_and(|v| {
            let half_inv = sqrt_enclosure(&RatInterval::point(q(1, 20)), p).expect("positive");
            let root = sqrt_enclosure(&RatInterval::point(q(17, 35)), p).expect("positive");
            v.enclose(p)
                .overlaps(&nonlinear_mean(&half_inv, &root, p).square())
        });
    cert.record(
        StepKind::RationalCompare,
        "quadratic-field values lie in their interval enclosures",
        agree,
    );

    let margin = level5_margin(p);
    let window = RatInterval::new(q(9, 10_000), q(93, 100_000));
    cert.record_with(
        StepKind::RationalCompare,
        "M[1/(2 sqrt5), M[1/sqrt5, 1]] - 1/sqrt5 > 0 by interval arithmetic at 128 bits",
        margin.certainly_positive() && margin.overlaps(&window),
        Some(json!({ "margin": margin })),
    );
    cert.ms = start.elapsed().as_millis() as u64;
    cert
}
