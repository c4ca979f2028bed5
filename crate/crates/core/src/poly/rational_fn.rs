use std::collections::HashMap;
use std::fmt;

use num_traits::{One, Zero};

use super::monomial::Monomial;
use super::multipoly::MultiPoly;
use crate::arith::Rational;
use crate::error::{Error, Result};

/// Quotient of polynomials kept as `scalar * prod(num) / prod(den)`.
///
/// Every factor is a monic, non-constant polynomial raised to a positive power.
/// Products only concatenate factor lists and cancel factors that appear on both
/// sides, so a denominator multiplied back in disappears without expansion.
/// Sums expand into a single numerator factor over the least common factored
/// denominator.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalFn {
    vars: Vec<String>,
    scalar: Rational,
    num: Vec<(MultiPoly, u32)>,
    den: Vec<(MultiPoly, u32)>,
}

/// `(lc, p / lc)` for the graded lexicographic leading coefficient `lc`.
fn normalize(p: &MultiPoly) -> (Rational, MultiPoly) {
    match p.leading_term() {
        Some((_, lc)) if !lc.is_one() => {
            let lc = lc.clone();
            (lc.clone(), p.scale(&(Rational::one() / lc)))
        }
        Some(_) => (Rational::one(), p.clone()),
        None => (Rational::zero(), p.clone()),
    }
}

fn push_factor(list: &mut Vec<(MultiPoly, u32)>, f: MultiPoly, k: u32) {
    if k == 0 {
        return;
    }
    if let Some(entry) = list.iter_mut().find(|(g, _)| *g == f) {
        entry.1 += k;
    } else {
        list.push((f, k));
    }
}

fn expand(vars: &[String], list: &[(MultiPoly, u32)]) -> MultiPoly {
    list.iter()
        .fold(MultiPoly::one(vars), |acc, (f, k)| acc.mul(&f.pow(*k)))
}

impl RationalFn {
    pub fn zero<S: AsRef<str>>(vars: &[S]) -> Self {
        RationalFn::constant(vars, Rational::zero())
    }

    pub fn constant<S: AsRef<str>>(vars: &[S], c: Rational) -> Self {
        RationalFn {
            vars: MultiPoly::zero(vars).vars().to_vec(),
            scalar: c,
            num: Vec::new(),
            den: Vec::new(),
        }
    }

    pub fn var<S: AsRef<str>>(vars: &[S], name: &str) -> Self {
        RationalFn::from_poly(&MultiPoly::var(vars, name))
    }

    pub fn from_poly(p: &MultiPoly) -> Self {
        let mut out = RationalFn::constant(p.vars(), Rational::zero());
        if p.is_zero() {
            return out;
        }
        if p.is_constant() {
            out.scalar = p.constant_term();
            return out;
        }
        let (lc, monic) = normalize(p);
        out.scalar = lc;
        out.num.push((monic, 1));
        out
    }

    /// `num / den`.
    pub fn from_parts(num: &MultiPoly, den: &MultiPoly) -> Result<Self> {
        RationalFn::from_poly(num).div(&RationalFn::from_poly(den))
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn is_zero(&self) -> bool {
        self.scalar.is_zero()
    }

    pub fn scalar(&self) -> &Rational {
        &self.scalar
    }

    pub fn numerator_factors(&self) -> &[(MultiPoly, u32)] {
        &self.num
    }

    pub fn denominator_factors(&self) -> &[(MultiPoly, u32)] {
        &self.den
    }

    /// Expanded numerator including the scalar.
    pub fn num(&self) -> MultiPoly {
        if self.is_zero() {
            return MultiPoly::zero(&self.vars);
        }
        expand(&self.vars, &self.num).scale(&self.scalar)
    }

    /// Expanded monic denominator.
    pub fn den(&self) -> MultiPoly {
        expand(&self.vars, &self.den)
    }

    pub fn is_polynomial(&self) -> bool {
        self.den.is_empty()
    }

    fn with_vars(&self, vars: &[String]) -> Result<Self> {
        if self.vars == vars {
            return Ok(self.clone());
        }
        let conv = |l: &[(MultiPoly, u32)]| -> Result<Vec<(MultiPoly, u32)>> {
            l.iter().map(|(f, k)| Ok((f.embed(vars)?, *k))).collect()
        };
        Ok(RationalFn {
            vars: vars.to_vec(),
            scalar: self.scalar.clone(),
            num: conv(&self.num)?,
            den: conv(&self.den)?,
        })
    }

    fn aligned(&self, other: &Self) -> (Self, Self) {
        if self.vars == other.vars {
            return (self.clone(), other.clone());
        }
        let mut vars = self.vars.clone();
        for v in &other.vars {
            if !vars.contains(v) {
                vars.push(v.clone());
            }
        }
        (
            self.with_vars(&vars).expect("union contains all variables"),
            other
                .with_vars(&vars)
                .expect("union contains all variables"),
        )
    }

    fn cancel(&mut self) {
        if self.scalar.is_zero() {
            self.num.clear();
            self.den.clear();
            return;
        }
        for (f, k) in self.num.iter_mut() {
            if let Some(d) = self.den.iter_mut().find(|(g, _)| g == f) {
                let m = (*k).min(d.1);
                *k -= m;
                d.1 -= m;
            }
        }
        self.num.retain(|(_, k)| *k > 0);
        self.den.retain(|(_, k)| *k > 0);
    }

    pub fn neg(&self) -> Self {
        let mut out = self.clone();
        out.scalar = -out.scalar;
        out
    }

    pub fn scale(&self, k: &Rational) -> Self {
        let mut out = self.clone();
        out.scalar *= k;
        out.cancel();
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.vars != other.vars {
            let (a, b) = self.aligned(other);
            return a.mul(&b);
        }
        let mut out = self.clone();
        out.scalar *= &other.scalar;
        for (f, k) in &other.num {
            push_factor(&mut out.num, f.clone(), *k);
        }
        for (f, k) in &other.den {
            push_factor(&mut out.den, f.clone(), *k);
        }
        out.cancel();
        out
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::Domain("reciprocal of the zero function".into()));
        }
        Ok(RationalFn {
            vars: self.vars.clone(),
            scalar: Rational::one() / &self.scalar,
            num: self.den.clone(),
            den: self.num.clone(),
        })
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.recip()?))
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = self.clone();
        if n == 0 {
            return RationalFn::constant(&self.vars, Rational::one());
        }
        out.scalar = num_traits::pow(self.scalar.clone(), n as usize);
        for (_, k) in out.num.iter_mut().chain(out.den.iter_mut()) {
            *k *= n;
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.vars != other.vars {
            let (a, b) = self.aligned(other);
            return a.add(&b);
        }
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        // common denominator: maximum exponent of every factor
        let mut den: Vec<(MultiPoly, u32)> = self.den.clone();
        for (f, k) in &other.den {
            match den.iter_mut().find(|(g, _)| g == f) {
                Some(e) => e.1 = e.1.max(*k),
                None => den.push((f.clone(), *k)),
            }
        }
        let lift = |x: &RationalFn| -> MultiPoly {
            let mut factors = x.num.clone();
            for (f, k) in &den {
                let own = x.den.iter().find(|(g, _)| g == f).map_or(0, |e| e.1);
                push_factor(&mut factors, f.clone(), k - own);
            }
            expand(&self.vars, &factors).scale(&x.scalar)
        };
        let sum = lift(self).add(&lift(other));
        let mut out = RationalFn::from_poly(&sum);
        if !out.is_zero() {
            out.den = den;
            out.cancel();
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    /// Exact equality of the represented functions.
    pub fn equals(&self, other: &Self) -> bool {
        let (a, b) = self.aligned(other);
        a.num().mul(&b.den()) == b.num().mul(&a.den())
    }

    /// Expands the numerator and divides out every denominator factor exactly.
    pub fn into_poly(&self) -> Result<MultiPoly> {
        self.into_poly_with(|_, _| {})
    }

    /// As [`into_poly`](Self::into_poly), reporting each successful division.
    pub fn into_poly_with(&self, mut on_divide: impl FnMut(&MultiPoly, u32)) -> Result<MultiPoly> {
        let mut p = self.num();
        for (f, k) in &self.den {
            for _ in 0..*k {
                p = p.exact_divide(f)?;
            }
            on_divide(f, *k);
        }
        Ok(p)
    }

    pub fn eval(&self, point: &HashMap<String, Rational>) -> Result<Rational> {
        let mut value = self.scalar.clone();
        if value.is_zero() {
            return Ok(value);
        }
        for (f, k) in &self.den {
            let d = f.eval(point)?;
            if d.is_zero() {
                return Err(Error::Domain("denominator vanishes at the point".into()));
            }
            value /= num_traits::pow(d, *k as usize);
        }
        for (f, k) in &self.num {
            value *= num_traits::pow(f.eval(point)?, *k as usize);
        }
        Ok(value)
    }

    /// Composes with `var -> image` for each assignment (simultaneously).
    ///
    /// The result lives over the unassigned variables followed by those of the images.
    pub fn substitute(&self, assignments: &HashMap<String, RationalFn>) -> Result<Self> {
        let mut target: Vec<String> = self
            .vars
            .iter()
            .filter(|v| !assignments.contains_key(*v))
            .cloned()
            .collect();
        for (v, f) in assignments {
            if !self.vars.contains(v) {
                continue;
            }
            for w in &f.vars {
                if !target.contains(w) {
                    target.push(w.clone());
                }
            }
        }
        let images: HashMap<String, RationalFn> = assignments
            .iter()
            .filter(|(v, _)| self.vars.contains(v))
            .map(|(v, f)| Ok((v.clone(), f.with_vars(&target)?)))
            .collect::<Result<_>>()?;
        let mut out = RationalFn::constant(&target, self.scalar.clone());
        if out.is_zero() {
            return Ok(out);
        }
        for (f, k) in &self.num {
            out = out.mul(&substitute_poly(f, &images, &target)?.pow(*k));
        }
        for (f, k) in &self.den {
            let image = substitute_poly(f, &images, &target)?;
            if image.is_zero() {
                return Err(Error::Domain(
                    "substitution makes a denominator vanish".into(),
                ));
            }
            out = out.div(&image.pow(*k))?;
        }
        Ok(out)
    }

    pub fn derivative(&self, var: &str) -> Self {
        if self.is_zero() || !self.vars.iter().any(|v| v == var) {
            return RationalFn::zero(&self.vars);
        }
        // logarithmic derivative: f' = f * (sum k g'/g over numerator - same over denominator)
        let mut log_d = RationalFn::zero(&self.vars);
        for (g, k) in &self.num {
            let term = RationalFn::from_poly(&g.derivative(var))
                .div(&RationalFn::from_poly(g))
                .expect("factor is nonzero")
                .scale(&Rational::from_integer((*k).into()));
            log_d = log_d.add(&term);
        }
        for (g, k) in &self.den {
            let term = RationalFn::from_poly(&g.derivative(var))
                .div(&RationalFn::from_poly(g))
                .expect("factor is nonzero")
                .scale(&Rational::from_integer((*k).into()));
            log_d = log_d.sub(&term);
        }
        self.mul(&log_d)
    }
}

/// `p(images)` as a rational function over `target`, using one common denominator.
///
/// A term with exponent `e` in `v` becomes `N_v^e * D_v^(deg_v - e)` over `prod D_v^deg_v`.
fn substitute_poly(
    p: &MultiPoly,
    images: &HashMap<String, RationalFn>,
    target: &[String],
) -> Result<RationalFn> {
    let mut subs: Vec<(usize, u32, MultiPoly, Option<MultiPoly>)> = Vec::new();
    let mut keep: Vec<(usize, usize)> = Vec::new();
    let mut den_factors: Vec<(MultiPoly, u32)> = Vec::new();
    for (i, v) in p.vars().iter().enumerate() {
        let deg = p.degree_in(v);
        let Some(f) = images.get(v) else {
            if deg > 0 {
                let j = target.iter().position(|t| t == v).ok_or_else(|| {
                    Error::Domain(format!("variable {v} has no place in the result"))
                })?;
                keep.push((i, j));
            }
            continue;
        };
        if deg == 0 {
            continue;
        }
        for (g, k) in &f.den {
            push_factor(&mut den_factors, g.clone(), k * deg);
        }
        let d = (!f.den.is_empty()).then(|| f.den());
        subs.push((i, deg, f.num(), d));
    }
    let one = MultiPoly::one(target);
    let mut num_pows: Vec<Vec<MultiPoly>> = subs
        .iter()
        .map(|s| vec![one.clone(), s.2.clone()])
        .collect();
    let mut den_pows: Vec<Vec<MultiPoly>> = subs
        .iter()
        .map(|s| vec![one.clone(), s.3.clone().unwrap_or_else(|| one.clone())])
        .collect();
    fn power(cache: &mut Vec<MultiPoly>, e: usize) -> &MultiPoly {
        while cache.len() <= e {
            let next = cache.last().unwrap().mul(&cache[1]);
            cache.push(next);
        }
        &cache[e]
    }
    let mut groups: std::collections::BTreeMap<Vec<u32>, MultiPoly> =
        std::collections::BTreeMap::new();
    for (m, c) in p.terms() {
        let key: Vec<u32> = subs.iter().map(|s| m.exponent(s.0)).collect();
        let mut rest = Monomial::ONE;
        for &(i, j) in &keep {
            rest = rest.with_exponent(j, m.exponent(i));
        }
        groups
            .entry(key)
            .or_insert_with(|| MultiPoly::zero(target))
            .add_assign(&one.mul_monomial(rest, c));
    }
    let mut numerator = MultiPoly::zero(target);
    for (key, rest) in groups {
        let mut term = rest;
        for (j, s) in subs.iter().enumerate() {
            let e = key[j];
            if e > 0 {
                term = term.mul(power(&mut num_pows[j], e as usize));
            }
            if s.3.is_some() && s.1 > e {
                term = term.mul(power(&mut den_pows[j], (s.1 - e) as usize));
            }
        }
        numerator.add_assign(&term);
    }
    let mut out = RationalFn::from_poly(&numerator);
    if !out.is_zero() {
        out.den = den_factors;
        out.cancel();
    }
    Ok(out)
}

impl fmt::Display for RationalFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_empty() {
            write!(f, "{}", self.num())
        } else {
            write!(f, "({}) / ({})", self.num(), self.den())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const V: [&str; 2] = ["x", "y"];

    fn p(s: &str) -> MultiPoly {
        MultiPoly::parse(s, &V).unwrap()
    }

    fn r(n: &str, d: &str) -> RationalFn {
        RationalFn::from_parts(&p(n), &p(d)).unwrap()
    }

    #[test]
    fn denominators_cancel_on_multiplication() {
        let g = RationalFn::from_poly(&p("1+x^2")).pow(2);
        let f = RationalFn::from_poly(&p("x")).div(&g).unwrap();
        let prod = f.mul(&g);
        assert!(prod.is_polynomial());
        assert_eq!(prod.into_poly().unwrap(), p("x"));
    }

    #[test]
    fn sums_use_common_denominator() {
        let s = r("1", "x").add(&r("1", "y"));
        assert!(s.equals(&r("x+y", "x y")));
        assert!(r("1", "1+x").sub(&r("1", "1+x")).is_zero());
    }

    #[test]
    fn substitution() {
        let f = r("1", "1+x");
        let mut a = HashMap::new();
        a.insert("x".to_string(), RationalFn::from_poly(&p("y+1")));
        assert!(f.substitute(&a).unwrap().equals(&r("1", "2+y")));

        let mut b = HashMap::new();
        b.insert("x".to_string(), r("y", "1+y^2"));
        let g = RationalFn::from_poly(&p("x^2 + 3x + 1"))
            .substitute(&b)
            .unwrap();
        assert!(g.equals(&r("y^2 + 3y(1+y^2) + (1+y^2)^2", "(1+y^2)^2")));
    }

    #[test]
    fn derivatives() {
        let d = RationalFn::from_poly(&p("x^2")).derivative("x");
        assert!(d.equals(&RationalFn::from_poly(&p("2x"))));
        let d = r("1", "1+x^2").derivative("x");
        assert!(d.equals(&r("-2x", "(1+x^2)^2")));
        let f = r("1+x^2", "1+3x^2");
        let d1 = f.derivative("x");
        let d2 = d1.derivative("x");
        let lhs = RationalFn::var(&V, "x").mul(&d1).add(&d2);
        assert!(lhs.equals(&r("4(8x^2-3x^4-1)", "(1+3x^2)^3")));
    }

    #[test]
    fn evaluation_rejects_poles() {
        let f = r("1", "x-1");
        let mut pt = HashMap::new();
        pt.insert("x".to_string(), Rational::one());
        assert!(matches!(f.eval(&pt), Err(Error::Domain(_))));
        pt.insert("x".to_string(), Rational::from_integer(3.into()));
        assert_eq!(f.eval(&pt).unwrap(), Rational::new(1.into(), 2.into()));
    }

    #[test]
    fn into_poly_reports_remainders() {
        assert!(matches!(
            r("x+1", "x").into_poly(),
            Err(Error::Division { .. })
        ));
        assert_eq!(r("x^2-y^2", "x-y").into_poly().unwrap(), p("x+y"));
    }
}
