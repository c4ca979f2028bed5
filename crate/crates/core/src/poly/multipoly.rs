use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::monomial::{Monomial, MAX_VARS};
use crate::arith::Rational;
use crate::error::{Error, Result};

/// Sparse polynomial over the rationals.
///
/// Terms are kept in graded lexicographic order of the stored variable list and
/// never hold a zero coefficient, so equal polynomials over the same variables
/// compare equal structurally.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MultiPoly {
    vars: Vec<String>,
    terms: BTreeMap<Monomial, Rational>,
}

impl MultiPoly {
    /// # Panics
    /// Panics on more than eight variables or a repeated name.
    pub fn zero<S: AsRef<str>>(vars: &[S]) -> Self {
        let vars: Vec<String> = vars.iter().map(|v| v.as_ref().to_string()).collect();
        assert!(
            vars.len() <= MAX_VARS,
            "at most {MAX_VARS} variables are supported"
        );
        for (i, v) in vars.iter().enumerate() {
            assert!(!vars[..i].contains(v), "variable {v} listed twice");
        }
        MultiPoly {
            vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant<S: AsRef<str>>(vars: &[S], c: Rational) -> Self {
        let mut p = MultiPoly::zero(vars);
        if !c.is_zero() {
            p.terms.insert(Monomial::ONE, c);
        }
        p
    }

    pub fn one<S: AsRef<str>>(vars: &[S]) -> Self {
        MultiPoly::constant(vars, Rational::one())
    }

    /// # Panics
    /// Panics if `name` is not one of `vars`.
    pub fn var<S: AsRef<str>>(vars: &[S], name: &str) -> Self {
        let mut p = MultiPoly::zero(vars);
        let i = p
            .var_index(name)
            .unwrap_or_else(|| panic!("unknown variable {name}"));
        p.terms.insert(Monomial::var(i, 1), Rational::one());
        p
    }

    /// Builds a polynomial from `(coefficient, exponents)` pairs, summing repeats.
    pub fn from_terms<S: AsRef<str>>(
        vars: &[S],
        terms: impl IntoIterator<Item = (Rational, Vec<u32>)>,
    ) -> Self {
        let mut p = MultiPoly::zero(vars);
        for (c, e) in terms {
            assert_eq!(e.len(), p.vars.len(), "exponent vector length mismatch");
            p.add_term(Monomial::from_exponents(&e), c);
        }
        p
    }

    pub(crate) fn from_map(vars: Vec<String>, terms: BTreeMap<Monomial, Rational>) -> Self {
        debug_assert!(terms.values().all(|c| !c.is_zero()));
        MultiPoly { vars, terms }
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.is_one())
    }

    pub fn constant_term(&self) -> Rational {
        self.terms
            .get(&Monomial::ONE)
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Terms in ascending graded lexicographic order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> + '_ {
        self.terms.iter()
    }

    pub fn coefficient(&self, exps: &[u32]) -> Rational {
        self.terms
            .get(&Monomial::from_exponents(exps))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.last_key_value()
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Degree in `var`; 0 for the zero polynomial or an absent variable.
    pub fn degree_in(&self, var: &str) -> u32 {
        match self.var_index(var) {
            Some(i) => self.terms.keys().map(|m| m.exponent(i)).max().unwrap_or(0),
            None => 0,
        }
    }

    /// Variables that actually occur.
    pub fn used_vars(&self) -> Vec<String> {
        self.vars
            .iter()
            .filter(|v| self.degree_in(v) > 0)
            .cloned()
            .collect()
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integer())
    }

    /// Least common multiple of the coefficient denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.terms
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    /// Re-expresses the polynomial over `vars`, which must include every used variable.
    pub fn embed<S: AsRef<str>>(&self, vars: &[S]) -> Result<Self> {
        let target = MultiPoly::zero(vars);
        if target.vars == self.vars {
            return Ok(self.clone());
        }
        let mut map = Vec::with_capacity(self.vars.len());
        for (i, v) in self.vars.iter().enumerate() {
            match target.var_index(v) {
                Some(j) => map.push(Some(j)),
                None => {
                    if self.terms.keys().any(|m| m.exponent(i) > 0) {
                        return Err(Error::Domain(format!(
                            "variable {v} is used but missing from the target list"
                        )));
                    }
                    map.push(None);
                }
            }
        }
        let n = target.vars.len();
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut e = vec![0u32; n];
                for (i, j) in map.iter().enumerate() {
                    if let Some(j) = j {
                        e[*j] = m.exponent(i);
                    }
                }
                (Monomial::from_exponents(&e), c.clone())
            })
            .collect();
        Ok(MultiPoly::from_map(target.vars, terms))
    }

    /// Both operands over the union of their variables, `self`'s order first.
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
            self.embed(&vars).expect("union contains all variables"),
            other.embed(&vars).expect("union contains all variables"),
        )
    }

    pub fn neg(&self) -> Self {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (*m, -c)).collect(),
        }
    }

    pub fn scale(&self, k: &Rational) -> Self {
        if k.is_zero() {
            return MultiPoly::zero(&self.vars);
        }
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (*m, c * k)).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.vars != other.vars {
            let (a, b) = self.aligned(other);
            return a.add(&b);
        }
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c.clone());
        }
        out
    }

    /// In-place sum; `other` must share the variable list.
    pub fn add_assign(&mut self, other: &Self) {
        assert_eq!(self.vars, other.vars, "variable lists differ");
        for (m, c) in &other.terms {
            self.add_term(*m, c.clone());
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        if self.vars != other.vars {
            let (a, b) = self.aligned(other);
            return a.sub(&b);
        }
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, -c);
        }
        out
    }

    /// Product computed over the integers after scaling both factors to integer coefficients.
    pub fn mul(&self, other: &Self) -> Self {
        if self.vars != other.vars {
            let (a, b) = self.aligned(other);
            return a.mul(&b);
        }
        if self.is_zero() || other.is_zero() {
            return MultiPoly::zero(&self.vars);
        }
        let (da, ia) = self.integer_form();
        let (db, ib) = other.integer_form();
        let mut acc: HashMap<Monomial, BigInt> =
            HashMap::with_capacity(ia.len() * ib.len() / 2 + 1);
        let (small, large) = if ia.len() <= ib.len() {
            (&ia, &ib)
        } else {
            (&ib, &ia)
        };
        for (ma, ca) in small {
            for (mb, cb) in large {
                let prod = ca * cb;
                acc.entry(ma.mul(*mb))
                    .and_modify(|e| *e += &prod)
                    .or_insert(prod);
            }
        }
        let den = da * db;
        let terms = acc
            .into_iter()
            .filter(|(_, c)| !c.is_zero())
            .map(|(m, c)| (m, Rational::new(c, den.clone())))
            .collect();
        MultiPoly::from_map(self.vars.clone(), terms)
    }

    /// `(d, terms)` with `self = terms / d` and integer coefficients.
    fn integer_form(&self) -> (BigInt, Vec<(Monomial, BigInt)>) {
        let d = self.denominator_lcm();
        let terms = self
            .terms
            .iter()
            .map(|(m, c)| (*m, c.numer() * (&d / c.denom())))
            .collect();
        (d, terms)
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut result = MultiPoly::one(&self.vars);
        let mut base = self.clone();
        let mut k = n;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    pub fn mul_monomial(&self, m: Monomial, c: &Rational) -> Self {
        if c.is_zero() {
            return MultiPoly::zero(&self.vars);
        }
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(k, v)| (k.mul(m), v * c)).collect(),
        }
    }

    /// Division with remainder by the leading-term algorithm in graded lexicographic order.
    ///
    /// Returns `(quotient, remainder)` with `self = q * divisor + r` and no term of `r`
    /// divisible by the leading monomial of `divisor`.
    pub fn div_rem(&self, divisor: &Self) -> Result<(Self, Self)> {
        if divisor.vars != self.vars {
            let (a, b) = self.aligned(divisor);
            return a.div_rem(&b);
        }
        let (lm, lc) = match divisor.leading_term() {
            Some((m, c)) => (*m, c.clone()),
            None => return Err(Error::Domain("division by the zero polynomial".into())),
        };
        let tail: Vec<(Monomial, Rational)> = divisor
            .terms
            .iter()
            .filter(|(m, _)| **m != lm)
            .map(|(m, c)| (*m, c.clone()))
            .collect();
        let mut work = self.terms.clone();
        let mut quot = BTreeMap::new();
        let mut rem = BTreeMap::new();
        while let Some((m, c)) = work.pop_last() {
            if lm.divides(&m) {
                let qm = lm.quotient_of(&m);
                let qc = c / &lc;
                for (tm, tc) in &tail {
                    let key = tm.mul(qm);
                    let delta = tc * &qc;
                    match work.entry(key) {
                        std::collections::btree_map::Entry::Vacant(e) => {
                            e.insert(-delta);
                        }
                        std::collections::btree_map::Entry::Occupied(mut e) => {
                            *e.get_mut() -= delta;
                            if e.get().is_zero() {
                                e.remove();
                            }
                        }
                    }
                }
                quot.insert(qm, qc);
            } else {
                rem.insert(m, c);
            }
        }
        Ok((
            MultiPoly::from_map(self.vars.clone(), quot),
            MultiPoly::from_map(self.vars.clone(), rem),
        ))
    }

    /// Exact quotient `self / divisor`, re-verified by multiplication.
    pub fn exact_divide(&self, divisor: &Self) -> Result<Self> {
        let (q, r) = self.div_rem(divisor)?;
        if !r.is_zero() {
            return Err(Error::Division {
                remainder: Box::new(r),
            });
        }
        let (a, _) = self.aligned(divisor);
        if q.mul(divisor) != a {
            return Err(Error::Division {
                remainder: Box::new(a.sub(&q.mul(divisor))),
            });
        }
        Ok(q)
    }

    /// Exact evaluation; every used variable must be assigned.
    pub fn eval(&self, point: &HashMap<String, Rational>) -> Result<Rational> {
        let mut values = Vec::with_capacity(self.vars.len());
        for (i, v) in self.vars.iter().enumerate() {
            match point.get(v) {
                Some(x) => values.push(x.clone()),
                None if self.terms.keys().all(|m| m.exponent(i) == 0) => {
                    values.push(Rational::zero())
                }
                None => return Err(Error::Domain(format!("no value given for variable {v}"))),
            }
        }
        Ok(self.eval_slice(&values))
    }

    /// Evaluation at a point listed in stored variable order.
    pub fn eval_slice(&self, values: &[Rational]) -> Rational {
        assert_eq!(values.len(), self.vars.len(), "point dimension mismatch");
        let mut powers: Vec<Vec<Rational>> = values
            .iter()
            .map(|v| vec![Rational::one(), v.clone()])
            .collect();
        let mut sum = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (i, pw) in powers.iter_mut().enumerate() {
                let e = m.exponent(i) as usize;
                while pw.len() <= e {
                    let next = pw.last().unwrap() * &values[i];
                    pw.push(next);
                }
                if e > 0 {
                    t *= &pw[e];
                }
            }
            sum += t;
        }
        sum
    }

    /// Assigns a value to one variable, keeping the variable list.
    pub fn eval_var(&self, var: &str, value: &Rational) -> Self {
        let Some(i) = self.var_index(var) else {
            return self.clone();
        };
        let mut out = MultiPoly::zero(&self.vars);
        let mut powers = vec![Rational::one()];
        for (m, c) in &self.terms {
            let e = m.exponent(i) as usize;
            while powers.len() <= e {
                let next = powers.last().unwrap() * value;
                powers.push(next);
            }
            out.add_term(m.with_exponent(i, 0), c * &powers[e]);
        }
        out
    }

    /// Replaces variables by polynomials (over the same or any variable list).
    pub fn substitute(&self, assignments: &HashMap<String, MultiPoly>) -> Self {
        let mut target_vars = self.vars.clone();
        for p in assignments.values() {
            for v in &p.vars {
                if !target_vars.contains(v) {
                    target_vars.push(v.clone());
                }
            }
        }
        let images: Vec<Option<MultiPoly>> = self
            .vars
            .iter()
            .map(|v| {
                assignments.get(v).map(|p| {
                    p.embed(&target_vars)
                        .expect("target contains all variables")
                })
            })
            .collect();
        let mut power_cache: Vec<Vec<MultiPoly>> = images
            .iter()
            .map(|img| match img {
                Some(p) => vec![MultiPoly::one(&target_vars), p.clone()],
                None => Vec::new(),
            })
            .collect();
        let n_target = target_vars.len();
        let mut out = MultiPoly::zero(&target_vars);
        // group terms by the exponents of the substituted variables
        let mut groups: BTreeMap<Vec<u32>, Vec<(Monomial, Rational)>> = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut key = Vec::new();
            let mut rest = vec![0u32; n_target];
            for (i, img) in images.iter().enumerate() {
                if img.is_some() {
                    key.push(m.exponent(i));
                } else {
                    rest[i] = m.exponent(i);
                }
            }
            groups
                .entry(key)
                .or_default()
                .push((Monomial::from_exponents(&rest), c.clone()));
        }
        for (key, rest_terms) in groups {
            let rest = MultiPoly::from_terms_monomial(&target_vars, rest_terms);
            let mut factor = MultiPoly::one(&target_vars);
            let mut k = 0;
            for (i, img) in images.iter().enumerate() {
                if img.is_none() {
                    continue;
                }
                let e = key[k] as usize;
                k += 1;
                if e == 0 {
                    continue;
                }
                let cache = &mut power_cache[i];
                while cache.len() <= e {
                    let next = cache.last().unwrap().mul(&cache[1]);
                    cache.push(next);
                }
                factor = factor.mul(&cache[e]);
            }
            out.add_assign(&rest.mul(&factor));
        }
        out
    }

    fn from_terms_monomial(vars: &[String], terms: Vec<(Monomial, Rational)>) -> Self {
        let mut p = MultiPoly::zero(vars);
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    /// Substitutes `var -> 1 - var`.
    pub fn flip_var(&self, var: &str) -> Self {
        let Some(_) = self.var_index(var) else {
            return self.clone();
        };
        let one = MultiPoly::one(&self.vars);
        let image = one.sub(&MultiPoly::var(&self.vars, var));
        let mut a = HashMap::new();
        a.insert(var.to_string(), image);
        self.substitute(&a)
    }

    pub fn derivative(&self, var: &str) -> Self {
        let Some(i) = self.var_index(var) else {
            return MultiPoly::zero(&self.vars);
        };
        let mut out = MultiPoly::zero(&self.vars);
        for (m, c) in &self.terms {
            let e = m.exponent(i);
            if e > 0 {
                out.add_term(
                    m.with_exponent(i, e - 1),
                    c * Rational::from_integer(BigInt::from(e)),
                );
            }
        }
        out
    }

    /// Parses a polynomial written with `+ - * / ^`, juxtaposition and parentheses.
    pub fn parse<S: AsRef<str>>(text: &str, vars: &[S]) -> Result<Self> {
        super::expr::parse_polynomial(text, vars)
    }
}

fn write_coefficient_term(
    f: &mut fmt::Formatter<'_>,
    vars: &[String],
    m: &Monomial,
    c: &Rational,
    first: bool,
) -> fmt::Result {
    let negative = c.is_negative();
    let abs = c.abs();
    if first {
        if negative {
            write!(f, "-")?;
        }
    } else if negative {
        write!(f, " - ")?;
    } else {
        write!(f, " + ")?;
    }
    let mut factors = Vec::new();
    if !abs.is_one() || m.is_one() {
        if abs.is_integer() {
            factors.push(abs.numer().to_string());
        } else {
            factors.push(format!("{}/{}", abs.numer(), abs.denom()));
        }
    }
    for (i, v) in vars.iter().enumerate() {
        match m.exponent(i) {
            0 => {}
            1 => factors.push(v.clone()),
            e => factors.push(format!("{v}^{e}")),
        }
    }
    write!(f, "{}", factors.join("*"))
}

impl fmt::Display for MultiPoly {
    /// Terms from highest to lowest in graded lexicographic order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            write_coefficient_term(f, &self.vars, m, c, k == 0)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> MultiPoly {
        MultiPoly::parse(s, &["x", "y", "z"]).unwrap()
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn ring_operations() {
        assert_eq!(p("x+y").mul(&p("x-y")), p("x^2-y^2"));
        assert_eq!(p("x+y").add(&p("0")), p("x+y"));
        assert_eq!(p("(1+x^2)^2").sub(&p("4x^2")), p("(1-x^2)^2"));
        assert!(p("x - x").is_zero());
    }

    #[test]
    fn rational_coefficients_multiply() {
        assert_eq!(p("x/2 + 1/3").mul(&p("6")), p("3x + 2"));
        assert_eq!(p("(x/2 + y/3)^2"), p("x^2/4 + x y/3 + y^2/9"));
    }

    #[test]
    fn division() {
        assert_eq!(p("x^2-y^2").exact_divide(&p("x-y")).unwrap(), p("x+y"));
        match p("x^2+1").exact_divide(&p("x-1")) {
            Err(Error::Division { remainder }) => assert_eq!(*remainder, p("2")),
            other => panic!("unexpected {other:?}"),
        }
        let (qq, r) = p("x^3 + y").div_rem(&p("x+1")).unwrap();
        assert_eq!(qq.mul(&p("x+1")).add(&r), p("x^3+y"));
    }

    #[test]
    fn evaluation() {
        let mut pt = HashMap::new();
        pt.insert("x".to_string(), q(2, 1));
        pt.insert("y".to_string(), q(3, 1));
        assert_eq!(p("x^2+y").eval(&pt).unwrap(), q(7, 1));
        assert!(p("z").eval(&pt).is_err());
        assert_eq!(
            p("3 + x y z").eval_slice(&[q(0, 1), q(0, 1), q(0, 1)]),
            q(3, 1)
        );
        assert_eq!(p("x^2 y + z").eval_var("x", &q(1, 2)), p("y/4 + z"));
    }

    #[test]
    fn flips_and_derivatives() {
        assert_eq!(p("x").flip_var("x"), p("1-x"));
        assert_eq!(p("1-(1-x)^4").flip_var("x"), p("1-x^4"));
        let r = p("x^3 y + 2 y^2 z - z");
        assert_eq!(r.flip_var("y").flip_var("y"), r);
        assert_eq!(p("x^2").derivative("x"), p("2x"));
        assert_eq!(r.derivative("y"), p("x^3 + 4 y z"));
    }

    #[test]
    fn substitution_of_polynomials() {
        let mut a = HashMap::new();
        a.insert("x".to_string(), p("y+z"));
        assert_eq!(p("x^2 + x y").substitute(&a), p("(y+z)^2 + (y+z) y"));
    }

    #[test]
    fn embedding_aligns_variables() {
        let a = MultiPoly::parse("a + b", &["a", "b"]).unwrap();
        let b = MultiPoly::parse("b + c", &["b", "c"]).unwrap();
        let s = a.add(&b);
        assert_eq!(s.vars(), &["a", "b", "c"]);
        assert_eq!(s, MultiPoly::parse("a + 2b + c", &["a", "b", "c"]).unwrap());
        assert!(s.embed(&["a", "b"]).is_err());
    }

    #[test]
    fn display_is_descending() {
        assert_eq!(p("1 + x - 2 y^2/3").to_string(), "-2/3*y^2 + x + 1");
        assert_eq!(MultiPoly::zero(&["x"]).to_string(), "0");
    }
}
