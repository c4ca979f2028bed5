use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use super::multipoly::MultiPoly;
use crate::arith::{rational_serde, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Pass,
    Fail,
}

/// Where the elimination loop first met a negative partial sum.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureWitness {
    /// Elimination order, outermost variable first.
    pub order: Vec<String>,
    /// Exponent bounds of the failing rectangular sum, aligned with `order`.
    pub prefix: Vec<u32>,
    #[serde(with = "rational_serde")]
    pub partial_sum: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TestReport {
    pub verdict: Verdict,
    pub witness: Option<FailureWitness>,
}

impl TestReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }
}

/// Order used when none is given: the last stored variable is eliminated first.
pub fn default_order(p: &MultiPoly) -> Vec<String> {
    p.vars().iter().rev().cloned().collect()
}

/// Partial-sum test on the unit cube.
///
/// Checks that every rectangular sum of coefficients
/// `sum_{e <= k} c_e` is non-negative. A pass proves `p >= 0` on `[0,1]^n`;
/// a failure says nothing about the sign. `var_order` lists variables from the
/// outermost elimination loop inward; variables of `p` that it omits are
/// appended in stored order. The witness is the first failing prefix in
/// lexicographic order of `var_order`, which is where the loop
/// `P -> P(0) + (P - P(0))/x` first meets `P(0) < 0`.
pub fn linear_test<S: AsRef<str>>(p: &MultiPoly, var_order: &[S]) -> TestReport {
    let sums = PartialSums::new(p, var_order);
    match sums.cells.iter().position(|c| c.is_negative()) {
        None => TestReport {
            verdict: Verdict::Pass,
            witness: None,
        },
        Some(flat) => TestReport {
            verdict: Verdict::Fail,
            witness: Some(sums.witness(flat)),
        },
    }
}

/// The smallest rectangular partial sum and its prefix, first in loop order on ties.
pub fn weakest_prefix<S: AsRef<str>>(p: &MultiPoly, var_order: &[S]) -> FailureWitness {
    let sums = PartialSums::new(p, var_order);
    let flat = sums
        .cells
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.cmp(b.1).then(a.0.cmp(&b.0)))
        .map_or(0, |(i, _)| i);
    sums.witness(flat)
}

struct PartialSums {
    order: Vec<String>,
    dims: Vec<usize>,
    cells: Vec<BigInt>,
    scale: BigInt,
}

impl PartialSums {
    fn new<S: AsRef<str>>(p: &MultiPoly, var_order: &[S]) -> Self {
        let mut order: Vec<String> = Vec::new();
        for v in var_order {
            let v = v.as_ref().to_string();
            if !order.contains(&v) {
                order.push(v);
            }
        }
        for v in p.vars() {
            if !order.contains(v) {
                order.push(v.clone());
            }
        }
        let index: Vec<Option<usize>> = order.iter().map(|v| p.var_index(v)).collect();
        let dims: Vec<usize> = order.iter().map(|v| p.degree_in(v) as usize + 1).collect();
        let size: usize = dims.iter().product();
        let scale = p.denominator_lcm();
        let mut cells = vec![BigInt::zero(); size];
        for (m, c) in p.terms() {
            let mut flat = 0usize;
            for (k, idx) in index.iter().enumerate() {
                let e = idx.map_or(0, |i| m.exponent(i)) as usize;
                flat = flat * dims[k] + e;
            }
            cells[flat] = c.numer() * (&scale / c.denom());
        }
        // running sums along each axis turn coefficients into rectangular partial sums
        let mut stride = 1usize;
        for k in (0..dims.len()).rev() {
            let d = dims[k];
            if d > 1 {
                for start in 0..size {
                    if (start / stride).is_multiple_of(d) {
                        for j in 1..d {
                            let prev = cells[start + (j - 1) * stride].clone();
                            cells[start + j * stride] += prev;
                        }
                    }
                }
            }
            stride *= d;
        }
        Self {
            order,
            dims,
            cells,
            scale,
        }
    }

    fn witness(&self, flat: usize) -> FailureWitness {
        let mut prefix = vec![0u32; self.dims.len()];
        let mut rest = flat;
        for k in (0..self.dims.len()).rev() {
            prefix[k] = (rest % self.dims[k]) as u32;
            rest /= self.dims[k];
        }
        FailureWitness {
            order: self.order.clone(),
            prefix,
            partial_sum: Rational::new(self.cells[flat].clone(), self.scale.clone()),
        }
    }
}

/// The rectangular coefficient sum bounded by `prefix` (aligned with `order`).
pub fn partial_sum<S: AsRef<str>>(p: &MultiPoly, order: &[S], prefix: &[u32]) -> Rational {
    let bounds: Vec<(Option<usize>, u32)> = order
        .iter()
        .zip(prefix)
        .map(|(v, &k)| (p.var_index(v.as_ref()), k))
        .collect();
    p.terms()
        .filter(|(m, _)| {
            bounds
                .iter()
                .all(|(i, k)| i.is_none_or(|i| m.exponent(i) <= *k))
        })
        .fold(Rational::zero(), |acc, (_, c)| acc + c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> MultiPoly {
        MultiPoly::parse(s, &["x", "y", "z"]).unwrap()
    }

    #[test]
    fn one_variable_examples() {
        let q = p("4x - 6x^2 + 4x^3 - x^4");
        let r = linear_test(&q, &["x"]);
        assert_eq!(r.verdict, Verdict::Fail);
        let w = r.witness.unwrap();
        assert_eq!(w.prefix[0], 2);
        assert_eq!(w.partial_sum, Rational::from_integer((-2).into()));
        assert!(linear_test(&q.flip_var("x"), &["x"]).passed());
    }

    #[test]
    fn trivial_cases() {
        assert!(linear_test(&p("0"), &["x"]).passed());
        let r = linear_test(&p("-1"), &["z", "y", "x"]);
        assert_eq!(r.witness.unwrap().prefix, vec![0, 0, 0]);
        assert!(linear_test(&p("x y"), &["x", "y"]).passed());
    }

    #[test]
    fn witness_reproduces_the_sum() {
        let q = p("1 + y - 3 x y + z^2 x");
        let order = ["z", "y", "x"];
        let r = linear_test(&q, &order);
        let w = r.witness.expect("fails");
        assert_eq!(w.prefix, vec![0, 1, 1]);
        assert_eq!(partial_sum(&q, &w.order, &w.prefix), w.partial_sum);
    }

    #[test]
    fn rational_coefficients() {
        assert!(linear_test(&p("1/3 - x/3 + x^2/7"), &["x"]).passed());
        assert!(!linear_test(&p("1/3 - x/2"), &["x"]).passed());
    }
}
