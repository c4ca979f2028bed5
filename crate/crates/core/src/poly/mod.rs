//! Exact multivariate polynomials, rational functions and the partial-sum positivity test.

pub mod expr;
mod json;
mod linear_test;
mod monomial;
mod multipoly;
mod rational_fn;

pub use expr::{parse_constant, parse_polynomial, Context, Expr};
pub use linear_test::{
    default_order, linear_test, partial_sum, weakest_prefix, FailureWitness, TestReport, Verdict,
};
pub use monomial::{Monomial, MAX_VARS};
pub use multipoly::MultiPoly;
pub use rational_fn::RationalFn;

use std::collections::HashMap;

use crate::arith::Rational;
use crate::error::Result;

/// Shorthand for building an evaluation point.
pub fn point<S: AsRef<str>>(pairs: &[(S, Rational)]) -> HashMap<String, Rational> {
    pairs
        .iter()
        .map(|(v, x)| (v.as_ref().to_string(), x.clone()))
        .collect()
}

/// `p` with `var` replaced by `1 - var`.
pub fn flip_var(p: &MultiPoly, var: &str) -> MultiPoly {
    p.flip_var(var)
}

pub fn exact_divide(p: &MultiPoly, q: &MultiPoly) -> Result<MultiPoly> {
    p.exact_divide(q)
}
