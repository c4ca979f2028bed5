//! Exact computation of the Bellman function for the tail distribution of
//! functions with bounded dyadic square function.
//!
//! * [`arith`]: rationals, dyadic grid points, certified interval enclosures.
//! * [`poly`]: sparse multivariate polynomials, rational functions, the
//!   partial-sum non-negativity test.
//! * [`bridge`]: the nonlinear mean `M`, the suspension bridge `A`, the Bellman
//!   function `B = 1 - A^{-1}` on `[0, 1]` and supersolution checks.
//! * [`extremal`]: extremal Haar trees and a dynamic-programming lower bound.
//! * [`certify`]: scripted re-certification of the inequality proofs.

pub mod arith;
pub mod bridge;
pub mod certify;
pub mod error;
pub mod extremal;
pub mod poly;

pub use error::{Error, Result};
