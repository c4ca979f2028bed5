use thiserror::Error;

use crate::arith::Rational;
use crate::poly::MultiPoly;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// `big_b` was asked for a value beyond `x = 1`; only the upper bound is known there.
    #[error("value beyond x = 1 is not determined; upper bound 1/(1+x^2) = {upper_bound}")]
    BeyondKnownRange { upper_bound: Rational },

    /// A comparison could not be decided before the precision cap was reached.
    #[error("inconclusive at precision cap of {cap} bits: {what}")]
    Inconclusive { what: String, cap: u32 },

    /// Exact polynomial division left a nonzero remainder.
    #[error("division left a nonzero remainder with {} terms", remainder.len())]
    Division { remainder: Box<MultiPoly> },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
