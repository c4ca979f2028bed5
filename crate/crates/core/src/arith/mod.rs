//! Exact rationals, dyadic grid points and outward-rounded rational intervals.

mod dyadic;
mod interval;
mod precision;
mod rational;
mod sqrt;

pub use dyadic::DyadicRational;
pub use interval::{CompareResult, IntervalOp, RatInterval};
pub use precision::{refine, Precision, DEFAULT_PRECISION_BITS, DEFAULT_PRECISION_CAP};
pub use rational::{format_rational, parse_rational, pow2, rational_serde, Rational};
pub use sqrt::sqrt_enclosure;
