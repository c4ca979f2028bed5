use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::arith::{pow2, Rational};
use crate::error::{Error, Result};

/// Lower bounds for `B` by dynamic programming over Haar trees of bounded depth.
///
/// Row `k` holds, for each grid point `x_i = i * step`, a value `<= B(x_i)` realised
/// by a function whose Haar expansion has depth at most `k`. The recursion is
///
/// `B_{k+1}(x) = max( max_j (B_k(X(x,-tau_j)) + B_k(X(x,tau_j))) / 2, 1/2 )`
///
/// where off-grid arguments round up to the next grid point, arguments `<= 0` give 1
/// and arguments past the grid give 0. The `tau_j = 2r/(1+r^2)`, `r = j/m`, make
/// `sqrt(1 - tau_j^2)` rational, so every step is integer arithmetic. The constant
/// `1/2` is the pure Haar function, which clears every level in `(0, 1]`.
#[derive(Debug, Clone, Serialize)]
pub struct DpGrid {
    depth: u32,
    #[serde(with = "crate::arith::rational_serde")]
    step: Rational,
    points: usize,
    tau_steps: u32,
    /// `rows[k][i]` is the numerator of the depth-`k` value over `2^k`.
    rows: Vec<Vec<u64>>,
}

impl DpGrid {
    /// Grid `0, step, 2 step, ...` up to `x_max`, `tau_steps` values of `r` in `[0, 1)`.
    pub fn new(depth: u32, step: Rational, x_max: Rational, tau_steps: u32) -> Result<Self> {
        if depth > 62 {
            return Err(Error::Domain("depth is limited to 62".into()));
        }
        if !step.is_positive() || step.numer().to_i64().is_none() || step.denom().to_i64().is_none()
        {
            return Err(Error::Domain(format!(
                "step {step} must be a small positive rational"
            )));
        }
        if tau_steps == 0 || tau_steps > 1 << 20 {
            return Err(Error::Domain("tau_steps must be in 1..=2^20".into()));
        }
        let count = (x_max / &step).floor().to_usize().unwrap_or(0) + 1;
        if count > 1 << 20 {
            return Err(Error::Domain("grid has more than 2^20 points".into()));
        }
        let mut first = vec![0u64; count];
        first[0] = 1;
        Ok(Self {
            depth,
            step,
            points: count,
            tau_steps,
            rows: vec![first],
        })
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn x(&self, i: usize) -> Rational {
        &self.step * Rational::from_integer(BigInt::from(i))
    }

    pub fn tau_grid(&self) -> Vec<Rational> {
        let m = BigInt::from(self.tau_steps);
        (0..self.tau_steps)
            .map(|j| {
                let r = Rational::new(BigInt::from(j), m.clone());
                (&r + &r) / (Rational::one() + &r * &r)
            })
            .collect()
    }

    /// Number of rows computed so far, minus one.
    pub fn computed_depth(&self) -> u32 {
        self.rows.len() as u32 - 1
    }

    pub fn value(&self, k: u32, i: usize) -> Rational {
        Rational::from_integer(BigInt::from(self.rows[k as usize][i])) * pow2(-(k as i64))
    }

    pub fn row(&self, k: u32) -> Vec<Rational> {
        (0..self.points).map(|i| self.value(k, i)).collect()
    }

    /// Certified lower bound for `B(x)` from the deepest row.
    pub fn lower_bound(&self, x: &Rational) -> Rational {
        if !x.is_positive() {
            return Rational::one();
        }
        let k = self.computed_depth();
        let idx = (x / &self.step).ceil().to_usize();
        match idx {
            Some(i) if i < self.points => self.value(k, i),
            _ => Rational::zero(),
        }
    }

    fn step_parts(&self) -> (i128, i128) {
        (
            self.step.numer().to_i128().expect("checked in new"),
            self.step.denom().to_i128().expect("checked in new"),
        )
    }

    fn next_row(&self) -> Vec<u64> {
        let prev = self.rows.last().expect("row 0 exists");
        let k = self.rows.len() as u32 - 1;
        let (a, b) = self.step_parts();
        let m = self.tau_steps as i128;
        let n = self.points as i128;
        let half = 1u64 << k;
        // value of B_k rounded up to the grid, as a numerator over 2^k
        let lookup = |num: i128, den: i128| -> u64 {
            if num <= 0 {
                return 1u64 << k;
            }
            let idx = Integer::div_ceil(&num, &den);
            if idx >= n {
                0
            } else {
                prev[idx as usize]
            }
        };
        (0..self.points)
            .into_par_iter()
            .map(|i| {
                let i = i as i128;
                // pure Haar function
                let mut best = if i == 0 {
                    2 * prev[0]
                } else if i * a <= b {
                    half
                } else {
                    0
                };
                for j in 0..m {
                    // X(x_i, ±tau_j) / step = ((m^2+j^2) i a ± 2 j m b) / ((m^2-j^2) a)
                    let base = (m * m + j * j) * i * a;
                    let shift = 2 * j * m * b;
                    let den = (m * m - j * j) * a;
                    let v = lookup(base - shift, den) + lookup(base + shift, den);
                    best = best.max(v);
                }
                best
            })
            .collect()
    }
}

/// Fills every row of the grid up to its depth.
pub fn dp_oracle(mut grid: DpGrid) -> DpGrid {
    while grid.computed_depth() < grid.depth {
        let row = grid.next_row();
        grid.rows.push(row);
    }
    grid
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(a: i64, b: i64) -> Rational {
        Rational::new(a.into(), b.into())
    }

    #[test]
    fn depth_zero_is_indicator_of_nonpositive() {
        let g = dp_oracle(DpGrid::new(0, q(1, 4), q(2, 1), 4).unwrap());
        assert_eq!(g.value(0, 0), Rational::one());
        assert!(g.row(0)[1..].iter().all(Zero::is_zero));
        assert_eq!(g.lower_bound(&q(-3, 1)), Rational::one());
    }

    #[test]
    fn depth_one_is_one_half_on_unit_interval() {
        let g = dp_oracle(DpGrid::new(1, q(1, 8), q(3, 1), 16).unwrap());
        for i in 1..g.points() {
            let expected = if g.x(i) <= Rational::one() {
                q(1, 2)
            } else {
                Rational::zero()
            };
            assert_eq!(g.value(1, i), expected, "x = {}", g.x(i));
        }
    }

    #[test]
    fn rows_increase_with_depth() {
        let g = dp_oracle(DpGrid::new(5, q(1, 16), q(3, 1), 32).unwrap());
        for k in 0..5 {
            for i in 0..g.points() {
                assert!(g.value(k, i) <= g.value(k + 1, i));
            }
        }
    }

    #[test]
    fn rows_decrease_in_x() {
        let g = dp_oracle(DpGrid::new(6, q(1, 32), q(2, 1), 64).unwrap());
        let row = g.row(6);
        assert!(row.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn pythagorean_taus_are_in_range() {
        let g = DpGrid::new(1, q(1, 2), q(1, 1), 8).unwrap();
        for tau in g.tau_grid() {
            let c = Rational::one() - &tau * &tau;
            assert!(c.is_positive());
            let r = c.numer().sqrt();
            assert_eq!(&r * &r, *c.numer());
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(DpGrid::new(70, q(1, 2), q(1, 1), 8).is_err());
        assert!(DpGrid::new(3, q(-1, 2), q(1, 1), 8).is_err());
        assert!(DpGrid::new(3, q(1, 2), q(1, 1), 0).is_err());
    }
}
