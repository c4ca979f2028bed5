use std::cmp::Ordering;

/// Maximum number of variables a polynomial may carry.
pub const MAX_VARS: usize = 8;

/// Exponent vector packed one byte per variable, variable 0 in the most significant byte.
///
/// The derived ordering compares total degree first and then the packed word,
/// which is graded lexicographic order on the stored variable order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial {
    degree: u16,
    packed: u64,
}

#[inline]
fn shift(i: usize) -> u32 {
    (56 - 8 * i) as u32
}

impl Monomial {
    pub const ONE: Monomial = Monomial {
        degree: 0,
        packed: 0,
    };

    /// # Panics
    /// Panics if more than [`MAX_VARS`] exponents are given or one exceeds 255.
    pub fn from_exponents(exps: &[u32]) -> Self {
        assert!(
            exps.len() <= MAX_VARS,
            "at most {MAX_VARS} variables are supported"
        );
        let mut m = Monomial::ONE;
        for (i, &e) in exps.iter().enumerate() {
            assert!(e <= 255, "exponent {e} exceeds 255");
            m.packed |= u64::from(e) << shift(i);
            m.degree += e as u16;
        }
        m
    }

    pub fn var(i: usize, e: u32) -> Self {
        let mut exps = [0u32; MAX_VARS];
        exps[i] = e;
        Monomial::from_exponents(&exps[..=i])
    }

    #[inline]
    pub fn exponent(&self, i: usize) -> u32 {
        ((self.packed >> shift(i)) & 0xff) as u32
    }

    pub fn exponents(&self, nvars: usize) -> Vec<u32> {
        (0..nvars).map(|i| self.exponent(i)).collect()
    }

    pub fn degree(&self) -> u32 {
        u32::from(self.degree)
    }

    pub fn is_one(&self) -> bool {
        self.packed == 0
    }

    /// # Panics
    /// Panics when an exponent would exceed 255.
    #[inline]
    pub fn mul(self, other: Monomial) -> Monomial {
        let sum = self.packed.wrapping_add(other.packed);
        // a carry out of any byte shows up as a mismatch in the low bit of the next byte
        let carries = (sum ^ self.packed ^ other.packed) & 0x0101_0101_0101_0100;
        let top_overflow = sum < self.packed;
        assert!(carries == 0 && !top_overflow, "monomial exponent overflow");
        Monomial {
            degree: self.degree + other.degree,
            packed: sum,
        }
    }

    #[inline]
    pub fn divides(&self, other: &Monomial) -> bool {
        (0..MAX_VARS).all(|i| self.exponent(i) <= other.exponent(i))
    }

    /// `other / self`, assuming `self.divides(other)`.
    #[inline]
    pub fn quotient_of(&self, other: &Monomial) -> Monomial {
        debug_assert!(self.divides(other));
        Monomial {
            degree: other.degree - self.degree,
            packed: other.packed - self.packed,
        }
    }

    pub fn with_exponent(&self, i: usize, e: u32) -> Monomial {
        assert!(e <= 255, "exponent {e} exceeds 255");
        let old = self.exponent(i);
        Monomial {
            degree: self.degree - old as u16 + e as u16,
            packed: (self.packed & !(0xffu64 << shift(i))) | (u64::from(e) << shift(i)),
        }
    }

    /// Lexicographic comparison ignoring total degree.
    pub fn lex_cmp(&self, other: &Monomial) -> Ordering {
        self.packed.cmp(&other.packed)
    }
}
