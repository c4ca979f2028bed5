use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_PRECISION_BITS: u32 = 128;
pub const DEFAULT_PRECISION_CAP: u32 = 4096;

/// Target enclosure width `2^-bits`, together with the cap that adaptive
/// refinement may double up to before giving up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Precision {
    bits: u32,
    cap: u32,
}

impl Precision {
    /// # Panics
    /// Panics if `bits == 0`.
    pub fn new(bits: u32) -> Self {
        assert!(bits >= 1, "precision must be at least one bit");
        Precision {
            bits,
            cap: DEFAULT_PRECISION_CAP.max(bits),
        }
    }

    pub fn with_cap(self, cap: u32) -> Self {
        Precision {
            bits: self.bits,
            cap: cap.max(self.bits),
        }
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn cap(&self) -> u32 {
        self.cap
    }

    /// Same cap, `bits + extra` working bits.
    pub fn plus(self, extra: u32) -> Self {
        Precision {
            bits: self.bits + extra,
            cap: self.cap.max(self.bits + extra),
        }
    }

    /// Doubles the precision; `None` once the cap has been passed.
    pub fn doubled(self) -> Option<Self> {
        let next = self.bits.saturating_mul(2);
        (self.bits < self.cap).then_some(Precision {
            bits: next.min(self.cap),
            cap: self.cap,
        })
    }
}

impl Default for Precision {
    fn default() -> Self {
        Precision::new(DEFAULT_PRECISION_BITS)
    }
}

/// Runs `attempt` at `start`, doubling the precision while it returns `Ok(None)`.
///
/// Reaching the cap without a decision is reported as [`Error::Inconclusive`].
pub fn refine<T>(
    start: Precision,
    what: impl Fn() -> String,
    mut attempt: impl FnMut(Precision) -> Result<Option<T>>,
) -> Result<T> {
    let mut p = start;
    loop {
        if let Some(v) = attempt(p)? {
            return Ok(v);
        }
        match p.doubled() {
            Some(next) => p = next,
            None => {
                return Err(Error::Inconclusive {
                    what: what(),
                    cap: p.cap(),
                })
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doubling_stops_at_cap() {
        let mut p = Precision::new(100).with_cap(300);
        let mut seen = vec![p.bits()];
        while let Some(n) = p.doubled() {
            p = n;
            seen.push(p.bits());
        }
        assert_eq!(seen, vec![100, 200, 300]);
    }

    #[test]
    fn refine_reports_inconclusive() {
        let r: Result<()> = refine(
            Precision::new(8).with_cap(64),
            || "never".into(),
            |_| Ok(None),
        );
        assert!(matches!(r, Err(Error::Inconclusive { cap: 64, .. })));
        let v = refine(
            Precision::new(8),
            || "x".into(),
            |p| Ok((p.bits() >= 32).then_some(p.bits())),
        )
        .unwrap();
        assert_eq!(v, 32);
    }
}
