//! Selector sequences choosing which digit positions are active.
//!
//! Positions are 1-based, matching the `A`-adic digit positions.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};

/// Predicate over 1-based positions.
pub type PositionPredicate = Arc<dyn Fn(u64) -> bool + Send + Sync>;

/// Which positions are active.
#[derive(Clone)]
pub enum PatternSpec {
    /// Position `i` is active iff `bits[(i - 1) % bits.len()]`.
    Periodic(Vec<bool>),
    /// Position `i` is active iff `⌊i·d⌋ > ⌊(i-1)·d⌋`; limiting frequency `d`.
    Beatty(f64),
    /// Caller-supplied predicate with its claimed limsup frequency.
    Explicit {
        name: String,
        frequency: f64,
        predicate: PositionPredicate,
    },
}

impl fmt::Debug for PatternSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PatternSpec::Periodic(bits) => {
                let s: String = bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
                write!(f, "Periodic({s})")
            }
            PatternSpec::Beatty(d) => write!(f, "Beatty({d})"),
            PatternSpec::Explicit { name, frequency, .. } => {
                write!(f, "Explicit({name}, frequency {frequency})")
            }
        }
    }
}

impl PatternSpec {
    pub fn periodic(bits: Vec<bool>) -> Result<Self> {
        if bits.is_empty() {
            return Err(Error::InvalidArgument("periodic pattern needs at least one bit".into()));
        }
        Ok(PatternSpec::Periodic(bits))
    }

    pub fn beatty(d: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&d) {
            return Err(Error::InvalidArgument(format!("Beatty density {d} is outside [0, 1]")));
        }
        Ok(PatternSpec::Beatty(d))
    }

    /// An explicit pattern whose claimed frequency is checked against the
    /// average over the first `check_len` positions.
    pub fn explicit(
        name: impl Into<String>,
        frequency: f64,
        predicate: PositionPredicate,
        check_len: u64,
        tolerance: f64,
    ) -> Result<Self> {
        if !(0.0..=1.0).contains(&frequency) {
            return Err(Error::InvalidArgument(format!("frequency {frequency} is outside [0, 1]")));
        }
        let pat = PatternSpec::Explicit {
            name: name.into(),
            frequency,
            predicate,
        };
        if check_len > 0 {
            let observed = pat.active_count(check_len) as f64 / check_len as f64;
            if (observed - frequency).abs() > tolerance {
                return Err(Error::PatternFrequency {
                    claimed: frequency,
                    observed,
                });
            }
        }
        Ok(pat)
    }

    pub fn all_active() -> Self {
        PatternSpec::Periodic(vec![true])
    }

    pub fn none_active() -> Self {
        PatternSpec::Periodic(vec![false])
    }

    pub fn is_active(&self, i: u64) -> bool {
        if i == 0 {
            return false;
        }
        match self {
            PatternSpec::Periodic(bits) => bits[((i - 1) % bits.len() as u64) as usize],
            PatternSpec::Beatty(d) => (i as f64 * d).floor() > ((i - 1) as f64 * d).floor(),
            PatternSpec::Explicit { predicate, .. } => predicate(i),
        }
    }

    /// Number of active positions among `1..=n`.
    pub fn active_count(&self, n: u64) -> u64 {
        match self {
            PatternSpec::Beatty(d) => (n as f64 * d).floor() as u64,
            _ => (1..=n).filter(|&i| self.is_active(i)).count() as u64,
        }
    }

    /// Limsup of `active_count(n) / n`.
    pub fn frequency(&self) -> f64 {
        match self {
            PatternSpec::Periodic(bits) => {
                bits.iter().filter(|&&b| b).count() as f64 / bits.len() as f64
            }
            PatternSpec::Beatty(d) => *d,
            PatternSpec::Explicit { frequency, .. } => *frequency,
        }
    }

    /// Whether every nonzero letter of `letters` sits at an active position.
    pub fn admits(&self, letters: &[i8]) -> bool {
        letters
            .iter()
            .enumerate()
            .all(|(i, &c)| c == 0 || self.is_active(i as u64 + 1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beatty_matches_floor_count() {
        for d in [0.0, 0.25, 0.4893, 2f64.sqrt() - 1.0, 1.0] {
            let p = PatternSpec::beatty(d).unwrap();
            let mut count = 0;
            for i in 1..=2000u64 {
                if p.is_active(i) {
                    count += 1;
                }
                assert_eq!(count, p.active_count(i));
            }
        }
    }

    #[test]
    fn periodic_frequency() {
        let p = PatternSpec::periodic(vec![true, false, true, false]).unwrap();
        assert_eq!(p.frequency(), 0.5);
        assert!(p.is_active(1) && !p.is_active(2) && p.is_active(5));
        assert!(PatternSpec::periodic(vec![]).is_err());
    }

    #[test]
    fn explicit_frequency_is_checked() {
        let evens: PositionPredicate = Arc::new(|i| i % 2 == 0);
        assert!(PatternSpec::explicit("evens", 0.5, evens.clone(), 1000, 0.01).is_ok());
        assert!(matches!(
            PatternSpec::explicit("evens", 0.9, evens, 1000, 0.01),
            Err(Error::PatternFrequency { .. })
        ));
    }

    #[test]
    fn admits_checks_nonzero_letters_only() {
        let p = PatternSpec::periodic(vec![true, false]).unwrap();
        assert!(p.admits(&[1, 0, -1]));
        assert!(!p.admits(&[1, 1]));
        assert!(p.admits(&[]));
    }
}
