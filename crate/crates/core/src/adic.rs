//! Symbolic lattice points.
//!
//! A point is kept as its `A`-adic digit string: a dense head of low digits
//! plus at most one isolated high digit (the kick). Kicked spectrum points
//! have digits at positions far beyond anything that can be materialized, so
//! comparisons, zero-set tests and magnitude bounds all work on this form.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{a_adic_expansion, horner, in_gamma, Digit, LatticeVec, MatrixParams};

/// A single digit at an explicit 1-based position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Kick {
    pub position: u64,
    pub digit: Digit,
}

/// `Σ_{i ≤ head.len()} A^(i-1) head[i-1] + A^(position-1) kick`, with every
/// digit in `Γ`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub struct AdicPoint {
    head: Vec<Digit>,
    kick: Option<Kick>,
}

/// Largest number of bits a materialized coordinate may have.
pub const MATERIALIZE_BITS: f64 = (1u64 << 24) as f64;

impl AdicPoint {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Builds a point from a head and an optional kick. Trailing zero head
    /// digits are dropped and a zero kick is ignored.
    pub fn new(mut head: Vec<Digit>, kick: Option<Kick>) -> Result<Self> {
        while head.last().is_some_and(Digit::is_zero) {
            head.pop();
        }
        let kick = kick.filter(|k| !k.digit.is_zero());
        if let Some(k) = kick {
            if k.position <= head.len() as u64 {
                return Err(Error::InvalidArgument(format!(
                    "kick position {} overlaps a head of length {}",
                    k.position,
                    head.len()
                )));
            }
        }
        Ok(Self { head, kick })
    }

    /// Normalizes a dense digit string: trailing zeros are dropped and a last
    /// digit separated from the rest by zeros becomes the kick.
    pub fn from_digits(mut digits: Vec<Digit>) -> Self {
        while digits.last().is_some_and(Digit::is_zero) {
            digits.pop();
        }
        let n = digits.len();
        if n >= 2 && digits[n - 2].is_zero() {
            let digit = digits.pop().expect("nonempty");
            let kick = Kick {
                position: n as u64,
                digit,
            };
            while digits.last().is_some_and(Digit::is_zero) {
                digits.pop();
            }
            return Self {
                head: digits,
                kick: Some(kick),
            };
        }
        Self {
            head: digits,
            kick: None,
        }
    }

    pub fn from_lattice(v: &LatticeVec, p: &MatrixParams) -> Self {
        Self::from_digits(a_adic_expansion(v, p))
    }

    pub fn head(&self) -> &[Digit] {
        &self.head
    }

    pub fn kick(&self) -> Option<Kick> {
        self.kick
    }

    pub fn is_zero(&self) -> bool {
        self.head.is_empty() && self.kick.is_none()
    }

    /// Position of the last nonzero digit (0 for the origin).
    pub fn len(&self) -> u64 {
        match self.kick {
            Some(k) => k.position,
            None => self.head.len() as u64,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn digit_at(&self, position: u64) -> Digit {
        if position == 0 {
            return Digit::ZERO;
        }
        if position <= self.head.len() as u64 {
            return self.head[position as usize - 1];
        }
        match self.kick {
            Some(k) if k.position == position => k.digit,
            _ => Digit::ZERO,
        }
    }

    /// Checks every digit against `Γ`.
    pub fn validate(&self, p: &MatrixParams) -> Result<()> {
        for (index, &digit) in self.head.iter().enumerate() {
            if !in_gamma(digit, p) {
                return Err(Error::DigitOutOfRange { index, digit });
            }
        }
        if let Some(k) = self.kick {
            if !in_gamma(k.digit, p) {
                return Err(Error::DigitOutOfRange {
                    index: usize::try_from(k.position - 1).unwrap_or(usize::MAX),
                    digit: k.digit,
                });
            }
        }
        Ok(())
    }

    /// Lowest position where the two digit strings differ, with both digits.
    pub fn first_difference(&self, other: &AdicPoint) -> Option<(u64, Digit, Digit)> {
        let dense = self.head.len().max(other.head.len()) as u64;
        let mut positions: Vec<u64> = (1..=dense).collect();
        let mut kicks: Vec<u64> = [self.kick, other.kick]
            .iter()
            .flatten()
            .map(|k| k.position)
            .filter(|&pos| pos > dense)
            .collect();
        kicks.sort_unstable();
        positions.extend(kicks);
        positions.into_iter().find_map(|pos| {
            let (a, b) = (self.digit_at(pos), other.digit_at(pos));
            (a != b).then_some((pos, a, b))
        })
    }

    /// Lowest position where one coordinate's digits differ, with both
    /// digits of that coordinate.
    pub fn first_component_difference(
        &self,
        other: &AdicPoint,
        component: impl Fn(&Digit) -> i64,
    ) -> Option<(u64, i64, i64)> {
        let dense = self.head.len().max(other.head.len()) as u64;
        let mut kicks: Vec<u64> = [self.kick, other.kick]
            .iter()
            .flatten()
            .map(|k| k.position)
            .filter(|&pos| pos > dense)
            .collect();
        kicks.sort_unstable();
        (1..=dense).chain(kicks).find_map(|pos| {
            let (a, b) = (component(&self.digit_at(pos)), component(&other.digit_at(pos)));
            (a != b).then_some((pos, a, b))
        })
    }

    /// Representation-independent identity: the nonzero digits with their
    /// positions.
    pub fn canonical_key(&self) -> Vec<(u64, Digit)> {
        self.digits().filter(|(_, d)| !d.is_zero()).collect()
    }

    /// Value of the digits at positions `1..=n`; congruent to the point
    /// modulo `A^n`.
    pub fn low_value(&self, n: u64, p: &MatrixParams) -> LatticeVec {
        let take = (n.min(self.head.len() as u64)) as usize;
        let mut v = horner(self.head[..take].iter().map(|d| (d.x, d.y)), p);
        if let Some(k) = self.kick.filter(|k| k.position <= n) {
            let t = p.apply_power(k.digit, k.position - 1);
            v = &v + &t;
        }
        v
    }

    /// Exact value of the dense head (the point minus its kick term).
    pub fn head_value(&self, p: &MatrixParams) -> LatticeVec {
        horner(self.head.iter().map(|d| (d.x, d.y)), p)
    }

    /// Approximate bit length of the largest coordinate.
    pub fn bit_estimate(&self, p: &MatrixParams) -> f64 {
        let lx = (p.radix_x() as f64).log2();
        let ly = (p.radix_y() as f64).log2();
        let head = self.head.len() as f64 * ly;
        match self.kick {
            Some(k) => head.max((k.position as f64) * ly.max(lx)),
            None => head,
        }
    }

    /// Exact value; fails when a coordinate would exceed
    /// [`MATERIALIZE_BITS`].
    pub fn materialize(&self, p: &MatrixParams) -> Result<LatticeVec> {
        if self.bit_estimate(p) > MATERIALIZE_BITS {
            return Err(Error::InvalidArgument(format!(
                "point with a digit at position {} is too large to materialize",
                self.len()
            )));
        }
        Ok(self.low_value(u64::MAX, p))
    }

    /// Rigorous bounds on `log2 |λ|` (Euclidean norm). `None` for the origin.
    pub fn log2_norm_bounds(&self, p: &MatrixParams) -> Option<(f64, f64)> {
        if self.is_zero() {
            return None;
        }
        let head_small = self.head.len() as f64 * (p.radix_y() as f64).log2() <= 4000.0;
        match self.kick {
            Some(k) if (k.position as f64) * (p.radix_x() as f64).log2() > 4200.0 && head_small => {
                // |λ - K| <= |H| with K the kick term, both bounded in log form.
                let h = self.head_value(p);
                let h_bits = log2_abs_upper(&h.x).max(log2_abs_upper(&h.y)) + 0.5;
                let e = (k.position - 1) as f64;
                let comp = |r: i64, d: i64| -> f64 {
                    if d == 0 {
                        f64::NEG_INFINITY
                    } else {
                        e * (r as f64).log2() + (d.unsigned_abs() as f64).log2()
                    }
                };
                let cx = comp(p.radix_x(), k.digit.x);
                let cy = comp(p.radix_y(), k.digit.y);
                let big = cx.max(cy);
                let small = cx.min(cy);
                // slack for rounding in e·log2(r)
                let slack = 1e-9 * big.abs() + 1e-9;
                let lo = big - slack;
                let hi = big + 0.5 * (1.0 + (2.0f64).powf((small - big).min(0.0) * 2.0)).log2() + slack;
                // subtract / add the head contribution
                let rel = (2.0f64).powf(h_bits - lo);
                let lo = lo + (1.0 - rel).max(f64::MIN_POSITIVE).log2();
                let hi = hi + (1.0 + rel).log2();
                Some((lo, hi))
            }
            _ => {
                let v = self.materialize(p).ok()?;
                let n2 = &v.x * &v.x + &v.y * &v.y;
                let l = log2_big(&n2) / 2.0;
                Some((l - 1e-12 * l.abs() - 1e-12, l + 1e-12 * l.abs() + 1e-12))
            }
        }
    }

    /// Exact comparison of `|self|` with `b · |other|` for `b = num / 2^shift`
    /// (any finite nonnegative `f64` has this form). `None` if undecidable
    /// without materializing coordinates too large to build.
    pub fn cmp_scaled_norm(&self, other: &AdicPoint, b: f64, p: &MatrixParams) -> Option<Ordering> {
        let exact = |pt: &AdicPoint| -> Option<BigInt> {
            if pt.bit_estimate(p) > 1.0e6 {
                return None;
            }
            let v = pt.materialize(p).ok()?;
            Some(&v.x * &v.x + &v.y * &v.y)
        };
        if let (Some(a), Some(c)) = (exact(self), exact(other)) {
            let (m, e) = f64_to_dyadic(b)?;
            // |a|^2 vs m^2 2^(2e) |c|^2
            let rhs = &c * &m * &m;
            return Some(if e >= 0 {
                a.cmp(&(rhs << (2 * e as usize)))
            } else {
                (a << (2 * (-e) as usize)).cmp(&rhs)
            });
        }
        let lb = b.log2();
        match (self.log2_norm_bounds(p), other.log2_norm_bounds(p)) {
            (None, None) => Some(Ordering::Equal),
            (None, Some(_)) => Some(Ordering::Less),
            (Some(_), None) => Some(Ordering::Greater),
            (Some((alo, ahi)), Some((clo, chi))) => {
                if alo > chi + lb {
                    Some(Ordering::Greater)
                } else if ahi < clo + lb {
                    Some(Ordering::Less)
                } else {
                    None
                }
            }
        }
    }

    /// Nonzero x-digits as `(position, digit)`: equal keys iff equal
    /// x-coordinates.
    pub fn x_key(&self) -> Vec<(u64, i64)> {
        self.component_key(|d| d.x)
    }

    /// Nonzero y-digits as `(position, digit)`.
    pub fn y_key(&self) -> Vec<(u64, i64)> {
        self.component_key(|d| d.y)
    }

    fn component_key(&self, f: impl Fn(&Digit) -> i64) -> Vec<(u64, i64)> {
        let mut key: Vec<(u64, i64)> = self
            .head
            .iter()
            .enumerate()
            .filter(|(_, d)| f(d) != 0)
            .map(|(i, d)| (i as u64 + 1, f(d)))
            .collect();
        if let Some(k) = self.kick {
            if f(&k.digit) != 0 {
                key.push((k.position, f(&k.digit)));
            }
        }
        key
    }

    /// All nonzero digits in increasing position order.
    pub fn digits(&self) -> impl Iterator<Item = (u64, Digit)> + '_ {
        self.head
            .iter()
            .enumerate()
            .map(|(i, d)| (i as u64 + 1, *d))
            .chain(self.kick.map(|k| (k.position, k.digit)))
    }
}

impl fmt::Display for AdicPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, d) in self.head.iter().enumerate() {
            if i > 0 {
                write!(f, " ")?;
            }
            write!(f, "{d}")?;
        }
        if let Some(k) = self.kick {
            write!(f, " ..@{} {}", k.position, k.digit)?;
        }
        write!(f, "]")
    }
}

fn log2_big(v: &BigInt) -> f64 {
    if v.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = v.bits();
    if bits <= 1000 {
        return v.abs().to_f64().unwrap_or(f64::INFINITY).log2();
    }
    let shift = bits - 64;
    let top: BigInt = v.abs() >> shift as usize;
    top.to_f64().unwrap_or(f64::INFINITY).log2() + shift as f64
}

fn log2_abs_upper(v: &BigInt) -> f64 {
    if v.is_zero() {
        f64::NEG_INFINITY
    } else {
        v.bits() as f64
    }
}

/// Splits a finite nonnegative `f64` into `m · 2^e` exactly.
pub(crate) fn f64_to_dyadic(b: f64) -> Option<(BigInt, i64)> {
    if !b.is_finite() || b < 0.0 {
        return None;
    }
    if b == 0.0 {
        return Some((BigInt::zero(), 0));
    }
    let bits = b.to_bits();
    let exp = ((bits >> 52) & 0x7ff) as i64;
    let frac = bits & ((1u64 << 52) - 1);
    let (m, e) = if exp == 0 {
        (frac, -1074)
    } else {
        (frac | (1u64 << 52), exp - 1075)
    };
    Some((BigInt::from(m), e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p11() -> MatrixParams {
        MatrixParams::new(1, 1).unwrap()
    }

    #[test]
    fn from_digits_splits_isolated_top_digit() {
        let d = Digit::new(1, -1);
        let pt = AdicPoint::from_digits(vec![d, Digit::ZERO, Digit::ZERO, d, Digit::ZERO]);
        assert_eq!(pt.head(), &[d]);
        assert_eq!(pt.kick(), Some(Kick { position: 4, digit: d }));
        let dense = AdicPoint::from_digits(vec![d, d]);
        assert_eq!(dense.kick(), None);
    }

    #[test]
    fn materialize_round_trip() {
        let p = MatrixParams::new(1, 2).unwrap();
        let v = LatticeVec::new(-1234567, 987654);
        let pt = AdicPoint::from_lattice(&v, &p);
        assert_eq!(pt.materialize(&p).unwrap(), v);
    }

    #[test]
    fn first_difference_across_kicks() {
        let d = Digit::new(1, -1);
        let a = AdicPoint::new(vec![d], Some(Kick { position: 10, digit: d })).unwrap();
        let b = AdicPoint::new(vec![d], Some(Kick { position: 12, digit: d })).unwrap();
        assert_eq!(a.first_difference(&b), Some((10, d, Digit::ZERO)));
        assert_eq!(a.first_difference(&a.clone()), None);
        let c = AdicPoint::new(vec![d, Digit::ZERO, d], None).unwrap();
        assert_eq!(c.first_difference(&AdicPoint::new(vec![d], None).unwrap()), Some((3, d, Digit::ZERO)));
    }

    #[test]
    fn first_difference_matches_materialized_difference() {
        let p = p11();
        let pts: Vec<AdicPoint> = (-40i64..40)
            .map(|x| AdicPoint::from_lattice(&LatticeVec::new(x, 3 * x - 7), &p))
            .collect();
        for a in &pts {
            for b in &pts {
                let diff = &a.materialize(&p).unwrap() - &b.materialize(&p).unwrap();
                let expect = a_adic_expansion(&diff, &p);
                match a.first_difference(b) {
                    None => assert!(diff.is_zero()),
                    Some((s, da, db)) => {
                        // the difference's first nonzero digit sits at s
                        let first = expect.iter().position(|d| !d.is_zero()).unwrap() as u64 + 1;
                        assert_eq!(first, s);
                        assert_ne!(da, db);
                    }
                }
            }
        }
    }

    #[test]
    fn scaled_norm_comparison() {
        let p = MatrixParams::new(4, 4).unwrap();
        let d = Digit::new(1, -1);
        let small = AdicPoint::new(vec![Digit::new(4, -4)], Some(Kick { position: 2, digit: d })).unwrap();
        let huge = AdicPoint::new(vec![d], Some(Kick { position: 100_000, digit: d })).unwrap();
        assert_eq!(huge.cmp_scaled_norm(&small, 36.0, &p), Some(Ordering::Greater));
        assert_eq!(small.cmp_scaled_norm(&huge, 36.0, &p), Some(Ordering::Less));
        // |(16,-16)| = 16√2 ≈ 22.63
        let unit = AdicPoint::new(vec![Digit::new(1, 0)], None).unwrap();
        assert_eq!(small.cmp_scaled_norm(&unit, 22.5, &p), Some(Ordering::Greater));
        assert_eq!(small.cmp_scaled_norm(&unit, 22.75, &p), Some(Ordering::Less));
    }

    #[test]
    fn dyadic_split_is_exact() {
        for b in [36.0, 0.1, 22.627416997969522, 1e-310] {
            let (m, e) = f64_to_dyadic(b).unwrap();
            let back = m.to_f64().unwrap() * (2.0f64).powi(e as i32);
            if b > 1e-300 {
                assert_eq!(back, b);
            }
        }
    }
}
