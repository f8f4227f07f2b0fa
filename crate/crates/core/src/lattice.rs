//! Exact lattice arithmetic for `A = diag(3q1, 3q2)`.
//!
//! Everything here is integer arithmetic. Coordinates of lattice vectors are
//! arbitrary precision; digits (elements of the residue system `Γ`) are small
//! and stored inline.
//!
//! Digit sequences are little-endian: entry `i` carries the coefficient of
//! `A^i` (position `i + 1`), and the empty sequence represents zero.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

/// The pair `(q1, q2)` defining the expanding matrix `A = diag(3q1, 3q2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MatrixParams {
    q1: u32,
    q2: u32,
}

impl MatrixParams {
    /// Largest accepted `q` value. Keeps every digit and every `A`-power used
    /// in the fast paths well inside `i64`.
    pub const MAX_Q: u32 = 1 << 20;

    pub fn new(q1: u32, q2: u32) -> Result<Self> {
        if q1 == 0 || q1 > q2 || q2 > Self::MAX_Q {
            return Err(Error::InvalidParams { q1, q2 });
        }
        Ok(Self { q1, q2 })
    }

    pub fn q1(&self) -> u32 {
        self.q1
    }

    pub fn q2(&self) -> u32 {
        self.q2
    }

    /// Diagonal entry `3q1`.
    pub fn radix_x(&self) -> i64 {
        3 * self.q1 as i64
    }

    /// Diagonal entry `3q2`.
    pub fn radix_y(&self) -> i64 {
        3 * self.q2 as i64
    }

    /// `(q1, -q2)`, the generator of the coset system `C`.
    pub fn step(&self) -> Digit {
        Digit::new(self.q1 as i64, -(self.q2 as i64))
    }

    /// Multiplies a lattice vector by `A`.
    pub fn apply(&self, v: &LatticeVec) -> LatticeVec {
        LatticeVec {
            x: &v.x * self.radix_x(),
            y: &v.y * self.radix_y(),
        }
    }

    /// `A^e` applied to a digit, exactly.
    pub fn apply_power(&self, d: Digit, e: u64) -> LatticeVec {
        let e = usize::try_from(e).expect("exponent exceeds address space");
        LatticeVec {
            x: num_traits::pow(BigInt::from(self.radix_x()), e) * d.x,
            y: num_traits::pow(BigInt::from(self.radix_y()), e) * d.y,
        }
    }
}

impl fmt::Display for MatrixParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(q1={}, q2={})", self.q1, self.q2)
    }
}

// ---------------------------------------------------------------------------
// Digits and lattice vectors
// ---------------------------------------------------------------------------

/// A small integer 2-vector: a digit of an `A`-adic expansion, an element of
/// one of the digit sets, or a kick digit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
pub struct Digit {
    pub x: i64,
    pub y: i64,
}

impl Digit {
    pub const ZERO: Digit = Digit { x: 0, y: 0 };

    pub const fn new(x: i64, y: i64) -> Self {
        Self { x, y }
    }

    pub fn is_zero(&self) -> bool {
        self.x == 0 && self.y == 0
    }

    pub fn to_lattice(self) -> LatticeVec {
        LatticeVec::new(self.x, self.y)
    }
}

impl fmt::Display for Digit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl Add for Digit {
    type Output = Digit;
    fn add(self, o: Digit) -> Digit {
        Digit::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Digit {
    type Output = Digit;
    fn sub(self, o: Digit) -> Digit {
        Digit::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Digit {
    type Output = Digit;
    fn neg(self) -> Digit {
        Digit::new(-self.x, -self.y)
    }
}

impl Mul<Digit> for i64 {
    type Output = Digit;
    fn mul(self, d: Digit) -> Digit {
        Digit::new(self * d.x, self * d.y)
    }
}

/// An exact integer 2-vector with arbitrary-precision coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct LatticeVec {
    pub x: BigInt,
    pub y: BigInt,
}

impl LatticeVec {
    pub fn new(x: impl Into<BigInt>, y: impl Into<BigInt>) -> Self {
        Self {
            x: x.into(),
            y: y.into(),
        }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.x.is_zero() && self.y.is_zero()
    }

    /// Converts to a [`Digit`] when both coordinates fit in `i64`.
    pub fn to_digit(&self) -> Option<Digit> {
        Some(Digit::new(self.x.to_i64()?, self.y.to_i64()?))
    }

    /// Lossy conversion for plotting and approximate geometry.
    pub fn to_f64(&self) -> [f64; 2] {
        [
            self.x.to_f64().unwrap_or(f64::NAN),
            self.y.to_f64().unwrap_or(f64::NAN),
        ]
    }
}

impl fmt::Display for LatticeVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.x, self.y)
    }
}

impl<'a> Add<&'a LatticeVec> for &'a LatticeVec {
    type Output = LatticeVec;
    fn add(self, o: &LatticeVec) -> LatticeVec {
        LatticeVec {
            x: &self.x + &o.x,
            y: &self.y + &o.y,
        }
    }
}

impl<'a> Sub<&'a LatticeVec> for &'a LatticeVec {
    type Output = LatticeVec;
    fn sub(self, o: &LatticeVec) -> LatticeVec {
        LatticeVec {
            x: &self.x - &o.x,
            y: &self.y - &o.y,
        }
    }
}

impl Neg for LatticeVec {
    type Output = LatticeVec;
    fn neg(self) -> LatticeVec {
        LatticeVec {
            x: -self.x,
            y: -self.y,
        }
    }
}

impl From<Digit> for LatticeVec {
    fn from(d: Digit) -> Self {
        d.to_lattice()
    }
}

// ---------------------------------------------------------------------------
// Signed radix expansions
// ---------------------------------------------------------------------------

/// Inclusive digit range `[-⌊b/2⌋, b - 1 - ⌊b/2⌋]` for radix `b`.
pub fn digit_range(b: i64) -> (i64, i64) {
    let half = b / 2;
    (-half, b - 1 - half)
}

/// The representative of `k mod b` inside [`digit_range`].
pub fn signed_residue(k: i64, b: i64) -> i64 {
    let r = k.rem_euclid(b);
    if r > b - 1 - b / 2 {
        r - b
    } else {
        r
    }
}

fn signed_residue_big(k: &BigInt, b: i64) -> i64 {
    let r = k.mod_floor(&BigInt::from(b)).to_i64().expect("residue fits");
    if r > b - 1 - b / 2 {
        r - b
    } else {
        r
    }
}

/// Largest `c` with `b^c < 2^62`.
fn chunk_len(b: i64) -> u32 {
    let mut c = 0;
    let mut acc: i64 = 1;
    while let Some(next) = acc.checked_mul(b) {
        if next >= 1 << 62 {
            break;
        }
        acc = next;
        c += 1;
    }
    c
}

/// Unique signed base-`b` expansion of `k`: digits `d_n` in [`digit_range`]
/// with `Σ b^(n-1) d_n = k`, little-endian, no trailing zeros.
pub fn signed_expansion(k: &BigInt, b: u64) -> Result<Vec<i64>> {
    if b < 3 || b > i64::MAX as u64 / 4 {
        return Err(Error::InvalidRadix(b));
    }
    Ok(signed_expansion_unchecked(k, b as i64))
}

fn signed_expansion_unchecked(k: &BigInt, b: i64) -> Vec<i64> {
    if k.bits() > SPARSE_BITS {
        if let Some(digits) = sparse_expansion(k, b) {
            return digits;
        }
    }
    let mut digits = Vec::new();
    if let Some(mut v) = k.to_i64().filter(|v| v.unsigned_abs() < 1 << 62) {
        while v != 0 {
            let d = signed_residue(v, b);
            digits.push(d);
            v = (v - d) / b;
        }
        return digits;
    }
    // Peel off chunks of digits per big division; the divisor is a single
    // machine word so each division is linear in the size of `k`.
    let c = chunk_len(b);
    let block = BigInt::from(b.pow(c));
    let mut rest = k.clone();
    while !rest.is_zero() {
        let (q, r) = rest.div_mod_floor(&block);
        let mut r = r.to_i64().expect("chunk fits");
        for _ in 0..c {
            let d = signed_residue(r, b);
            digits.push(d);
            r = (r - d) / b;
        }
        rest = q + r;
    }
    while digits.last() == Some(&0) {
        digits.pop();
    }
    digits
}

const SPARSE_BITS: u64 = 4096;

/// Expansion of `k = q·b^e + r` when both `q` and `r` are small compared with
/// `k`, as for points carrying a single far digit. One division with a
/// one-word quotient splits `k`; the digits of `r` and `q` are then
/// concatenated, which is the expansion by uniqueness.
fn sparse_expansion(k: &BigInt, b: i64) -> Option<Vec<i64>> {
    let lb = (b as f64).log2();
    let e = (((k.bits() - 1) as f64 / lb).floor() as u64).saturating_sub(2);
    let pe = num_traits::pow(BigInt::from(b), usize::try_from(e).ok()?);
    let (q, r) = k.div_mod_floor(&pe);
    let alt = &r - &pe;
    let (q, r) = if alt.bits() < r.bits() { (q + 1, alt) } else { (q, r) };
    if r.bits() as f64 > e as f64 * lb / 2.0 {
        return None;
    }
    let mut digits = signed_expansion_unchecked(&r, b);
    if digits.len() > e as usize {
        return None;
    }
    digits.resize(e as usize, 0);
    digits.extend(signed_expansion_unchecked(&q, b));
    while digits.last() == Some(&0) {
        digits.pop();
    }
    Some(digits)
}

/// Inverse of [`signed_expansion`] (accepts any integer digits).
pub fn reconstruct_signed(digits: &[i64], b: u64) -> BigInt {
    let b = BigInt::from(b);
    digits
        .iter()
        .rev()
        .fold(BigInt::zero(), |acc, &d| acc * &b + d)
}

// ---------------------------------------------------------------------------
// A-adic expansions
// ---------------------------------------------------------------------------

/// Whether `d` lies in `Γ = A[-1/2, 1/2)² ∩ Z²`.
pub fn in_gamma(d: Digit, p: &MatrixParams) -> bool {
    let (lx, hx) = digit_range(p.radix_x());
    let (ly, hy) = digit_range(p.radix_y());
    (lx..=hx).contains(&d.x) && (ly..=hy).contains(&d.y)
}

/// Unique `A`-adic expansion `w = Σ A^(k-1) c_k` with `c_k ∈ Γ`.
///
/// The x- and y-components are the signed expansions of `w.x` and `w.y` in
/// radices `3q1` and `3q2`, padded with zeros to a common length.
pub fn a_adic_expansion(w: &LatticeVec, p: &MatrixParams) -> Vec<Digit> {
    let xs = signed_expansion_unchecked(&w.x, p.radix_x());
    let ys = signed_expansion_unchecked(&w.y, p.radix_y());
    let len = xs.len().max(ys.len());
    (0..len)
        .map(|i| {
            Digit::new(
                xs.get(i).copied().unwrap_or(0),
                ys.get(i).copied().unwrap_or(0),
            )
        })
        .collect()
}

/// `Σ A^(k-1) c_k` for a digit sequence with every digit in `Γ`.
pub fn reconstruct(digits: &[Digit], p: &MatrixParams) -> Result<LatticeVec> {
    if let Some((index, &digit)) = digits.iter().enumerate().find(|(_, d)| !in_gamma(**d, p)) {
        return Err(Error::DigitOutOfRange { index, digit });
    }
    Ok(horner(digits.iter().map(|d| (d.x, d.y)), p))
}

pub(crate) fn horner(
    digits: impl DoubleEndedIterator<Item = (i64, i64)>,
    p: &MatrixParams,
) -> LatticeVec {
    let (bx, by) = (BigInt::from(p.radix_x()), BigInt::from(p.radix_y()));
    let mut acc = LatticeVec::zero();
    for (dx, dy) in digits.rev() {
        acc.x = acc.x * &bx + dx;
        acc.y = acc.y * &by + dy;
    }
    acc
}

/// Canonical representative of `v mod AZ²` in `Γ`.
pub fn mod_a_reduce(v: &LatticeVec, p: &MatrixParams) -> Digit {
    Digit::new(
        signed_residue_big(&v.x, p.radix_x()),
        signed_residue_big(&v.y, p.radix_y()),
    )
}

/// [`mod_a_reduce`] for a small vector.
pub fn reduce_digit(d: Digit, p: &MatrixParams) -> Digit {
    Digit::new(signed_residue(d.x, p.radix_x()), signed_residue(d.y, p.radix_y()))
}

/// Whether `A` divides `v`, i.e. `v ∈ AZ²`.
pub fn divisible_by_a(v: &LatticeVec, p: &MatrixParams) -> bool {
    v.x.is_multiple_of(&BigInt::from(p.radix_x())) && v.y.is_multiple_of(&BigInt::from(p.radix_y()))
}

/// Magnitude of the largest coordinate, as `f64` (may be infinite).
pub fn max_abs_f64(v: &LatticeVec) -> f64 {
    let ax = v.x.abs().to_f64().unwrap_or(f64::INFINITY);
    let ay = v.y.abs().to_f64().unwrap_or(f64::INFINITY);
    ax.max(ay)
}

// ---------------------------------------------------------------------------
// Digit sets
// ---------------------------------------------------------------------------

/// The residue system `Γ`, its coset generator `C`, the coset-leader sets
/// `E_q1`, `E_q2`, and the canonical spectrum digit set `L`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DigitSetCatalog {
    pub gamma: Vec<Digit>,
    pub c_set: [Digit; 3],
    pub e_q1: Vec<Digit>,
    pub e_q2: Vec<Digit>,
    pub l_set: [Digit; 3],
}

/// `C = L = {(0,0), (q1,-q2), (-q1,q2)}`.
pub fn c_set(p: &MatrixParams) -> [Digit; 3] {
    let s = p.step();
    [Digit::ZERO, s, -s]
}

/// Integers `a` with `-q/2 <= a < q/2`.
fn half_open_centered(q: i64) -> std::ops::RangeInclusive<i64> {
    // -q/2 <= a  <=>  a >= ceil(-q/2) = -(q/2) (integer division floors toward zero)
    let lo = -(q / 2);
    // a < q/2  <=>  a <= ceil(q/2) - 1
    let hi = (q + 1) / 2 - 1;
    lo..=hi
}

/// Whether `d ∈ E_q1`.
pub fn in_e_q1(d: Digit, p: &MatrixParams) -> bool {
    in_gamma(d, p) && half_open_centered(p.q1() as i64).contains(&d.x)
}

/// Whether `d ∈ E_q2`.
pub fn in_e_q2(d: Digit, p: &MatrixParams) -> bool {
    in_gamma(d, p) && half_open_centered(p.q2() as i64).contains(&d.y)
}

pub fn enumerate_digit_sets(p: &MatrixParams) -> DigitSetCatalog {
    let (lx, hx) = digit_range(p.radix_x());
    let (ly, hy) = digit_range(p.radix_y());
    let gamma: Vec<Digit> = (lx..=hx)
        .flat_map(|x| (ly..=hy).map(move |y| Digit::new(x, y)))
        .collect();
    let e_q1 = gamma.iter().copied().filter(|d| in_e_q1(*d, p)).collect();
    let e_q2 = gamma.iter().copied().filter(|d| in_e_q2(*d, p)).collect();
    DigitSetCatalog {
        gamma,
        c_set: c_set(p),
        e_q1,
        e_q2,
        l_set: c_set(p),
    }
}

/// Which coset-leader set a decomposition uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LeaderSet {
    Eq1,
    Eq2,
}

/// Outcome of checking `Γ = ⊔_{a ∈ E} (a + C mod A)` for one leader set.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DecompositionCheck {
    pub leaders: LeaderSet,
    pub cosets: usize,
    pub coset_size: usize,
    /// `(leader, other leader, shared residue)` for every overlap found.
    pub collisions: Vec<(Digit, Digit, Digit)>,
    /// Residues of `Γ` covered by no coset.
    pub omissions: Vec<Digit>,
}

impl DecompositionCheck {
    pub fn passed(&self) -> bool {
        self.collisions.is_empty() && self.omissions.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResidueReport {
    pub params: MatrixParams,
    pub by_eq1: DecompositionCheck,
    pub by_eq2: DecompositionCheck,
}

impl ResidueReport {
    pub fn passed(&self) -> bool {
        self.by_eq1.passed() && self.by_eq2.passed()
    }
}

/// Exhaustively checks both coset decompositions of `Γ`.
pub fn verify_residue_decomposition(p: &MatrixParams) -> ResidueReport {
    let cat = enumerate_digit_sets(p);
    let check = |leaders: &[Digit], which: LeaderSet| {
        let mut owner: std::collections::HashMap<Digit, Digit> = std::collections::HashMap::new();
        let mut collisions = Vec::new();
        for &a in leaders {
            let mut seen = Vec::with_capacity(3);
            for c in cat.c_set {
                let r = reduce_digit(a + c, p);
                if seen.contains(&r) {
                    collisions.push((a, a, r));
                    continue;
                }
                seen.push(r);
                if let Some(&prev) = owner.get(&r) {
                    collisions.push((prev, a, r));
                } else {
                    owner.insert(r, a);
                }
            }
        }
        let omissions = cat
            .gamma
            .iter()
            .copied()
            .filter(|g| !owner.contains_key(g))
            .collect();
        DecompositionCheck {
            leaders: which,
            cosets: leaders.len(),
            coset_size: cat.c_set.len(),
            collisions,
            omissions,
        }
    };
    ResidueReport {
        params: *p,
        by_eq1: check(&cat.e_q1, LeaderSet::Eq1),
        by_eq2: check(&cat.e_q2, LeaderSet::Eq2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn params(q1: u32, q2: u32) -> MatrixParams {
        MatrixParams::new(q1, q2).unwrap()
    }

    #[test]
    fn rejects_bad_params() {
        assert!(MatrixParams::new(0, 1).is_err());
        assert!(MatrixParams::new(3, 2).is_err());
        assert!(MatrixParams::new(2, 2).is_ok());
    }

    #[test]
    fn signed_expansion_examples() {
        assert!(signed_expansion(&big(0), 3).unwrap().is_empty());
        assert_eq!(signed_expansion(&big(2), 3).unwrap(), vec![-1, 1]);
        assert_eq!(signed_expansion(&big(-5), 4).unwrap(), vec![-1, -1]);
        assert_eq!(signed_expansion(&big(1), 1), Err(Error::InvalidRadix(1)));
        assert_eq!(signed_expansion(&big(1), 2), Err(Error::InvalidRadix(2)));
    }

    #[test]
    fn even_radix_uses_half_open_range() {
        assert_eq!(digit_range(4), (-2, 1));
        assert_eq!(digit_range(6), (-3, 2));
        assert_eq!(digit_range(3), (-1, 1));
        // 2 is not a digit in radix 4: 2 = -2 + 4·1
        assert_eq!(signed_expansion(&big(2), 4).unwrap(), vec![-2, 1]);
    }

    #[test]
    fn chunked_path_matches_word_path() {
        let b = 12i64;
        let k = num_traits::pow(big(b), 40) * 7 - big(123_456_789);
        let digits = signed_expansion(&k, b as u64).unwrap();
        assert_eq!(reconstruct_signed(&digits, b as u64), k);
        let (lo, hi) = digit_range(b);
        assert!(digits.iter().all(|d| (lo..=hi).contains(d)));
        assert_ne!(digits.last(), Some(&0));
    }

    #[test]
    fn a_adic_examples() {
        let p = params(1, 2);
        assert!(a_adic_expansion(&LatticeVec::zero(), &p).is_empty());
        assert_eq!(
            a_adic_expansion(&LatticeVec::new(4, -7), &p),
            vec![Digit::new(1, -1), Digit::new(1, -1)]
        );
    }

    #[test]
    fn reconstruct_examples() {
        let p = params(1, 2);
        assert_eq!(reconstruct(&[], &p).unwrap(), LatticeVec::zero());
        let two = [Digit::new(1, -1), Digit::new(1, -1)];
        assert_eq!(reconstruct(&two, &p).unwrap(), LatticeVec::new(4, -7));
        assert_eq!(reconstruct(&[p.step()], &p).unwrap(), LatticeVec::new(1, -2));
        let err = reconstruct(&[Digit::ZERO, Digit::new(2, 0)], &p).unwrap_err();
        assert_eq!(
            err,
            Error::DigitOutOfRange {
                index: 1,
                digit: Digit::new(2, 0)
            }
        );
    }

    #[test]
    fn digit_set_examples() {
        let p = params(1, 1);
        let cat = enumerate_digit_sets(&p);
        assert_eq!(cat.gamma.len(), 9);
        let mut e = cat.e_q1.clone();
        e.sort();
        assert_eq!(e, vec![Digit::new(0, -1), Digit::new(0, 0), Digit::new(0, 1)]);

        let cat = enumerate_digit_sets(&params(1, 2));
        assert_eq!(cat.gamma.len(), 18);
        assert_eq!(cat.e_q1.len(), 6);
        assert_eq!(cat.e_q2.len(), 6);

        let cat = enumerate_digit_sets(&params(2, 2));
        assert_eq!(
            cat.c_set,
            [Digit::new(0, 0), Digit::new(2, -2), Digit::new(-2, 2)]
        );
    }

    #[test]
    fn catalog_invariants_hold_on_a_grid() {
        for q1 in 1..=5u32 {
            for q2 in q1..=5u32 {
                let p = params(q1, q2);
                let cat = enumerate_digit_sets(&p);
                let (q1, q2) = (q1 as i64, q2 as i64);
                assert_eq!(cat.gamma.len() as i64, 9 * q1 * q2);
                assert_eq!(cat.e_q1.len() as i64, 3 * q1 * q2);
                assert_eq!(cat.e_q2.len() as i64, 3 * q1 * q2);
                for g in &cat.gamma {
                    // -3q/2 <= g < 3q/2, checked in doubled units
                    assert!(-3 * q1 <= 2 * g.x && 2 * g.x < 3 * q1);
                    assert!(-3 * q2 <= 2 * g.y && 2 * g.y < 3 * q2);
                }
            }
        }
    }

    #[test]
    fn residue_decomposition_examples() {
        let r = verify_residue_decomposition(&params(1, 1));
        assert!(r.passed());
        assert_eq!((r.by_eq1.cosets, r.by_eq1.coset_size), (3, 3));
        let r = verify_residue_decomposition(&params(1, 2));
        assert!(r.passed());
        assert_eq!(r.by_eq1.cosets, 6);
        assert!(verify_residue_decomposition(&params(4, 4)).passed());
    }

    #[test]
    fn mod_a_examples() {
        let p = params(1, 1);
        assert_eq!(mod_a_reduce(&LatticeVec::zero(), &p), Digit::ZERO);
        assert_eq!(mod_a_reduce(&LatticeVec::new(3, 3), &p), Digit::ZERO);
        assert_eq!(mod_a_reduce(&LatticeVec::new(2, -2), &p), Digit::new(-1, 1));
        let p = params(2, 5);
        assert_eq!(mod_a_reduce(&LatticeVec::new(6, 15), &p), Digit::ZERO);
    }

    #[test]
    fn apply_power_matches_repeated_apply() {
        let p = params(2, 3);
        let d = Digit::new(1, -2);
        let mut v = d.to_lattice();
        for _ in 0..5 {
            v = p.apply(&v);
        }
        assert_eq!(p.apply_power(d, 5), v);
    }

    #[test]
    fn sparse_numbers_expand_like_dense_ones() {
        for b in [3i64, 6, 12] {
            for (top, low) in [(1i64, 0i64), (-1, 5), (2, -123_456), (-3, 1)] {
                let k = BigInt::from(top) * num_traits::pow(BigInt::from(b), 9000) + low;
                let fast = signed_expansion(&k, b as u64).unwrap();
                assert_eq!(reconstruct_signed(&fast, b as u64), k);
                let (lo, hi) = digit_range(b);
                assert!(fast.iter().all(|d| (lo..=hi).contains(d)));
            }
        }
        // dense big numbers take the general path
        let k = (num_traits::pow(BigInt::from(7), 6000) - 1) / 2;
        assert_eq!(reconstruct_signed(&signed_expansion(&k, 12).unwrap(), 12), k);
    }
}