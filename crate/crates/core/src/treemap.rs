//! Tree mappings `τ: Θ₃* → Γ`, the index/word codec, and spectrum
//! enumeration.
//!
//! A node of the ternary tree is a word over `{-1, 0, 1}`. The digit that a
//! mapping assigns to a node depends only on the node's parent `P = I·0^z`
//! (with `I` trimmed of trailing zeros) and on the last letter, so evaluation
//! goes through [`tau_at`] with the parent's index `k_I` and zero count `z`.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::adic::{AdicPoint, Kick};
use crate::error::{Error, Result};
use crate::lattice::{in_e_q1, reduce_digit, Digit, LatticeVec, MatrixParams};
use crate::pattern::PatternSpec;

/// Longest word with an `i64` index.
pub const MAX_WORD_LEN: usize = 39;

/// Largest number of points [`enumerate_spectrum`] will build.
pub const MAX_POINTS: u128 = 10_000_000;

// ---------------------------------------------------------------------------
// Words
// ---------------------------------------------------------------------------

/// A finite word over `Θ₃ = {-1, 0, 1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize)]
pub struct Word(Vec<i8>);

impl Word {
    pub fn new(letters: Vec<i8>) -> Result<Self> {
        if let Some(&bad) = letters.iter().find(|&&c| !(-1..=1).contains(&c)) {
            return Err(Error::InvalidLetter(bad as i64));
        }
        Ok(Word(letters))
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letters(&self) -> &[i8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Empty, or ending in a nonzero letter.
    pub fn is_index_word(&self) -> bool {
        self.0.last().is_none_or(|&c| c != 0)
    }

    pub fn trimmed(&self) -> Word {
        let end = self.0.iter().rposition(|&c| c != 0).map_or(0, |i| i + 1);
        Word(self.0[..end].to_vec())
    }

    pub fn child(&self, letter: i8) -> Word {
        let mut v = self.0.clone();
        v.push(letter);
        Word(v)
    }

    /// Parses the `-`, `0`, `+` encoding used by [`fmt::Display`].
    pub fn parse(s: &str) -> Result<Self> {
        s.chars()
            .map(|c| match c {
                '-' => Ok(-1),
                '0' => Ok(0),
                '+' => Ok(1),
                _ => Err(Error::InvalidArgument(format!("bad letter {c:?} in word {s:?}"))),
            })
            .collect::<Result<Vec<i8>>>()
            .map(Word)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &c in &self.0 {
            let ch = match c {
                -1 => '-',
                0 => '0',
                _ => '+',
            };
            write!(f, "{ch}")?;
        }
        Ok(())
    }
}

/// Balanced ternary digits of `k`, least significant first.
pub fn index_to_word(k: i64) -> Word {
    let mut letters = Vec::new();
    let mut v = k as i128;
    while v != 0 {
        let r = v.rem_euclid(3) as i8;
        let c = if r == 2 { -1 } else { r };
        letters.push(c);
        v = (v - c as i128) / 3;
    }
    Word(letters)
}

/// `Σ i_j 3^(j-1)`; the word must end in a nonzero letter.
pub fn word_to_index(w: &Word) -> Result<i64> {
    if !w.is_index_word() {
        return Err(Error::TrailingZero);
    }
    if w.len() > MAX_WORD_LEN {
        return Err(Error::WordTooLong(w.len()));
    }
    Ok(w.0.iter().rev().fold(0i64, |acc, &c| acc * 3 + c as i64))
}

/// `α_n = (3^n - 1) / 2`: words of length at most `n` are exactly the
/// indices with `|k| ≤ α_n`.
pub fn alpha(n: u32) -> Result<i64> {
    if n as usize > MAX_WORD_LEN {
        return Err(Error::WordTooLong(n as usize));
    }
    Ok((3i64.pow(n) - 1) / 2)
}

// ---------------------------------------------------------------------------
// Mapping specifications
// ---------------------------------------------------------------------------

/// How the kick offsets `m_k` are assigned. `m_0 = 0` always.
#[derive(Debug, Clone)]
pub enum OffsetRule {
    Zero,
    /// Explicit offsets; missing indices have offset 0.
    Table(BTreeMap<i64, u64>),
    /// `m_k = k² + b(k)` for indices whose word is not admitted by `exempt`,
    /// `0` otherwise. The variant bit `b(k)` is 0 unless a seed is given.
    Squares {
        exempt: Option<PatternSpec>,
        variant_seed: Option<u64>,
    },
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seeded variant bit for index `k`.
pub fn variant_bit(seed: u64, k: i64) -> u64 {
    splitmix64(seed ^ splitmix64(k as u64)) & 1
}

impl OffsetRule {
    pub fn offset(&self, k: i64) -> Result<u64> {
        if k == 0 {
            return Ok(0);
        }
        match self {
            OffsetRule::Zero => Ok(0),
            OffsetRule::Table(t) => Ok(t.get(&k).copied().unwrap_or(0)),
            OffsetRule::Squares {
                exempt,
                variant_seed,
            } => {
                if let Some(pat) = exempt {
                    if pat.admits(index_to_word(k).letters()) {
                        return Ok(0);
                    }
                }
                let sq = k
                    .unsigned_abs()
                    .checked_mul(k.unsigned_abs())
                    .filter(|&s| s < u64::MAX / 2)
                    .ok_or(Error::IndexOutOfRange(k))?;
                Ok(sq + variant_seed.map_or(0, |s| variant_bit(s, k)))
            }
        }
    }
}

/// How a kick interacts with the siblings of the kicked node.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum KickMode {
    /// Every child of a kick parent is shifted by the kick, so siblings stay
    /// coherent.
    Coherent,
    /// Only the zero child carries the kick; nonzero children keep the last
    /// letter rule.
    Literal,
}

impl std::str::FromStr for KickMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "coherent" => Ok(KickMode::Coherent),
            "literal" => Ok(KickMode::Literal),
            _ => Err(Error::InvalidArgument(format!("unknown kick mode {s:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub enum TreeMappingSpec {
    /// `τ(I) = i_{|I|}·(q1, -q2)`.
    Canonical,
    /// Places `kick` at tail position `m_k` below every index word `k` with
    /// `m_k ≥ 1`.
    Kicked {
        offsets: OffsetRule,
        kick: Digit,
        mode: KickMode,
    },
}

/// `(q1/4, -q2/4)`, available when `4 | q1` and `4 | q2`.
pub fn default_kick(p: &MatrixParams) -> Result<Digit> {
    if !p.q1().is_multiple_of(4) || !p.q2().is_multiple_of(4) {
        return Err(Error::InadmissibleKick {
            kick: Digit::ZERO,
            reason: format!(
                "the default kick (q1/4, -q2/4) is not integral for {p}; it needs 4 | q1 and 4 | q2"
            ),
        });
    }
    Ok(Digit::new(p.q1() as i64 / 4, -(p.q2() as i64) / 4))
}

/// Accepts any nonzero element of `E_q1`.
pub fn check_kick(kick: Digit, p: &MatrixParams) -> Result<()> {
    if kick.is_zero() {
        return Err(Error::InadmissibleKick {
            kick,
            reason: "the kick must be nonzero".into(),
        });
    }
    if !in_e_q1(kick, p) {
        return Err(Error::InadmissibleKick {
            kick,
            reason: format!("it is not in E_q1 for {p}"),
        });
    }
    Ok(())
}

impl TreeMappingSpec {
    /// A kicked mapping; `kick = None` selects [`default_kick`].
    pub fn kicked(
        p: &MatrixParams,
        offsets: OffsetRule,
        kick: Option<Digit>,
        mode: KickMode,
    ) -> Result<Self> {
        let kick = match kick {
            Some(k) => k,
            None => default_kick(p)?,
        };
        check_kick(kick, p)?;
        Ok(TreeMappingSpec::Kicked {
            offsets,
            kick,
            mode,
        })
    }

    /// `m_k` (always 0 for the canonical mapping).
    pub fn offset(&self, k: i64) -> Result<u64> {
        match self {
            TreeMappingSpec::Canonical => Ok(0),
            TreeMappingSpec::Kicked { offsets, .. } => offsets.offset(k),
        }
    }
}

/// Digit of the child `P·letter` where `P = I·0^zeros` and `k_I` is
/// `parent_index`.
pub fn tau_at(
    spec: &TreeMappingSpec,
    p: &MatrixParams,
    parent_index: i64,
    zeros: u64,
    letter: i8,
) -> Result<Digit> {
    let base = letter as i64 * p.step();
    let TreeMappingSpec::Kicked {
        offsets,
        kick,
        mode,
    } = spec
    else {
        return Ok(base);
    };
    let m = offsets.offset(parent_index)?;
    let at_kick_parent = m >= 1 && zeros == m - 1;
    Ok(match (mode, at_kick_parent) {
        (_, false) => base,
        (KickMode::Coherent, true) => reduce_digit(*kick + base, p),
        (KickMode::Literal, true) if letter == 0 => *kick,
        (KickMode::Literal, true) => base,
    })
}

/// `τ(w)` for a nonempty word.
pub fn tau_eval(spec: &TreeMappingSpec, w: &Word, p: &MatrixParams) -> Result<Digit> {
    let (&letter, parent) = w
        .letters()
        .split_last()
        .ok_or_else(|| Error::InvalidArgument("τ is defined on nonempty words".into()))?;
    let parent = Word(parent.to_vec());
    let trimmed = parent.trimmed();
    let zeros = (parent.len() - trimmed.len()) as u64;
    tau_at(spec, p, word_to_index(&trimmed)?, zeros, letter)
}

// ---------------------------------------------------------------------------
// Spectrum points
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SpectrumPoint {
    pub k: i64,
    pub word: Word,
    pub point: AdicPoint,
}

impl SpectrumPoint {
    /// A point carrying only an index label (the word is left empty).
    pub fn bare(k: i64, point: AdicPoint) -> Self {
        Self {
            k,
            word: Word::empty(),
            point,
        }
    }

    /// Labels the points of an explicit lattice set with `0, 1, 2, …`.
    pub fn from_lattice_set(points: &[LatticeVec], p: &MatrixParams) -> Vec<Self> {
        points
            .iter()
            .enumerate()
            .map(|(i, v)| Self::bare(i as i64, AdicPoint::from_lattice(v, p)))
            .collect()
    }

    /// Position of the kick digit on the tail, if any.
    pub fn kick_position(&self) -> Option<u64> {
        self.point
            .kick()
            .map(|k| k.position)
            .filter(|&pos| pos > self.word.len() as u64)
    }

    pub fn lambda(&self, p: &MatrixParams) -> Result<LatticeVec> {
        self.point.materialize(p)
    }
}

/// `λ_k = Σ_{j≤n} A^(j-1) τ(w|_j) + A^(n+m_k-1) τ(w 0^(m_k))` for the word `w`
/// of `k` (length `n`).
pub fn lambda_of_index(spec: &TreeMappingSpec, p: &MatrixParams, k: i64) -> Result<SpectrumPoint> {
    let word = index_to_word(k);
    if word.len() > MAX_WORD_LEN {
        return Err(Error::WordTooLong(word.len()));
    }
    let mut head = Vec::with_capacity(word.len());
    let mut parent_index = 0i64;
    let mut trimmed_len = 0usize;
    let mut pow = 1i64;
    for (j, &c) in word.letters().iter().enumerate() {
        let zeros = (j - trimmed_len) as u64;
        head.push(tau_at(spec, p, parent_index, zeros, c)?);
        if c != 0 {
            parent_index += c as i64 * pow;
            trimmed_len = j + 1;
        }
        pow = pow.saturating_mul(3);
    }
    let m = spec.offset(k)?;
    let kick = if m >= 1 {
        let digit = tau_at(spec, p, k, m - 1, 0)?;
        let position = (word.len() as u64)
            .checked_add(m)
            .ok_or(Error::IndexOutOfRange(k))?;
        Some(Kick { position, digit })
    } else {
        None
    };
    let point = AdicPoint::new(head, kick)?;
    Ok(SpectrumPoint { k, word, point })
}

/// Extent of an enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Bound {
    /// All `k` with `|k| ≤ K`.
    Index(i64),
    /// All words of length at most `n` (`|k| ≤ α_n`).
    Level(u32),
}

impl Bound {
    pub fn max_index(&self) -> Result<i64> {
        match *self {
            Bound::Index(k) if k < 0 => Err(Error::IndexOutOfRange(k)),
            Bound::Index(k) => Ok(k),
            Bound::Level(n) => alpha(n),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SpectrumPrefix {
    pub params: MatrixParams,
    pub spec: TreeMappingSpec,
    pub bound: Bound,
    /// Ordered by `k`.
    pub points: Vec<SpectrumPoint>,
}

impl SpectrumPrefix {
    pub fn adic_points(&self) -> Vec<AdicPoint> {
        self.points.iter().map(|s| s.point.clone()).collect()
    }

    pub fn get(&self, k: i64) -> Option<&SpectrumPoint> {
        self.points
            .binary_search_by_key(&k, |s| s.k)
            .ok()
            .map(|i| &self.points[i])
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// All points within `bound`, ordered by `k`.
pub fn enumerate_spectrum(
    spec: &TreeMappingSpec,
    p: &MatrixParams,
    bound: Bound,
) -> Result<SpectrumPrefix> {
    let kmax = bound.max_index()?;
    let requested = 2 * kmax as u128 + 1;
    if requested > MAX_POINTS {
        return Err(Error::TooManyPoints {
            requested,
            limit: MAX_POINTS,
        });
    }
    let points = (-kmax..=kmax)
        .into_par_iter()
        .map(|k| lambda_of_index(spec, p, k))
        .collect::<Result<Vec<_>>>()?;
    Ok(SpectrumPrefix {
        params: *p,
        spec: spec.clone(),
        bound,
        points,
    })
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Clause {
    /// `τ(0^k i) = i(q1, -q2)` on the zero spine.
    Spine,
    /// The three children agree modulo `A` up to `j(q1,-q2)`, with a common
    /// leader in `E_q1`.
    SiblingCoherence,
    /// Every trailing-zero branch is eventually zero.
    EventuallyZero,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NodeViolation {
    /// The parent node (or, for the tail clause, the index word).
    pub node: String,
    pub clause: Clause,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub depth: u32,
    pub parents_checked: usize,
    pub violations: Vec<NodeViolation>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

fn sibling_check(
    spec: &TreeMappingSpec,
    p: &MatrixParams,
    parent_index: i64,
    zeros: u64,
    node: &dyn Fn() -> String,
    out: &mut Vec<NodeViolation>,
) -> Result<()> {
    let step = p.step();
    let mut leaders = Vec::with_capacity(3);
    for j in [-1i8, 0, 1] {
        let d = tau_at(spec, p, parent_index, zeros, j)?;
        leaders.push(reduce_digit(d - j as i64 * step, p));
    }
    let e = leaders[1];
    if leaders.iter().any(|&l| l != e) {
        out.push(NodeViolation {
            node: node(),
            clause: Clause::SiblingCoherence,
            detail: format!(
                "children leaders {}, {}, {} differ",
                leaders[0], leaders[1], leaders[2]
            ),
        });
    } else if !in_e_q1(e, p) {
        out.push(NodeViolation {
            node: node(),
            clause: Clause::SiblingCoherence,
            detail: format!("common leader {e} is not in E_q1"),
        });
    }
    Ok(())
}

/// Checks the maximal-tree-mapping clauses on every parent node of length
/// below `depth`, and symbolically at kick parents lying deeper.
pub fn validate_tree_mapping(
    spec: &TreeMappingSpec,
    p: &MatrixParams,
    depth: u32,
) -> Result<ValidationReport> {
    if depth as usize > MAX_WORD_LEN {
        return Err(Error::WordTooLong(depth as usize));
    }
    let mut violations = Vec::new();
    let mut parents_checked = 0;
    let step = p.step();
    // Every word of length < depth, trailing zeros included.
    let mut level: Vec<(Word, i64, u64)> = vec![(Word::empty(), 0, 0)];
    for len in 0..depth {
        let mut next = Vec::with_capacity(level.len() * 3);
        for (w, k_i, zeros) in &level {
            parents_checked += 1;
            if *k_i == 0 {
                for j in [-1i8, 1] {
                    let d = tau_at(spec, p, 0, *zeros, j)?;
                    if d != j as i64 * step {
                        violations.push(NodeViolation {
                            node: w.to_string(),
                            clause: Clause::Spine,
                            detail: format!("child {j} has digit {d}"),
                        });
                    }
                }
            }
            sibling_check(spec, p, *k_i, *zeros, &|| w.to_string(), &mut violations)?;
            if len + 1 < depth {
                for j in [-1i8, 0, 1] {
                    let child = w.child(j);
                    if j == 0 {
                        next.push((child, *k_i, zeros + 1));
                    } else {
                        let k = word_to_index(&child)?;
                        next.push((child, k, 0));
                    }
                }
            }
        }
        level = next;
    }
    // Tails and deep kick parents of index words within depth.
    let kmax = alpha(depth)?;
    for k in -kmax..=kmax {
        let m = spec.offset(k)?;
        let w = index_to_word(k);
        let parent_len = w.len() as u64 + m.saturating_sub(1);
        if m >= 1 && parent_len >= depth as u64 {
            let node = || format!("{w}·0^{}", m - 1);
            sibling_check(spec, p, k, m - 1, &node, &mut violations)?;
        }
        // Only offset m can be nonzero on the tail; confirm nothing else is
        // within depth.
        let mut nonzero = 0u64;
        for l in 1..=u64::from(depth) {
            if !tau_at(spec, p, k, l - 1, 0)?.is_zero() {
                nonzero += 1;
            }
        }
        if m > u64::from(depth) {
            nonzero += 1;
        }
        if nonzero > 1 {
            violations.push(NodeViolation {
                node: w.to_string(),
                clause: Clause::EventuallyZero,
                detail: format!("{nonzero} nonzero digits on the tail"),
            });
        }
    }
    Ok(ValidationReport {
        depth,
        parents_checked,
        violations,
    })
}

/// `ℓ_k`: the number of nonzero digits on the trailing-zero tail of word `k`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EllStats {
    pub per_k: Vec<(i64, u32)>,
    pub max: u32,
}

pub fn ell_stats(spec: &TreeMappingSpec, p: &MatrixParams, kmax: i64) -> Result<EllStats> {
    let mut per_k = Vec::with_capacity(2 * kmax.max(0) as usize + 1);
    for k in -kmax..=kmax {
        let m = spec.offset(k)?;
        let ell = if m >= 1 && !tau_at(spec, p, k, m - 1, 0)?.is_zero() {
            1
        } else {
            0
        };
        per_k.push((k, ell));
    }
    let max = per_k.iter().filter(|(k, _)| *k != 0).map(|&(_, l)| l).max().unwrap_or(0);
    Ok(EllStats { per_k, max })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::reconstruct;

    fn params(q1: u32, q2: u32) -> MatrixParams {
        MatrixParams::new(q1, q2).unwrap()
    }

    fn literal_m1(p: &MatrixParams, mode: KickMode) -> TreeMappingSpec {
        let table = BTreeMap::from([(1, 1)]);
        TreeMappingSpec::kicked(p, OffsetRule::Table(table), None, mode).unwrap()
    }

    #[test]
    fn codec_examples() {
        assert_eq!(index_to_word(0), Word::empty());
        assert_eq!(index_to_word(5).letters(), &[-1, -1, 1]);
        assert_eq!(index_to_word(4).letters(), &[1, 1]);
        assert_eq!(word_to_index(&Word::new(vec![-1, -1, 1]).unwrap()), Ok(5));
        assert_eq!(word_to_index(&Word::new(vec![1, 0]).unwrap()), Err(Error::TrailingZero));
        assert_eq!(Word::new(vec![2]), Err(Error::InvalidLetter(2)));
    }

    #[test]
    fn codec_round_trip() {
        for k in -100_000..=100_000 {
            assert_eq!(word_to_index(&index_to_word(k)).unwrap(), k);
        }
        let w = index_to_word(-37);
        assert_eq!(Word::parse(&w.to_string()).unwrap(), w);
    }

    #[test]
    fn tau_examples() {
        let p = params(1, 1);
        let one = Word::new(vec![1]).unwrap();
        assert_eq!(tau_eval(&TreeMappingSpec::Canonical, &one, &p).unwrap(), Digit::new(1, -1));
        let ten = Word::new(vec![1, 0]).unwrap();
        assert_eq!(tau_eval(&TreeMappingSpec::Canonical, &ten, &p).unwrap(), Digit::ZERO);

        let p = params(4, 4);
        let spec = literal_m1(&p, KickMode::Literal);
        assert_eq!(tau_eval(&spec, &ten, &p).unwrap(), Digit::new(1, -1));
    }

    #[test]
    fn lambda_examples() {
        let p = params(1, 1);
        let s = lambda_of_index(&TreeMappingSpec::Canonical, &p, 0).unwrap();
        assert!(s.point.is_zero());
        let s = lambda_of_index(&TreeMappingSpec::Canonical, &p, 4).unwrap();
        assert_eq!(s.lambda(&p).unwrap(), LatticeVec::new(4, -4));

        let p = params(4, 4);
        for mode in [KickMode::Literal, KickMode::Coherent] {
            let s = lambda_of_index(&literal_m1(&p, mode), &p, 1).unwrap();
            assert_eq!(s.lambda(&p).unwrap(), LatticeVec::new(16, -16));
            assert_eq!(s.kick_position(), Some(2));
        }
    }

    #[test]
    fn enumeration_examples() {
        let p = params(1, 1);
        let pre = enumerate_spectrum(&TreeMappingSpec::Canonical, &p, Bound::Level(1)).unwrap();
        let pts: Vec<LatticeVec> = pre.points.iter().map(|s| s.lambda(&p).unwrap()).collect();
        assert_eq!(
            pts,
            vec![LatticeVec::new(-1, 1), LatticeVec::zero(), LatticeVec::new(1, -1)]
        );

        let p = params(1, 2);
        let pre = enumerate_spectrum(&TreeMappingSpec::Canonical, &p, Bound::Level(2)).unwrap();
        let mut pts: Vec<LatticeVec> = pre.points.iter().map(|s| s.lambda(&p).unwrap()).collect();
        pts.sort();
        pts.dedup();
        assert_eq!(pts.len(), 9);

        let zero = TreeMappingSpec::kicked(&p, OffsetRule::Zero, Some(Digit::new(0, 1)), KickMode::Coherent)
            .unwrap();
        let a = enumerate_spectrum(&zero, &p, Bound::Level(2)).unwrap();
        assert_eq!(a.points, pre.points);
    }

    #[test]
    fn enumeration_guard() {
        let p = params(1, 1);
        assert!(matches!(
            enumerate_spectrum(&TreeMappingSpec::Canonical, &p, Bound::Index(6_000_000)),
            Err(Error::TooManyPoints { .. })
        ));
    }

    #[test]
    fn canonical_is_lambda_max_brute_force() {
        let p = params(1, 1);
        let l = crate::lattice::c_set(&p);
        let mut brute = Vec::new();
        for a in l {
            for b in l {
                for c in l {
                    brute.push(reconstruct(&[a, b, c], &p).unwrap());
                }
            }
        }
        brute.sort();
        let pre = enumerate_spectrum(&TreeMappingSpec::Canonical, &p, Bound::Level(3)).unwrap();
        let mut got: Vec<LatticeVec> = pre.points.iter().map(|s| s.lambda(&p).unwrap()).collect();
        got.sort();
        assert_eq!(got, brute);
    }

    #[test]
    fn validation_examples() {
        let p = params(1, 2);
        assert!(validate_tree_mapping(&TreeMappingSpec::Canonical, &p, 8).unwrap().passed());

        let p = params(4, 4);
        let squares = OffsetRule::Squares {
            exempt: None,
            variant_seed: None,
        };
        let coherent = TreeMappingSpec::kicked(&p, squares, None, KickMode::Coherent).unwrap();
        assert!(validate_tree_mapping(&coherent, &p, 8).unwrap().passed());

        let literal = literal_m1(&p, KickMode::Literal);
        let r = validate_tree_mapping(&literal, &p, 4).unwrap();
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].node, "+");
        assert_eq!(r.violations[0].clause, Clause::SiblingCoherence);
    }

    #[test]
    fn kick_admissibility() {
        let p = params(1, 2);
        assert!(matches!(default_kick(&p), Err(Error::InadmissibleKick { .. })));
        assert!(check_kick(Digit::new(0, 1), &p).is_ok());
        assert!(check_kick(Digit::new(1, 0), &p).is_err());
        assert!(check_kick(Digit::ZERO, &p).is_err());
        assert_eq!(default_kick(&params(4, 8)).unwrap(), Digit::new(1, -2));
    }

    #[test]
    fn ell_examples() {
        let p = params(4, 4);
        let s = ell_stats(&TreeMappingSpec::Canonical, &p, 40).unwrap();
        assert_eq!(s.max, 0);
        let sq = TreeMappingSpec::kicked(
            &p,
            OffsetRule::Squares {
                exempt: None,
                variant_seed: None,
            },
            None,
            KickMode::Coherent,
        )
        .unwrap();
        let s = ell_stats(&sq, &p, 40).unwrap();
        assert_eq!(s.max, 1);
        assert!(s.per_k.iter().all(|&(k, l)| l == u32::from(k != 0)));
    }
}
