//! Exact orthogonality certification and the numerical completeness checks.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::adic::AdicPoint;
use crate::error::{Error, Result};
use crate::fourier::{
    difference_in_zero_set, digit_difference_1d, in_zero_set, mu_hat_shifted, DifferenceCheck,
};
use crate::lattice::{Digit, LatticeVec, MatrixParams};
use crate::treemap::SpectrumPoint;

/// Point sets up to this size are checked on every pair.
pub const FULL_PAIRS_LIMIT: usize = 10_000;
/// Pairs drawn when a set is too large for the full check.
pub const SAMPLED_PAIRS: usize = 1_000_000;

// ---------------------------------------------------------------------------
// Pair selection
// ---------------------------------------------------------------------------

fn pair_plan(n: usize, seed: u64) -> (bool, Vec<(usize, usize)>) {
    if n <= FULL_PAIRS_LIMIT {
        return (true, Vec::new());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pairs: Vec<(usize, usize)> = (0..SAMPLED_PAIRS)
        .map(|_| loop {
            let i = rng.gen_range(0..n);
            let j = rng.gen_range(0..n);
            if i != j {
                break (i.min(j), i.max(j));
            }
        })
        .collect();
    pairs.sort_unstable();
    pairs.dedup();
    (false, pairs)
}

/// Runs `f` on every selected unordered pair and merges the results in
/// `(i, j)` order.
fn for_pairs<T: Send>(
    n: usize,
    seed: u64,
    f: impl Fn(usize, usize) -> Option<T> + Sync,
) -> (bool, u64, Vec<T>) {
    let (exhaustive, sampled) = pair_plan(n, seed);
    if exhaustive {
        let out: Vec<T> = (0..n)
            .into_par_iter()
            .flat_map_iter(|i| (i + 1..n).filter_map(|j| f(i, j)).collect::<Vec<_>>())
            .collect();
        let pairs = (n as u64) * (n as u64).saturating_sub(1) / 2;
        (true, pairs, out)
    } else {
        let out: Vec<T> = sampled.par_iter().filter_map(|&(i, j)| f(i, j)).collect();
        (false, sampled.len() as u64, out)
    }
}

// ---------------------------------------------------------------------------
// Orthogonality
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ViolationReason {
    Coincident,
    /// The difference is `A^(level-1)(residue + A·…)` with a residue outside
    /// both zero classes.
    ResidueMismatch,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub k: i64,
    pub k_other: i64,
    pub level: u64,
    pub residue: Option<Digit>,
    pub reason: ViolationReason,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OrthogonalityReport {
    pub pairs_checked: u64,
    pub exhaustive: bool,
    pub violations: Vec<Violation>,
}

impl OrthogonalityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Tests `λ - λ' ∈ Z(μ̂)` for every pair (or a seeded sample of pairs beyond
/// [`FULL_PAIRS_LIMIT`] points).
pub fn check_orthogonality(points: &[SpectrumPoint], p: &MatrixParams, seed: u64) -> OrthogonalityReport {
    let (exhaustive, pairs_checked, violations) = for_pairs(points.len(), seed, |i, j| {
        let (a, b) = (&points[i], &points[j]);
        match difference_in_zero_set(&a.point, &b.point, p) {
            DifferenceCheck::InZeroSet(_) => None,
            DifferenceCheck::Coincident => Some(Violation {
                k: a.k,
                k_other: b.k,
                level: 0,
                residue: None,
                reason: ViolationReason::Coincident,
            }),
            DifferenceCheck::Outside { level, residue } => Some(Violation {
                k: a.k,
                k_other: b.k,
                level,
                residue: Some(residue),
                reason: ViolationReason::ResidueMismatch,
            }),
        }
    });
    OrthogonalityReport {
        pairs_checked,
        exhaustive,
        violations,
    }
}

// ---------------------------------------------------------------------------
// Finite-level unitarity
// ---------------------------------------------------------------------------

/// `max |U*U - I|` for `U[a, λ] = 3^(-n/2) e^{-2πi⟨λ, a⟩}`, with `a` running
/// over the `3^n` atoms `Σ_{j≤n} A^{-j} d_j` of `μ_n`.
pub fn gram_unitarity(n: u32, points: &[AdicPoint], p: &MatrixParams) -> Result<f64> {
    let size = 3usize
        .checked_pow(n)
        .filter(|&s| s <= 3usize.pow(8))
        .ok_or_else(|| Error::InvalidArgument(format!("level {n} is too large for a dense Gram matrix")))?;
    if points.len() != size {
        return Err(Error::Cardinality {
            expected: size,
            actual: points.len(),
        });
    }
    if n == 0 {
        return Ok(0.0);
    }
    // ⟨λ, A^{-j} e_c⟩ mod 1 depends only on λ mod A^n.
    let frac = |v: &BigInt, b: i64, j: u32| -> f64 {
        let m = BigInt::from(b).pow(j);
        let r = v.mod_floor(&m);
        r.to_f64().expect("residue fits") / m.to_f64().expect("modulus fits")
    };
    let phases: Vec<Vec<[f64; 2]>> = points
        .iter()
        .map(|pt| {
            let low: LatticeVec = pt.low_value(n as u64, p);
            (1..=n)
                .map(|j| [frac(&low.x, p.radix_x(), j), frac(&low.y, p.radix_y(), j)])
                .collect()
        })
        .collect();
    // Atoms indexed by digit choices in base 3: 0 → (0,0), 1 → (1,0), 2 → (0,1).
    let norm = (size as f64).sqrt().recip();
    let u: Vec<Vec<Complex64>> = (0..size)
        .map(|a| {
            let mut digits = Vec::with_capacity(n as usize);
            let mut r = a;
            for _ in 0..n {
                digits.push(r % 3);
                r /= 3;
            }
            phases
                .iter()
                .map(|ph| {
                    let mut t = 0.0;
                    for (j, &d) in digits.iter().enumerate() {
                        match d {
                            1 => t += ph[j][0],
                            2 => t += ph[j][1],
                            _ => {}
                        }
                    }
                    Complex64::from_polar(norm, -2.0 * std::f64::consts::PI * t.fract())
                })
                .collect()
        })
        .collect();
    let dev = (0..size)
        .into_par_iter()
        .map(|r| {
            let mut worst: f64 = 0.0;
            for s in 0..size {
                let mut acc = Complex64::new(0.0, 0.0);
                for row in &u {
                    acc += row[r].conj() * row[s];
                }
                let target = if r == s { 1.0 } else { 0.0 };
                worst = worst.max((acc - target).norm());
            }
            worst
        })
        .reduce(|| 0.0, f64::max);
    Ok(dev)
}

// ---------------------------------------------------------------------------
// Q-sums
// ---------------------------------------------------------------------------

/// The box `[-hx, hx] × [-hy, hy]` with `h = 3q/(2(3q-1))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SamplingBox {
    pub half_x: f64,
    pub half_y: f64,
}

impl SamplingBox {
    pub fn new(p: &MatrixParams) -> Self {
        let h = |b: i64| b as f64 / (2.0 * (b as f64 - 1.0));
        Self {
            half_x: h(p.radix_x()),
            half_y: h(p.radix_y()),
        }
    }

    pub fn sample(&self, rng: &mut impl Rng) -> [f64; 2] {
        [
            rng.gen_range(-self.half_x..=self.half_x),
            rng.gen_range(-self.half_y..=self.half_y),
        ]
    }

    /// `count` seeded points.
    pub fn samples(&self, count: usize, seed: u64) -> Vec<[f64; 2]> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count).map(|_| self.sample(&mut rng)).collect()
    }
}

/// `Σ_λ |μ̂(ξ + λ)|²` over a finite set, with a certified enclosure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QSum {
    pub value: f64,
    pub lower: f64,
    pub upper: f64,
    pub terms: usize,
}

/// Q-sum whose enclosure width stays below about `budget`.
pub fn q_sum(xi: [f64; 2], points: &[AdicPoint], p: &MatrixParams, budget: f64) -> QSum {
    let n = points.len().max(1);
    let per_term = budget / (8.0 * n as f64);
    let terms: Vec<(f64, f64, f64)> = points
        .par_iter()
        .map(|pt| {
            let t = mu_hat_shifted(xi, pt, false, p, per_term);
            let v = t.value.norm();
            let e = t.error_bound();
            let lo = (v - e).max(0.0);
            (v * v, lo * lo, (v + e) * (v + e))
        })
        .collect();
    let mut value = 0.0;
    let mut lower = 0.0;
    let mut upper = 0.0;
    for (v, lo, hi) in terms {
        value += v;
        lower += lo;
        upper += hi;
    }
    let slack = 2.0 * f64::EPSILON * n as f64 * upper.max(1.0);
    QSum {
        value,
        lower: (lower - slack).max(0.0),
        upper: upper + slack,
        terms: points.len(),
    }
}

// ---------------------------------------------------------------------------
// Structural checks
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinesReport {
    /// Pairs `(k, k')` sharing an x-coordinate.
    pub shared_x: Vec<(i64, i64)>,
    /// Pairs sharing a y-coordinate.
    pub shared_y: Vec<(i64, i64)>,
}

impl LinesReport {
    pub fn passed(&self) -> bool {
        self.shared_x.is_empty() && self.shared_y.is_empty()
    }
}

/// Finds points sharing a vertical or a horizontal line.
pub fn check_distinct_lines(points: &[SpectrumPoint]) -> LinesReport {
    let shared = |key: &dyn Fn(&AdicPoint) -> Vec<(u64, i64)>| {
        let mut first: HashMap<Vec<(u64, i64)>, i64> = HashMap::new();
        let mut out = Vec::new();
        for s in points {
            match first.entry(key(&s.point)) {
                std::collections::hash_map::Entry::Occupied(e) => out.push((*e.get(), s.k)),
                std::collections::hash_map::Entry::Vacant(e) => {
                    e.insert(s.k);
                }
            }
        }
        out
    };
    LinesReport {
        shared_x: shared(&|p| p.x_key()),
        shared_y: shared(&|p| p.y_key()),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProjectionReport {
    pub pairs_checked: u64,
    pub exhaustive: bool,
    pub x_violations: Vec<(i64, i64)>,
    pub y_violations: Vec<(i64, i64)>,
}

impl ProjectionReport {
    pub fn passed(&self) -> bool {
        self.x_violations.is_empty() && self.y_violations.is_empty()
    }
}

/// Checks both coordinate projections against the 1-D zero sets with
/// `q = q1` and `q = q2`.
pub fn check_projection_orthogonality(
    points: &[SpectrumPoint],
    p: &MatrixParams,
    seed: u64,
) -> ProjectionReport {
    let (q1, q2) = (p.q1(), p.q2());
    let (exhaustive, pairs_checked, flagged) = for_pairs(points.len(), seed, |i, j| {
        let (a, b) = (&points[i], &points[j]);
        let ok_x = a
            .point
            .first_component_difference(&b.point, |d| d.x)
            .is_some_and(|(_, u, v)| digit_difference_1d(u, v, q1));
        let ok_y = a
            .point
            .first_component_difference(&b.point, |d| d.y)
            .is_some_and(|(_, u, v)| digit_difference_1d(u, v, q2));
        (!ok_x || !ok_y).then_some((a.k, b.k, ok_x, ok_y))
    });
    ProjectionReport {
        pairs_checked,
        exhaustive,
        x_violations: flagged.iter().filter(|f| !f.2).map(|f| (f.0, f.1)).collect(),
        y_violations: flagged.iter().filter(|f| !f.3).map(|f| (f.0, f.1)).collect(),
    }
}

// ---------------------------------------------------------------------------
// Maximality probing
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Verdict {
    /// `γ - λ_k ∉ Z(μ̂)`: `γ` cannot be added.
    Conflict {
        k: i64,
        level: u64,
        residue: Digit,
        /// Whether `in_zero_set` on the materialized difference agreed.
        reverified: bool,
        /// `|μ̂(γ - λ_k)|` and its certified error.
        modulus: f64,
        error: f64,
    },
    /// Orthogonal to every prefix point; a finite prefix cannot decide more.
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub skipped: usize,
    pub verdicts: Vec<((i64, i64), Verdict)>,
}

impl ProbeReport {
    pub fn conflicts(&self) -> usize {
        self.verdicts
            .iter()
            .filter(|(_, v)| matches!(v, Verdict::Conflict { .. }))
            .count()
    }
}

/// Probes every integer `γ` with `|γ_x|, |γ_y| ≤ radius` not already in the
/// prefix. The transform at a conflicting difference is evaluated to
/// accuracy `10^-depth` as a numeric cross-check.
pub fn maximality_probe(
    points: &[SpectrumPoint],
    p: &MatrixParams,
    radius: i64,
    depth: u32,
) -> ProbeReport {
    let present: std::collections::HashSet<Vec<(u64, Digit)>> =
        points.iter().map(|s| s.point.canonical_key()).collect();
    let target = 10f64.powi(-(depth.clamp(1, 15) as i32));
    // Witnesses are searched from the lowest |k| outward.
    let mut order: Vec<&SpectrumPoint> = points.iter().collect();
    order.sort_by_key(|s| (s.k.unsigned_abs(), s.k));
    let cands: Vec<(i64, i64)> = (-radius..=radius)
        .flat_map(|x| (-radius..=radius).map(move |y| (x, y)))
        .collect();
    let results: Vec<Option<((i64, i64), Verdict)>> = cands
        .par_iter()
        .map(|&(x, y)| {
            let gv = LatticeVec::new(x, y);
            let g = AdicPoint::from_lattice(&gv, p);
            if present.contains(&g.canonical_key()) {
                return None;
            }
            for s in &order {
                if let DifferenceCheck::Outside { level, residue } = difference_in_zero_set(&g, &s.point, p) {
                    let reverified = match s.point.materialize(p) {
                        Ok(l) if l.x.bits() < 4096 && l.y.bits() < 4096 => {
                            in_zero_set(&(&gv - &l), p).is_none()
                        }
                        _ => true,
                    };
                    let t = mu_hat_shifted([x as f64, y as f64], &s.point, true, p, target);
                    return Some((
                        (x, y),
                        Verdict::Conflict {
                            k: s.k,
                            level,
                            residue,
                            reverified,
                            modulus: t.value.norm(),
                            error: t.error_bound(),
                        },
                    ));
                }
            }
            Some(((x, y), Verdict::Inconclusive))
        })
        .collect();
    let skipped = results.iter().filter(|r| r.is_none()).count();
    ProbeReport {
        skipped,
        verdicts: results.into_iter().flatten().collect(),
    }
}
