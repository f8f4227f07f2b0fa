//! Closed-form dimensions and the lacunarity test.

use std::cmp::Ordering;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::adic::AdicPoint;
use crate::error::{Error, Result};
use crate::lattice::{digit_range, Digit, LatticeVec, MatrixParams};
use crate::pattern::PatternSpec;

/// `freq · log #D / log b` for `Λ(b, {D_i})` on the line.
pub fn formula_dim_1d(b: i64, digits: &[i64], pattern: &PatternSpec) -> Result<f64> {
    if b < 2 {
        return Err(Error::InvalidRadix(b.max(0) as u64));
    }
    let (lo, hi) = digit_range(b);
    if let Some(&d) = digits.iter().find(|d| !(lo..=hi).contains(*d)) {
        return Err(Error::DigitSetOutOfRange { digit: d, lo, hi });
    }
    let mut set = digits.to_vec();
    set.sort_unstable();
    set.dedup();
    if set.is_empty() {
        return Err(Error::InvalidArgument("empty digit set".into()));
    }
    Ok(pattern.frequency() * (set.len() as f64).ln() / (b as f64).ln())
}

/// `freq · log #B / log b` for `Λ(diag(a, b), {B_i})`.
///
/// Requires `π_y(B)` inside the signed digit range of `b` and at most one
/// generated point per vertical line; the latter is checked on the points
/// built from the first `check_depth` positions.
pub fn formula_dim_2d(
    a: i64,
    b: i64,
    digits: &[Digit],
    pattern: &PatternSpec,
    check_depth: u32,
) -> Result<f64> {
    if a < 2 || a > b {
        return Err(Error::InvalidArgument(format!("need 1 < a <= b, got a={a}, b={b}")));
    }
    let (lo, hi) = digit_range(b);
    if let Some(d) = digits.iter().find(|d| !(lo..=hi).contains(&d.y)) {
        return Err(Error::DigitSetOutOfRange { digit: d.y, lo, hi });
    }
    let mut set = digits.to_vec();
    set.sort_unstable();
    set.dedup();
    if set.is_empty() {
        return Err(Error::InvalidArgument("empty digit set".into()));
    }
    // Build the generated set over active positions (bounded size) and look
    // for two points with equal x.
    let mut xs: Vec<i128> = vec![0];
    let mut scale: i128 = 1;
    for i in 1..=check_depth as u64 {
        if pattern.is_active(i) {
            if xs.len() * set.len() > 200_000 {
                break;
            }
            xs = xs
                .iter()
                .flat_map(|&x| set.iter().map(move |d| x + scale * d.x as i128))
                .collect();
        }
        scale = match scale.checked_mul(a as i128) {
            Some(s) if s < 1 << 100 => s,
            _ => break,
        };
    }
    let mut sorted = xs.clone();
    sorted.sort_unstable();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::VerticalLineCollision { x: w[0].to_string() });
    }
    Ok(pattern.frequency() * (set.len() as f64).ln() / (b as f64).ln())
}

// ---------------------------------------------------------------------------
// Lacunarity
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LacunaryReport {
    pub origin_ok: bool,
    pub first_term_ok: bool,
    pub ratios_ok: bool,
    /// Smallest observed `|a_{n+1}| / |a_n|` (approximate).
    pub min_ratio: f64,
    /// Comparisons that could not be decided exactly.
    pub undecided: usize,
    pub pass: bool,
}

fn approx_log2(pt: &AdicPoint, p: &MatrixParams) -> f64 {
    pt.log2_norm_bounds(p)
        .map_or(f64::NEG_INFINITY, |(lo, hi)| 0.5 * (lo + hi))
}

/// Checks the `b`-lacunary definition on a two-sided indexed sequence:
/// `a_0 = 0`, `|a_{±1}| ≥ b`, and `|a_{±(n+1)}| ≥ b |a_{±n}|`.
///
/// Magnitudes are compared exactly, by materialization or rigorous log
/// bounds; `b` is taken as the exact value of the `f64`.
pub fn lacunary_check(points: &[(i64, AdicPoint)], b: f64, p: &MatrixParams) -> LacunaryReport {
    let mut sorted: Vec<&(i64, AdicPoint)> = points.iter().collect();
    sorted.sort_by_key(|(k, _)| *k);
    let origin_ok = sorted.iter().find(|(k, _)| *k == 0).is_none_or(|(_, a)| a.is_zero());
    let unit = AdicPoint::from_lattice(&LatticeVec::new(1, 0), p);
    let mut first_term_ok = true;
    let mut ratios_ok = true;
    let mut undecided = 0;
    let mut min_ratio = f64::INFINITY;
    let pos: Vec<&AdicPoint> = sorted.iter().filter(|(k, _)| *k > 0).map(|(_, a)| a).collect();
    let neg: Vec<&AdicPoint> = sorted.iter().rev().filter(|(k, _)| *k < 0).map(|(_, a)| a).collect();
    for branch in [pos, neg] {
        if let Some(first) = branch.first() {
            match first.cmp_scaled_norm(&unit, b, p) {
                Some(Ordering::Less) => first_term_ok = false,
                Some(_) => {}
                None => undecided += 1,
            }
        }
        for w in branch.windows(2) {
            let r = (approx_log2(w[1], p) - approx_log2(w[0], p)).exp2();
            min_ratio = min_ratio.min(r);
            match w[1].cmp_scaled_norm(w[0], b, p) {
                Some(Ordering::Less) => ratios_ok = false,
                Some(_) => {}
                None => undecided += 1,
            }
        }
    }
    LacunaryReport {
        origin_ok,
        first_term_ok,
        ratios_ok,
        min_ratio,
        undecided,
        pass: origin_ok && first_term_ok && ratios_ok && undecided == 0,
    }
}

// ---------------------------------------------------------------------------
// Entropy and Hausdorff dimensions
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EntropyReport {
    /// `dim_e μ`.
    pub dim_e: f64,
    /// `dim_e μ^x` of the x-marginal.
    pub dim_e_x: f64,
    /// `log 3 / log 3q2`.
    pub lower: f64,
    /// `log 3 / log 3q1`.
    pub upper: f64,
    /// Strict `lower < dim_e < upper` for `q1 < q2`; `dim_e = upper` for `q1 = q2`.
    pub chain_ok: bool,
}

pub fn entropy_dim_closed_form(p: &MatrixParams) -> EntropyReport {
    let (n, m) = (p.radix_x() as f64, p.radix_y() as f64);
    let h = -(2.0 / 3.0 * (2.0f64 / 3.0).ln() + 1.0 / 3.0 * (1.0f64 / 3.0).ln());
    let dim_e_x = h / n.ln();
    let dim_e = (dim_e_x * (m / n).ln() + 3f64.ln()) / m.ln();
    let lower = 3f64.ln() / m.ln();
    let upper = 3f64.ln() / n.ln();
    let chain_ok = if p.q1() < p.q2() {
        lower < dim_e && dim_e < upper
    } else {
        (dim_e - upper).abs() < 1e-12
    };
    EntropyReport {
        dim_e,
        dim_e_x,
        lower,
        upper,
        chain_ok,
    }
}

/// `H_n(μ) / log 2^n` estimated from `samples` i.i.d. draws on the dyadic
/// grid of mesh `2^-n`.
pub fn entropy_dim_monte_carlo(p: &MatrixParams, n: u32, samples: usize, seed: u64) -> Result<f64> {
    if n == 0 {
        return Ok(0.0);
    }
    if samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    if n > 50 {
        return Err(Error::InvalidArgument(format!("partition level {n} is too fine")));
    }
    let bx = p.radix_x() as f64;
    // Σ_{j>J} (3q1)^{-j} = (3q1)^{-J}/(3q1 - 1) < 2^{-n-4}
    let mut depth = 1;
    while bx.powi(-depth) / (bx - 1.0) >= 2f64.powi(-(n as i32) - 4) {
        depth += 1;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let cells = 2f64.powi(n as i32);
    let by = p.radix_y() as f64;
    let mut hist: std::collections::HashMap<(i64, i64), u64> = std::collections::HashMap::new();
    for _ in 0..samples {
        let (mut x, mut y) = (0.0, 0.0);
        let (mut sx, mut sy) = (1.0, 1.0);
        for _ in 0..depth {
            sx /= bx;
            sy /= by;
            match rng.gen_range(0..3) {
                1 => x += sx,
                2 => y += sy,
                _ => {}
            }
        }
        let cell = ((x * cells).floor() as i64, (y * cells).floor() as i64);
        *hist.entry(cell).or_insert(0) += 1;
    }
    let total = samples as f64;
    let h: f64 = hist
        .values()
        .map(|&c| {
            let q = c as f64 / total;
            -q * q.ln()
        })
        .sum();
    Ok(h / (n as f64 * 2f64.ln()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HausdorffReport {
    /// `log(2^u + 1) / log 3q1` with `u = log 3q1 / log 3q2`.
    pub value: f64,
    /// `log 3 / log 3q2`.
    pub beurling_bound: f64,
    pub exceeds_bound: bool,
}

pub fn support_hausdorff_dim(p: &MatrixParams) -> HausdorffReport {
    let (n, m) = (p.radix_x() as f64, p.radix_y() as f64);
    let u = n.ln() / m.ln();
    let value = (2f64.powf(u) + 1.0).ln() / n.ln();
    let beurling_bound = 3f64.ln() / m.ln();
    HausdorffReport {
        value,
        beurling_bound,
        exceeds_bound: value > beurling_bound,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adic::Kick;

    fn params(q1: u32, q2: u32) -> MatrixParams {
        MatrixParams::new(q1, q2).unwrap()
    }

    #[test]
    fn formula_1d_examples() {
        let all = PatternSpec::all_active();
        let v = formula_dim_1d(6, &[0, 1, 2], &all).unwrap();
        assert!((v - 3f64.ln() / 6f64.ln()).abs() < 1e-15);
        assert_eq!(formula_dim_1d(6, &[0, 1, 2], &PatternSpec::none_active()).unwrap(), 0.0);
        let alt = PatternSpec::periodic(vec![true, false]).unwrap();
        let v = formula_dim_1d(6, &[0, 1, 2], &alt).unwrap();
        assert!((v - 0.5 * 3f64.ln() / 6f64.ln()).abs() < 1e-15);
        assert!(matches!(
            formula_dim_1d(6, &[0, 3], &all),
            Err(Error::DigitSetOutOfRange { digit: 3, lo: -3, hi: 2 })
        ));
    }

    #[test]
    fn formula_2d_examples() {
        let p = params(1, 2);
        let l = crate::lattice::c_set(&p);
        let v = formula_dim_2d(3, 6, &l, &PatternSpec::all_active(), 10).unwrap();
        assert!((v - 3f64.ln() / 6f64.ln()).abs() < 1e-15);
        let collide = [Digit::new(0, 0), Digit::new(0, 1)];
        assert!(matches!(
            formula_dim_2d(3, 6, &collide, &PatternSpec::all_active(), 4),
            Err(Error::VerticalLineCollision { .. })
        ));
    }

    #[test]
    fn entropy_examples() {
        let r = entropy_dim_closed_form(&params(1, 1));
        assert!((r.dim_e - 1.0).abs() < 1e-12 && r.chain_ok);
        let r = entropy_dim_closed_form(&params(1, 2));
        assert!((r.dim_e_x - 0.5793802).abs() < 1e-6);
        assert!((r.dim_e - 0.8372820).abs() < 1e-6);
        assert!(r.chain_ok);
    }

    #[test]
    fn hausdorff_examples() {
        assert!((support_hausdorff_dim(&params(1, 1)).value - 1.0).abs() < 1e-12);
        let r = support_hausdorff_dim(&params(1, 2));
        assert!((r.value - 0.8447549).abs() < 1e-6);
        assert!(r.exceeds_bound);
    }

    #[test]
    fn lacunary_examples() {
        let p = params(1, 1);
        let geo: Vec<(i64, AdicPoint)> = (0..20)
            .map(|n| {
                let v = if n == 0 { 0 } else { 1i64 << n };
                (n, AdicPoint::from_lattice(&LatticeVec::new(v, 0), &p))
            })
            .collect();
        let r = lacunary_check(&geo, 2.0, &p);
        assert!(r.pass, "{r:?}");
        assert!((r.min_ratio - 2.0).abs() < 1e-9);
        assert!(!lacunary_check(&geo, 2.5, &p).pass);

        let d = Digit::new(1, -1);
        let huge: Vec<(i64, AdicPoint)> = (1..4)
            .map(|k| {
                let kick = Kick {
                    position: 10_000 * k as u64,
                    digit: d,
                };
                (k, AdicPoint::new(vec![d], Some(kick)).unwrap())
            })
            .collect();
        let r = lacunary_check(&huge, 36.0, &p);
        assert!(r.pass && r.undecided == 0);
    }

    #[test]
    fn monte_carlo_level_zero() {
        assert_eq!(entropy_dim_monte_carlo(&params(1, 1), 0, 10, 0).unwrap(), 0.0);
    }
}
