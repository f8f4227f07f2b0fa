//! Beurling dimension estimation by ball counting, plus the closed-form
//! dimensions they are compared against.

mod counting;
mod formulas;

pub use counting::{clusters, count_in_ball, Cluster, KdTree, MAX_RADIUS};
pub use formulas::{
    entropy_dim_closed_form, entropy_dim_monte_carlo, formula_dim_1d, formula_dim_2d,
    lacunary_check, support_hausdorff_dim, EntropyReport, HausdorffReport, LacunaryReport,
};

pub use crate::pattern::{PatternSpec, PositionPredicate};

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::adic::AdicPoint;
use crate::error::{Error, Result};
use crate::lattice::{c_set, MatrixParams};

/// Radii `base^j` for `j = lo..=hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ScaleGrid {
    pub base: u64,
    pub lo: u32,
    pub hi: u32,
}

impl ScaleGrid {
    pub fn new(base: u64, lo: u32, hi: u32) -> Result<Self> {
        if base < 2 {
            return Err(Error::DegenerateScales(format!("base {base} must be at least 2")));
        }
        if hi < lo || hi - lo < 3 {
            return Err(Error::DegenerateScales(format!(
                "need at least 4 scales spanning 3 powers of the base, got exponents {lo}..={hi}"
            )));
        }
        match base.checked_pow(hi) {
            Some(r) if r < MAX_RADIUS => Ok(Self { base, lo, hi }),
            _ => Err(Error::DegenerateScales(format!(
                "largest radius {base}^{hi} exceeds 2^62"
            ))),
        }
    }

    /// The grid `(3q2)^lo ..= (3q2)^hi`.
    pub fn for_params(p: &MatrixParams, lo: u32, hi: u32) -> Result<Self> {
        Self::new(p.radix_y() as u64, lo, hi)
    }

    pub fn radii(&self) -> Vec<u64> {
        (self.lo..=self.hi).map(|j| self.base.pow(j)).collect()
    }
}

/// Which ball centers the supremum over `x` ranges over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CentersPolicy {
    /// Use the origin plus every point when there are at most this many
    /// centers; otherwise the origin plus a seeded sample of this size.
    pub max_centers: usize,
    pub seed: u64,
}

impl Default for CentersPolicy {
    fn default() -> Self {
        Self {
            max_centers: 2048,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionEstimate {
    pub scales: Vec<f64>,
    /// Largest ball count over the centers, per scale.
    pub counts: Vec<u64>,
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual of the log-log fit.
    pub fit_residual: f64,
    /// Exponent window `(lo, hi)` of the scale grid.
    pub window: (u32, u32),
    pub centers_used: usize,
}

/// Maximal ball counts over the centers policy, one per radius.
pub fn count_profile(
    points: &[AdicPoint],
    p: &MatrixParams,
    grid: &ScaleGrid,
    policy: &CentersPolicy,
) -> Result<(Vec<u64>, usize)> {
    let cl = clusters(points, p)?;
    let radii = grid.radii();
    // (cluster, center) pairs; the origin lives in the near cluster.
    let mut centers: Vec<(usize, [i128; 2])> = Vec::new();
    for (ci, c) in cl.iter().enumerate() {
        centers.extend(c.tree.points().iter().map(|q| (ci, *q)));
    }
    if centers.len() + 1 > policy.max_centers.max(1) {
        let mut rng = ChaCha8Rng::seed_from_u64(policy.seed);
        // sort first so the sample does not depend on cluster build order
        centers.sort_unstable();
        centers.shuffle(&mut rng);
        centers.truncate(policy.max_centers.saturating_sub(1));
    }
    centers.push((0, [0, 0]));
    let counts = centers
        .par_iter()
        .map(|&(ci, c)| {
            radii
                .iter()
                .map(|&h| cl[ci].tree.count_within(c, h))
                .collect::<Vec<u64>>()
        })
        .reduce(
            || vec![0; radii.len()],
            |a, b| a.iter().zip(&b).map(|(x, y)| *x.max(y)).collect(),
        );
    Ok((counts, centers.len()))
}

/// Least-squares line through `(x, y)`: `(slope, intercept, rms residual)`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let rss: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    (slope, intercept, (rss / n).sqrt())
}

/// Slope of `log max_x #(Λ ∩ B(x, h))` against `log h` over the grid.
pub fn beurling_dim_estimate(
    points: &[AdicPoint],
    p: &MatrixParams,
    grid: &ScaleGrid,
    policy: &CentersPolicy,
) -> Result<DimensionEstimate> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("cannot estimate the dimension of an empty set".into()));
    }
    let (counts, centers_used) = count_profile(points, p, grid, policy)?;
    let scales: Vec<f64> = grid.radii().into_iter().map(|h| h as f64).collect();
    let xs: Vec<f64> = scales.iter().map(|h| h.ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|&c| (c.max(1) as f64).ln()).collect();
    let (slope, intercept, fit_residual) = fit_line(&xs, &ys);
    Ok(DimensionEstimate {
        scales,
        counts,
        slope,
        intercept,
        fit_residual,
        window: (grid.lo, grid.hi),
        centers_used,
    })
}

/// `Λ(A, {D_i})` truncated to positions `1..=depth`, with `D_i = L` on
/// active positions and `{0}` elsewhere.
pub fn pattern_set(p: &MatrixParams, pattern: &PatternSpec, depth: u32) -> Result<Vec<AdicPoint>> {
    let active: Vec<u64> = (1..=depth as u64).filter(|&i| pattern.is_active(i)).collect();
    let total = 3u128.checked_pow(active.len() as u32).unwrap_or(u128::MAX);
    if total > crate::treemap::MAX_POINTS {
        return Err(Error::TooManyPoints {
            requested: total,
            limit: crate::treemap::MAX_POINTS,
        });
    }
    let l = c_set(p);
    let mut out = Vec::with_capacity(total as usize);
    for mut code in 0..total as usize {
        let mut head = vec![crate::lattice::Digit::ZERO; depth as usize];
        for &pos in &active {
            head[pos as usize - 1] = l[code % 3];
            code /= 3;
        }
        out.push(AdicPoint::new(head, None)?);
    }
    Ok(out)
}

/// `max_λ min_γ ‖A^{-pexp} λ - γ‖` over the prefix (in floating point;
/// infinite when a point is too large to place).
pub fn relative_density_check(points: &[AdicPoint], p: &MatrixParams, pexp: u32) -> Result<f64> {
    if points.is_empty() {
        return Err(Error::InvalidArgument("empty prefix".into()));
    }
    let approx: Vec<Option<[f64; 2]>> = points
        .iter()
        .map(|pt| {
            if pt.bit_estimate(p) > 1000.0 {
                return None;
            }
            pt.materialize(p).ok().map(|v| v.to_f64()).filter(|v| v.iter().all(|c| c.is_finite()))
        })
        .collect();
    let sx = (p.radix_x() as f64).powi(pexp as i32);
    let sy = (p.radix_y() as f64).powi(pexp as i32);
    let stat = approx
        .par_iter()
        .map(|lam| match lam {
            None => f64::INFINITY,
            Some(l) => {
                let t = [l[0] / sx, l[1] / sy];
                approx
                    .iter()
                    .flatten()
                    .map(|g| ((t[0] - g[0]).powi(2) + (t[1] - g[1]).powi(2)).sqrt())
                    .fold(f64::INFINITY, f64::min)
            }
        })
        .reduce(|| 0.0, f64::max);
    Ok(stat)
}
