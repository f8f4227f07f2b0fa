//! Exact ball counting on symbolic point sets.
//!
//! Points are split into clusters that no ball of radius below `2^62` can
//! straddle: the points without a high kick (the near cluster, holding the
//! origin) and one cluster per high kick term `A^e κ`. Within a cluster,
//! coordinates relative to the shared kick term are small and counting runs
//! on a k-d tree in `i128`.

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};

use crate::adic::{f64_to_dyadic, AdicPoint, Kick};
use crate::error::{Error, Result};
use crate::lattice::MatrixParams;

/// Radii must stay below this bound.
pub const MAX_RADIUS: u64 = 1 << 62;

const LEAF: usize = 16;
const COORD_LIMIT_BITS: u64 = 120;

#[derive(Debug, Clone, Copy)]
struct Node {
    lo: usize,
    hi: usize,
    min: [i128; 2],
    max: [i128; 2],
    left: Option<usize>,
    right: Option<usize>,
}

/// Static 2-d tree answering "how many points lie strictly inside a disc".
#[derive(Debug, Clone)]
pub struct KdTree {
    pts: Vec<[i128; 2]>,
    nodes: Vec<Node>,
}

impl KdTree {
    pub fn new(mut pts: Vec<[i128; 2]>) -> Self {
        let mut nodes = Vec::new();
        if !pts.is_empty() {
            let n = pts.len();
            build(&mut pts, 0, n, 0, &mut nodes);
        }
        Self { pts, nodes }
    }

    pub fn len(&self) -> usize {
        self.pts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pts.is_empty()
    }

    pub fn points(&self) -> &[[i128; 2]] {
        &self.pts
    }

    /// Number of points at Euclidean distance `< h` from `c`.
    pub fn count_within(&self, c: [i128; 2], h: u64) -> u64 {
        if self.nodes.is_empty() {
            return 0;
        }
        let h = h as i128;
        let h2 = (h as u128) * (h as u128);
        let inside = |dx: i128, dy: i128| -> bool {
            let (dx, dy) = (dx.unsigned_abs(), dy.unsigned_abs());
            dx < h as u128 && dy < h as u128 && dx * dx + dy * dy < h2
        };
        let mut total = 0u64;
        let mut stack = vec![0usize];
        while let Some(i) = stack.pop() {
            let nd = &self.nodes[i];
            let near = |a: usize| -> i128 {
                if c[a] < nd.min[a] {
                    nd.min[a] - c[a]
                } else if c[a] > nd.max[a] {
                    c[a] - nd.max[a]
                } else {
                    0
                }
            };
            if !inside(near(0), near(1)) {
                continue;
            }
            let far = |a: usize| -> i128 { (c[a] - nd.min[a]).abs().max((nd.max[a] - c[a]).abs()) };
            if inside(far(0), far(1)) {
                total += (nd.hi - nd.lo) as u64;
                continue;
            }
            match (nd.left, nd.right) {
                (Some(l), Some(r)) => {
                    stack.push(l);
                    stack.push(r);
                }
                _ => {
                    total += self.pts[nd.lo..nd.hi]
                        .iter()
                        .filter(|q| inside(q[0] - c[0], q[1] - c[1]))
                        .count() as u64;
                }
            }
        }
        total
    }
}

fn build(pts: &mut [[i128; 2]], lo: usize, hi: usize, axis: usize, nodes: &mut Vec<Node>) -> usize {
    let slice = &pts[lo..hi];
    let mut min = [i128::MAX; 2];
    let mut max = [i128::MIN; 2];
    for q in slice {
        for a in 0..2 {
            min[a] = min[a].min(q[a]);
            max[a] = max[a].max(q[a]);
        }
    }
    let id = nodes.len();
    nodes.push(Node {
        lo,
        hi,
        min,
        max,
        left: None,
        right: None,
    });
    if hi - lo > LEAF {
        let mid = (hi - lo) / 2;
        pts[lo..hi].select_nth_unstable_by_key(mid, |q| q[axis]);
        let l = build(pts, lo, lo + mid, 1 - axis, nodes);
        let r = build(pts, lo + mid, hi, 1 - axis, nodes);
        nodes[id].left = Some(l);
        nodes[id].right = Some(r);
    }
    id
}

/// A group of points that can share a ball, in coordinates relative to the
/// group's common kick term.
#[derive(Debug, Clone)]
pub struct Cluster {
    /// `None` for the near cluster (absolute coordinates).
    pub kick: Option<Kick>,
    pub tree: KdTree,
}

fn to_i128(v: &BigInt) -> Result<i128> {
    if v.bits() >= COORD_LIMIT_BITS {
        return Err(Error::InvalidArgument(
            "point coordinates exceed the exact counting range".into(),
        ));
    }
    Ok(v.to_i128().expect("checked bit length"))
}

/// Partitions points into clusters separated by more than `2 · MAX_RADIUS`.
///
/// With `H` bounding every head coordinate, two points with distinct kick
/// terms of exponent at most `e'` (and `(3q1)^e' ≥ 2^T`) differ by at least
/// `(3q1)^e'/2 - 2H` in some coordinate, which exceeds `2^63` for the
/// threshold `T` used here.
pub fn clusters(points: &[AdicPoint], p: &MatrixParams) -> Result<Vec<Cluster>> {
    let heads: Vec<_> = points.iter().map(|pt| pt.head_value(p)).collect();
    let head_bits = heads
        .iter()
        .map(|h| h.x.abs().bits().max(h.y.abs().bits()))
        .max()
        .unwrap_or(0);
    let threshold = (64u64.max(head_bits + 3) + 2) as f64 + 1.0;
    let lx = (p.radix_x() as f64).log2();
    let is_far = |k: &Kick| ((k.position - 1) as f64) * lx >= threshold;

    let mut near: Vec<usize> = Vec::new();
    let mut far: std::collections::BTreeMap<Kick, Vec<usize>> = Default::default();
    for (i, pt) in points.iter().enumerate() {
        match pt.kick() {
            Some(k) if is_far(&k) => far.entry(k).or_default().push(i),
            _ => near.push(i),
        }
    }
    let mut out = Vec::with_capacity(far.len() + 1);
    let near_coords = near
        .iter()
        .map(|&i| {
            let v = points[i].materialize(p)?;
            Ok([to_i128(&v.x)?, to_i128(&v.y)?])
        })
        .collect::<Result<Vec<_>>>()?;
    out.push(cluster_from(None, near_coords));
    for (k, idx) in far {
        let coords = idx
            .iter()
            .map(|&i| Ok([to_i128(&heads[i].x)?, to_i128(&heads[i].y)?]))
            .collect::<Result<Vec<_>>>()?;
        out.push(cluster_from(Some(k), coords));
    }
    Ok(out)
}

fn cluster_from(kick: Option<Kick>, coords: Vec<[i128; 2]>) -> Cluster {
    Cluster {
        kick,
        tree: KdTree::new(coords),
    }
}

/// Exact number of points at Euclidean distance `< h` from a real center.
pub fn count_in_ball(points: &[AdicPoint], center: [f64; 2], h: f64, p: &MatrixParams) -> Result<u64> {
    if h.is_nan() || h <= 0.0 || !h.is_finite() || center.iter().any(|c| !c.is_finite()) {
        return Err(Error::InvalidArgument(format!("bad ball: center {center:?}, radius {h}")));
    }
    let reach = (center[0].abs().max(center[1].abs()) + h).log2() + 2.0;
    let (hm, he) = f64_to_dyadic(h).expect("finite");
    let (xm, xe) = f64_to_dyadic(center[0].abs()).expect("finite");
    let (ym, ye) = f64_to_dyadic(center[1].abs()).expect("finite");
    let shift = [he, xe, ye].into_iter().map(|e| -e).max().unwrap_or(0).max(0);
    let scale = |m: BigInt, e: i64, neg: bool| -> BigInt {
        let v = m << (e + shift) as usize;
        if neg {
            -v
        } else {
            v
        }
    };
    let hs = scale(hm, he, false);
    let cx = scale(xm, xe, center[0] < 0.0);
    let cy = scale(ym, ye, center[1] < 0.0);
    let h2 = &hs * &hs;
    let mut count = 0;
    for pt in points {
        if let Some((lo, _)) = pt.log2_norm_bounds(p) {
            if lo > reach {
                continue;
            }
        }
        let v = pt.materialize(p)?;
        let dx = (v.x << shift as usize) - &cx;
        let dy = (v.y << shift as usize) - &cy;
        if &dx * &dx + &dy * &dy < h2 {
            count += 1;
        }
    }
    Ok(count)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeVec;

    #[test]
    fn kd_tree_matches_brute_force() {
        let mut pts = Vec::new();
        let mut s = 12345u64;
        for _ in 0..3000 {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let x = ((s >> 33) % 2001) as i128 - 1000;
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let y = ((s >> 33) % 2001) as i128 - 1000;
            pts.push([x, y]);
        }
        let tree = KdTree::new(pts.clone());
        for (c, h) in [([0, 0], 1u64), ([5, -7], 300), ([999, 999], 50), ([0, 0], 5000), ([3, 4], 5)] {
            let brute = pts
                .iter()
                .filter(|q| {
                    let (dx, dy) = (q[0] - c[0], q[1] - c[1]);
                    dx * dx + dy * dy < (h as i128) * (h as i128)
                })
                .count() as u64;
            assert_eq!(tree.count_within(c, h), brute);
        }
    }

    #[test]
    fn count_in_ball_examples() {
        let p = MatrixParams::new(1, 1).unwrap();
        assert_eq!(count_in_ball(&[], [0.0, 0.0], 1.0, &p).unwrap(), 0);
        let pre = crate::treemap::enumerate_spectrum(
            &crate::treemap::TreeMappingSpec::Canonical,
            &p,
            crate::treemap::Bound::Level(2),
        )
        .unwrap()
        .adic_points();
        assert_eq!(count_in_ball(&pre, [0.0, 0.0], 10.0, &p).unwrap(), 9);
        assert_eq!(count_in_ball(&pre, [0.0, 0.0], 0.5, &p).unwrap(), 1);
        // boundary is excluded: |(3,4)| = 5
        let far = [AdicPoint::from_lattice(&LatticeVec::new(3, 4), &p)];
        assert_eq!(count_in_ball(&far, [0.0, 0.0], 5.0, &p).unwrap(), 0);
        assert_eq!(count_in_ball(&far, [0.0, 0.0], 5.000001, &p).unwrap(), 1);
        let one = [AdicPoint::from_lattice(&LatticeVec::new(1, -1), &p)];
        assert_eq!(count_in_ball(&one, [0.5, -0.5], 0.7072, &p).unwrap(), 1);
    }

    #[test]
    fn far_kicks_form_their_own_clusters() {
        let p = MatrixParams::new(1, 1).unwrap();
        let d = crate::lattice::Digit::new(1, -1);
        let a = AdicPoint::new(vec![d], Some(Kick { position: 500, digit: d })).unwrap();
        let b = AdicPoint::new(vec![-d], Some(Kick { position: 500, digit: d })).unwrap();
        let c = AdicPoint::new(vec![d], Some(Kick { position: 3, digit: d })).unwrap();
        let cl = clusters(&[a, b, c, AdicPoint::zero()], &p).unwrap();
        assert_eq!(cl.len(), 2);
        assert_eq!(cl[0].kick, None);
        assert_eq!(cl[0].tree.len(), 2);
        assert_eq!(cl[1].tree.len(), 2);
        // heads (1,-1) and (-1,1) are 2√2 apart
        assert_eq!(cl[1].tree.count_within([1, -1], 3), 2);
    }
}
