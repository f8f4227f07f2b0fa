//! The mask `m_D`, the infinite-product transform `μ̂`, and exact zero-set
//! membership.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};
use serde::Serialize;

use crate::adic::AdicPoint;
use crate::lattice::{a_adic_expansion, mod_a_reduce, reduce_digit, Digit, LatticeVec, MatrixParams};

/// Default certified accuracy for automatically chosen depths.
pub const DEFAULT_TAIL_TARGET: f64 = 1e-10;

/// `(1/3)(1 + e^{-2πi x1} + e^{-2πi x2})`.
pub fn mask(x: [f64; 2]) -> Complex64 {
    let e1 = Complex64::from_polar(1.0, -2.0 * PI * x[0]);
    let e2 = Complex64::from_polar(1.0, -2.0 * PI * x[1]);
    (Complex64::new(1.0, 0.0) + e1 + e2) / 3.0
}

/// A finite product approximating `μ̂(ξ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TruncatedTransform {
    pub value: Complex64,
    /// Bound on the omitted factors' effect: `|μ̂(ξ) - Π_{j≤depth}| ≤ tail_bound`.
    pub tail_bound: f64,
    /// Bound on floating-point error in `value` itself.
    pub rounding: f64,
    pub depth: u64,
}

impl TruncatedTransform {
    /// Total certified distance between `value` and the true transform.
    pub fn error_bound(&self) -> f64 {
        self.tail_bound + self.rounding
    }
}

/// `(2π/3) Σ_{j>n} |A^{-j} ξ|_1` in closed form.
pub fn tail_sum(xi: [f64; 2], p: &MatrixParams, n: u64) -> f64 {
    let (bx, by) = (p.radix_x() as f64, p.radix_y() as f64);
    let n = n as f64;
    let tx = xi[0].abs() / (bx.powf(n) * (bx - 1.0));
    let ty = xi[1].abs() / (by.powf(n) * (by - 1.0));
    2.0 * PI / 3.0 * (tx + ty)
}

fn tail_bound_from(s: f64) -> f64 {
    if s <= 0.5 {
        2.0 * s
    } else {
        f64::INFINITY
    }
}

/// Smallest depth whose tail bound is below `target` for every `|ξ_i| ≤ max_abs`.
pub fn depth_for(max_abs: f64, p: &MatrixParams, target: f64) -> u64 {
    let xi = [max_abs.abs(), max_abs.abs()];
    (1..)
        .find(|&n| tail_bound_from(tail_sum(xi, p, n)) < target)
        .expect("tail decays geometrically")
}

/// Rounding allowance for one factor evaluated at a point of 1-norm `u1`.
fn factor_rounding(u1: f64) -> f64 {
    32.0 * f64::EPSILON * (1.0 + 2.0 * PI * (u1 + 1.0))
}

/// Runs the product along `u_j = (u_{j-1} + d_j) / A`, where the digits are
/// given sparsely as `(position, digit)` in increasing order.
///
/// Stops after `depth` factors if given, otherwise once the remaining tail is
/// certified below `tail_target` past the last digit.
fn run_product(
    u0: [f64; 2],
    digits: &mut dyn Iterator<Item = (u64, [f64; 2])>,
    p: &MatrixParams,
    depth: Option<u64>,
    tail_target: f64,
) -> TruncatedTransform {
    let (bx, by) = (p.radix_x() as f64, p.radix_y() as f64);
    let mut u = u0;
    let mut value = Complex64::new(1.0, 0.0);
    let mut rounding = 0.0;
    let mut extra_tail = 0.0;
    let mut j: u64 = 0;
    let mut next = digits.next();
    loop {
        if let Some(d) = depth {
            if j >= d {
                break;
            }
        } else if next.is_none() && tail_bound_from(tail_sum(u, p, 0)) <= tail_target {
            break;
        }
        // jump a long zero gap once the running point is negligible
        if let Some((pos, _)) = next {
            let gap = pos - j - 1;
            let u1 = u[0].abs() + u[1].abs();
            let capped = depth.is_none_or(|d| pos <= d);
            if gap > 64 && u1 < 1e-20 && capped {
                extra_tail += tail_sum(u, p, 0) + 2.0 * PI / 3.0 * 2.0 * u1;
                u = [0.0, 0.0];
                j = pos - 1;
            }
        }
        j += 1;
        let d = match next {
            Some((pos, d)) if pos == j => {
                next = digits.next();
                d
            }
            _ => [0.0, 0.0],
        };
        u = [(u[0] + d[0]) / bx, (u[1] + d[1]) / by];
        let f = mask(u);
        value *= f;
        rounding += factor_rounding(u[0].abs() + u[1].abs()) + f64::EPSILON;
    }
    let tail = tail_bound_from(tail_sum(u, p, 0)) + extra_tail;
    TruncatedTransform {
        value,
        tail_bound: tail,
        rounding,
        depth: j,
    }
}

fn split_real(xi: [f64; 2]) -> Option<([f64; 2], LatticeVec)> {
    if xi.iter().any(|v| !v.is_finite() || v.abs() >= 2f64.powi(52)) {
        return None;
    }
    let n = [xi[0].round(), xi[1].round()];
    Some((
        [xi[0] - n[0], xi[1] - n[1]],
        LatticeVec::new(n[0] as i64, n[1] as i64),
    ))
}

/// `Π_{j=1}^{depth} m_D(A^{-j} ξ)` with the geometric tail bound.
///
/// The integer part of `ξ` is peeled off digit by digit so every factor is
/// evaluated at a point of size at most about one.
pub fn mu_hat(xi: [f64; 2], p: &MatrixParams, depth: u64) -> TruncatedTransform {
    let depth = depth.max(1);
    let mut out = match split_real(xi) {
        Some((frac, int)) => {
            let ds = a_adic_expansion(&int, p);
            let mut it = ds
                .iter()
                .enumerate()
                .map(|(i, d)| (i as u64 + 1, [d.x as f64, d.y as f64]));
            run_product(frac, &mut it, p, Some(depth), 0.0)
        }
        None => run_product(xi, &mut std::iter::empty(), p, Some(depth), 0.0),
    };
    out.tail_bound = tail_bound_from(tail_sum(xi, p, depth));
    out
}

/// `μ̂(ξ + sign·λ)` for a symbolic point `λ`, certified to `tail_target` plus
/// the reported rounding allowance. Handles digits at astronomically high
/// positions without materializing the point.
pub fn mu_hat_shifted(
    xi: [f64; 2],
    lambda: &AdicPoint,
    negate: bool,
    p: &MatrixParams,
    tail_target: f64,
) -> TruncatedTransform {
    let s = if negate { -1.0 } else { 1.0 };
    let (frac, int) = split_real(xi).unwrap_or((xi, LatticeVec::zero()));
    if int.is_zero() {
        let mut it = lambda
            .digits()
            .filter(|(_, d)| !d.is_zero())
            .map(|(pos, d)| (pos, [s * d.x as f64, s * d.y as f64]));
        return run_product(frac, &mut it, p, None, tail_target);
    }
    // Fold the integer part of ξ into the low digits.
    let ints = a_adic_expansion(&int, p);
    let reach = ints.len() as u64;
    let mut merged: Vec<(u64, [f64; 2])> = Vec::new();
    let mut high: Vec<(u64, [f64; 2])> = Vec::new();
    let mut low = vec![[0.0f64; 2]; ints.len()];
    for (i, d) in ints.iter().enumerate() {
        low[i] = [d.x as f64, d.y as f64];
    }
    for (pos, d) in lambda.digits() {
        let v = [s * d.x as f64, s * d.y as f64];
        if pos <= reach {
            let slot = &mut low[pos as usize - 1];
            slot[0] += v[0];
            slot[1] += v[1];
        } else {
            high.push((pos, v));
        }
    }
    for (i, v) in low.into_iter().enumerate() {
        merged.push((i as u64 + 1, v));
    }
    merged.extend(high);
    run_product(frac, &mut merged.into_iter(), p, None, tail_target)
}

// ---------------------------------------------------------------------------
// Zero sets
// ---------------------------------------------------------------------------

/// Residue class of a zero-set element after stripping powers of `A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ZeroClass {
    /// `(q1, 2q2) + AZ²`
    Q12,
    /// `(2q1, 4q2) + AZ²`
    Q24,
}

/// `v = A^(level-1) w` with `w mod A` in the tagged class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct ZeroSetWitness {
    pub level: u64,
    pub class: ZeroClass,
}

impl ZeroSetWitness {
    /// Re-checks the witness against `v` from scratch.
    pub fn verify(&self, v: &LatticeVec, p: &MatrixParams) -> bool {
        if self.level == 0 || v.is_zero() {
            return false;
        }
        let Ok(e) = usize::try_from(self.level - 1) else {
            return false;
        };
        let px = num_traits::pow(BigInt::from(p.radix_x()), e);
        let py = num_traits::pow(BigInt::from(p.radix_y()), e);
        if !v.x.is_multiple_of(&px) || !v.y.is_multiple_of(&py) {
            return false;
        }
        let w = LatticeVec {
            x: &v.x / px,
            y: &v.y / py,
        };
        classify_residue(mod_a_reduce(&w, p), p) == Some(self.class)
    }
}

/// Which zero class a residue in `Γ` belongs to, if any.
pub fn classify_residue(r: Digit, p: &MatrixParams) -> Option<ZeroClass> {
    let q12 = reduce_digit(Digit::new(p.q1() as i64, 2 * p.q2() as i64), p);
    let q24 = reduce_digit(Digit::new(2 * p.q1() as i64, 4 * p.q2() as i64), p);
    if r == q12 {
        Some(ZeroClass::Q12)
    } else if r == q24 {
        Some(ZeroClass::Q24)
    } else {
        None
    }
}

/// Exact membership of an integer vector in `Z(μ̂)`.
pub fn in_zero_set(v: &LatticeVec, p: &MatrixParams) -> Option<ZeroSetWitness> {
    if v.is_zero() {
        return None;
    }
    let (bx, by) = (BigInt::from(p.radix_x()), BigInt::from(p.radix_y()));
    let mut w = v.clone();
    let mut level = 1;
    loop {
        let (qx, rx) = w.x.div_rem(&bx);
        let (qy, ry) = w.y.div_rem(&by);
        if !(rx.is_zero() && ry.is_zero()) {
            break;
        }
        w = LatticeVec { x: qx, y: qy };
        level += 1;
    }
    classify_residue(mod_a_reduce(&w, p), p).map(|class| ZeroSetWitness { level, class })
}

/// Outcome of testing `a - b ∈ Z(μ̂)` on symbolic points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum DifferenceCheck {
    InZeroSet(ZeroSetWitness),
    Coincident,
    /// `a - b = A^(level-1) (residue + A·…)` with a residue outside both classes.
    Outside { level: u64, residue: Digit },
}

/// Tests `a - b ∈ Z(μ̂)` from the first differing `A`-adic digit.
///
/// With `s` the first position where the digits differ,
/// `a - b = A^(s-1) (a_s - b_s + A·…)` and `a_s - b_s ≢ 0 (mod A)`.
pub fn difference_in_zero_set(a: &AdicPoint, b: &AdicPoint, p: &MatrixParams) -> DifferenceCheck {
    match a.first_difference(b) {
        None => DifferenceCheck::Coincident,
        Some((level, da, db)) => {
            let residue = reduce_digit(da - db, p);
            match classify_residue(residue, p) {
                Some(class) => DifferenceCheck::InZeroSet(ZeroSetWitness { level, class }),
                None => DifferenceCheck::Outside { level, residue },
            }
        }
    }
}

/// Membership in the zero set of the transform of `μ_{3q,{0,1,2}}`:
/// `⋃_{k≥1} (3q)^(k-1) (±q + 3qZ)`.
pub fn zero_set_1d(v: &BigInt, q: u32) -> bool {
    if v.is_zero() || q == 0 {
        return false;
    }
    let b = BigInt::from(3 * q as i64);
    let mut w = v.clone();
    loop {
        let (qt, r) = w.div_mod_floor(&b);
        if !r.is_zero() {
            let r = r.to_i64().expect("small residue");
            return r == q as i64 || r == 2 * q as i64;
        }
        w = qt;
    }
}

/// [`zero_set_1d`] on the first differing digits of two digit strings in
/// radix `3q`: `true` iff the difference of the represented integers lies
/// in the 1-D zero set.
pub fn digit_difference_1d(a: i64, b: i64, q: u32) -> bool {
    let r = (a - b).rem_euclid(3 * q as i64);
    r == q as i64 || r == 2 * q as i64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(q1: u32, q2: u32) -> MatrixParams {
        MatrixParams::new(q1, q2).unwrap()
    }

    #[test]
    fn mask_examples() {
        assert!((mask([0.0, 0.0]) - Complex64::new(1.0, 0.0)).norm() < 1e-15);
        assert!(mask([1.0 / 3.0, 2.0 / 3.0]).norm() < 1e-15);
        assert!((mask([0.5, 0.0]) - Complex64::new(1.0 / 3.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn mu_hat_examples() {
        let p = params(1, 1);
        let t = mu_hat([0.0, 0.0], &p, 10);
        assert_eq!(t.value, Complex64::new(1.0, 0.0));
        assert_eq!(t.tail_bound, 0.0);

        let t = mu_hat([1.0, -1.0], &p, 30);
        assert!(t.tail_bound < 1e-10);
        assert!(t.value.norm() <= 1e-10);

        let a = mu_hat([0.1, 0.1], &p, 20);
        let b = mu_hat([0.1, 0.1], &p, 40);
        assert!((a.value - b.value).norm() <= a.tail_bound);
    }

    #[test]
    fn depth_for_meets_target() {
        let p = params(1, 2);
        let n = depth_for(1e6, &p, 1e-10);
        assert!(tail_bound_from(tail_sum([1e6, 1e6], &p, n)) < 1e-10);
        assert!(tail_bound_from(tail_sum([1e6, 1e6], &p, n - 1)) >= 1e-10);
    }

    #[test]
    fn zero_set_examples() {
        let p = params(1, 2);
        assert_eq!(in_zero_set(&LatticeVec::zero(), &p), None);
        assert_eq!(
            in_zero_set(&LatticeVec::new(1, 4), &p),
            Some(ZeroSetWitness {
                level: 1,
                class: ZeroClass::Q12
            })
        );
        assert_eq!(in_zero_set(&LatticeVec::new(1, 0), &p), None);
        let w = in_zero_set(&LatticeVec::new(2 * 9, 2 * 36), &p).unwrap();
        assert_eq!(w.level, 3);
        assert_eq!(w.class, ZeroClass::Q24);
    }

    #[test]
    fn zero_set_1d_examples() {
        assert!(!zero_set_1d(&BigInt::from(0), 1));
        assert!(zero_set_1d(&BigInt::from(1), 1));
        assert!(!zero_set_1d(&BigInt::from(3), 2));
        assert!(zero_set_1d(&BigInt::from(12), 2));
        assert!(zero_set_1d(&BigInt::from(-2), 2));
    }

    #[test]
    fn shifted_matches_direct_for_small_points() {
        let p = params(1, 2);
        for (x, y) in [(1i64, -2i64), (4, -7), (13, 40), (-5, 9)] {
            let v = LatticeVec::new(x, y);
            let pt = AdicPoint::from_lattice(&v, &p);
            let xi = [0.173, -0.261];
            let a = mu_hat_shifted(xi, &pt, false, &p, 1e-12);
            let b = mu_hat([xi[0] + x as f64, xi[1] + y as f64], &p, 60);
            assert!((a.value - b.value).norm() < 1e-10, "{x},{y}");
            let c = mu_hat_shifted([x as f64 + 0.3, y as f64], &pt, true, &p, 1e-12);
            let d = mu_hat([0.3, 0.0], &p, 60);
            assert!((c.value - d.value).norm() < 1e-10);
        }
    }
}
