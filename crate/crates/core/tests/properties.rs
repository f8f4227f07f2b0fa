use std::collections::BTreeMap;

use num_bigint::BigInt;
use proptest::prelude::*;

use spectra::dimension::{count_in_ball, CentersPolicy, ScaleGrid};
use spectra::fourier::{in_zero_set, mask, mu_hat, DEFAULT_TAIL_TARGET};
use spectra::lattice::{
    a_adic_expansion, digit_range, mod_a_reduce, reconstruct, reconstruct_signed, signed_expansion,
};
use spectra::treemap::{
    enumerate_spectrum, index_to_word, lambda_of_index, validate_tree_mapping, word_to_index, Bound,
    KickMode, OffsetRule, TreeMappingSpec,
};
use spectra::{AdicPoint, LatticeVec, MatrixParams};

fn params() -> impl Strategy<Value = MatrixParams> {
    (1u32..=4, 0u32..=4).prop_map(|(q1, extra)| MatrixParams::new(q1, q1 + extra).unwrap())
}

/// `m_D(A^{-j} v) = 0` for some `j`, decided with integer arithmetic:
/// `v1 / n^j ≡ a/3` iff `3 v1 ≡ a n^j (mod 3 n^j)`.
fn zero_set_oracle(v: (i64, i64), q1: u32, q2: u32) -> bool {
    let (n, m) = (3 * q1 as i128, 3 * q2 as i128);
    let thirds = |x: i128, b: i128| -> Option<i128> {
        let r = (3 * x).rem_euclid(3 * b);
        (1..=2).find(|&a| r == a * b)
    };
    let (mut nj, mut mj) = (1i128, 1i128);
    for _ in 0..30 {
        nj *= n;
        mj *= m;
        match (thirds(v.0 as i128, nj), thirds(v.1 as i128, mj)) {
            (Some(1), Some(2)) | (Some(2), Some(1)) => return true,
            _ => {}
        }
        if nj > 1 << 80 || mj > 1 << 80 {
            break;
        }
    }
    false
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 256,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn signed_expansion_round_trip(k in any::<i64>(), b in 3u64..40) {
        let k = BigInt::from(k);
        let ds = signed_expansion(&k, b).unwrap();
        let (lo, hi) = digit_range(b as i64);
        prop_assert!(ds.iter().all(|d| (lo..=hi).contains(d)));
        prop_assert!(ds.last() != Some(&0));
        prop_assert_eq!(reconstruct_signed(&ds, b), k);
    }

    #[test]
    fn big_signed_expansion_round_trip(hi in any::<i64>(), lo in any::<u64>(), b in 3u64..40) {
        let k = (BigInt::from(hi) << 200) + BigInt::from(lo);
        let ds = signed_expansion(&k, b).unwrap();
        prop_assert_eq!(reconstruct_signed(&ds, b), k);
    }

    #[test]
    fn adic_expansion_round_trip(p in params(), x in any::<i64>(), y in any::<i64>()) {
        let w = LatticeVec::new(x, y);
        let ds = a_adic_expansion(&w, &p);
        prop_assert_eq!(reconstruct(&ds, &p).unwrap(), w.clone());
        prop_assert_eq!(AdicPoint::from_lattice(&w, &p).materialize(&p).unwrap(), w);
    }

    #[test]
    fn mod_a_matches_lattice_membership(p in params(), a in -500i64..500, b in -500i64..500, c in -500i64..500, d in -500i64..500) {
        let (u, v) = (LatticeVec::new(a, b), LatticeVec::new(c, d));
        let same = (a - c) % p.radix_x() == 0 && (b - d) % p.radix_y() == 0;
        prop_assert_eq!(mod_a_reduce(&u, &p) == mod_a_reduce(&v, &p), same);
    }

    #[test]
    fn zero_set_matches_oracle(q1 in 1u32..=3, extra in 0u32..=2, x in -1_000_000i64..1_000_000, y in -1_000_000i64..1_000_000) {
        let p = MatrixParams::new(q1, q1 + extra).unwrap();
        let v = LatticeVec::new(x, y);
        let got = in_zero_set(&v, &p);
        prop_assert_eq!(got.is_some(), zero_set_oracle((x, y), q1, q1 + extra));
        if let Some(w) = got {
            prop_assert!(w.verify(&v, &p));
            let scaled = in_zero_set(&p.apply(&v), &p).unwrap();
            prop_assert_eq!(scaled.level, w.level + 1);
        }
    }

    #[test]
    fn zero_set_agrees_with_transform(q1 in 1u32..=2, extra in 0u32..=1, x in -3000i64..3000, y in -3000i64..3000) {
        let p = MatrixParams::new(q1, q1 + extra).unwrap();
        let v = LatticeVec::new(x, y);
        let depth = spectra::fourier::depth_for(x.abs().max(y.abs()) as f64, &p, DEFAULT_TAIL_TARGET);
        let t = mu_hat([x as f64, y as f64], &p, depth);
        if in_zero_set(&v, &p).is_some() {
            prop_assert!(t.value.norm() < 1e-9, "{:?}", t);
        } else if !v.is_zero() {
            prop_assert!(t.value.norm() > t.error_bound(), "{:?}", t);
        }
    }

    #[test]
    fn mask_is_bounded(x in -1e6f64..1e6, y in -1e6f64..1e6) {
        prop_assert!(mask([x, y]).norm() <= 1.0 + 1e-12);
    }

    #[test]
    fn codec_bijection(k in -100_000i64..=100_000) {
        let w = index_to_word(k);
        prop_assert!(w.is_index_word());
        prop_assert_eq!(word_to_index(&w).unwrap(), k);
    }

    #[test]
    fn coherent_mappings_validate(seed in any::<u64>(), depth in 2u32..=6) {
        let p = MatrixParams::new(4, 4).unwrap();
        let mut table = BTreeMap::new();
        let mut s = seed;
        for _ in 0..6 {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let k = (s >> 40) as i64 % 121 - 60;
            if k != 0 {
                table.insert(k, 1 + (s >> 20) % 5);
            }
        }
        let spec = TreeMappingSpec::kicked(&p, OffsetRule::Table(table), None, KickMode::Coherent).unwrap();
        let rep = validate_tree_mapping(&spec, &p, depth).unwrap();
        prop_assert!(rep.passed(), "{:?}", rep.violations.first());
    }

    #[test]
    fn kicked_points_grow(k in 1i64..2000) {
        let p = MatrixParams::new(4, 4).unwrap();
        let spec = TreeMappingSpec::kicked(
            &p,
            OffsetRule::Squares { exempt: None, variant_seed: None },
            None,
            KickMode::Coherent,
        ).unwrap();
        let s = lambda_of_index(&spec, &p, k).unwrap();
        let n = s.word.len() as f64;
        let m = (k * k) as f64;
        let (lo, _) = s.point.log2_norm_bounds(&p).unwrap();
        let bound = (n + m - 1.0) * 12f64.log2();
        // the log-form lower bound carries a relative rounding allowance
        prop_assert!(lo >= bound * (1.0 - 1e-8), "{} < {}", lo, bound);
    }
}

#[test]
fn enumeration_is_prefix_stable() {
    let p = MatrixParams::new(1, 2).unwrap();
    let small = enumerate_spectrum(&TreeMappingSpec::Canonical, &p, Bound::Level(4)).unwrap();
    let big = enumerate_spectrum(&TreeMappingSpec::Canonical, &p, Bound::Level(5)).unwrap();
    for s in &small.points {
        assert_eq!(big.get(s.k).unwrap(), s);
    }
}

#[test]
fn canonical_level_three_is_brute_force_lambda_max() {
    let p = MatrixParams::new(1, 1).unwrap();
    let l = spectra::lattice::c_set(&p);
    let mut brute = Vec::new();
    for a in l {
        for b in l {
            for c in l {
                let v = reconstruct(&[a, b, c], &p).unwrap();
                brute.push((v.x.to_string(), v.y.to_string()));
            }
        }
    }
    let mut got: Vec<_> = enumerate_spectrum(&TreeMappingSpec::Canonical, &p, Bound::Level(3))
        .unwrap()
        .points
        .iter()
        .map(|s| {
            let v = s.lambda(&p).unwrap();
            (v.x.to_string(), v.y.to_string())
        })
        .collect();
    brute.sort();
    got.sort();
    assert_eq!(brute, got);
}

#[test]
fn subset_counts_are_monotone() {
    let p = MatrixParams::new(1, 2).unwrap();
    let all = enumerate_spectrum(&TreeMappingSpec::Canonical, &p, Bound::Level(6))
        .unwrap()
        .adic_points();
    let part: Vec<_> = all.iter().step_by(3).cloned().collect();
    let grid = ScaleGrid::for_params(&p, 0, 6).unwrap();
    let policy = CentersPolicy {
        max_centers: usize::MAX,
        seed: 0,
    };
    let (big, _) = spectra::dimension::count_profile(&all, &p, &grid, &policy).unwrap();
    let (small, _) = spectra::dimension::count_profile(&part, &p, &grid, &policy).unwrap();
    assert!(small.iter().zip(&big).all(|(s, b)| s <= b));
}

#[test]
fn ball_counts_agree_with_kd_counts() {
    let p = MatrixParams::new(1, 2).unwrap();
    let pts = enumerate_spectrum(&TreeMappingSpec::Canonical, &p, Bound::Level(5))
        .unwrap()
        .adic_points();
    for (c, h) in [([0.0, 0.0], 6.0), ([3.5, -10.0], 40.0), ([0.0, 0.0], 1296.0)] {
        let brute = pts
            .iter()
            .filter(|a| {
                let v = a.materialize(&p).unwrap().to_f64();
                (v[0] - c[0]).powi(2) + (v[1] - c[1]).powi(2) < h * h
            })
            .count() as u64;
        assert_eq!(count_in_ball(&pts, c, h, &p).unwrap(), brute);
    }
}
