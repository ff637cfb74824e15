use proptest::prelude::*;

use homog_core::geometry::{
    coercive_hamiltonian_with, gauge_membership, hamiltonian_with, norm,
    recession_cone_contains, sigma_truncated_with, sigma_with, ControlSetQuery,
};
use homog_core::vector_field::field_constants;
use homog_core::{TorusGrid, VectorFieldSpec};

fn planar(r: f64) -> impl Strategy<Value = Vec<f64>> {
    (0.0..r, 0.0..std::f64::consts::TAU).prop_map(|(m, a)| vec![m * a.cos(), m * a.sin()])
}

fn unit() -> impl Strategy<Value = Vec<f64>> {
    (0.0..std::f64::consts::TAU).prop_map(|a| vec![a.cos(), a.sin()])
}

fn unit_circle(count: usize) -> Vec<[f64; 2]> {
    (0..count)
        .map(|i| {
            let a = std::f64::consts::TAU * i as f64 / count as f64;
            [a.cos(), a.sin()]
        })
        .collect()
}

/// `q ∈ F` by scanning `s ∈ [0,1]` for `|q − sV| ≤ s`.
fn member_by_scan(v: &[f64], q: &[f64]) -> bool {
    (0..=20_000).any(|i| {
        let s = i as f64 / 20_000.0;
        let d = [q[0] - s * v[0], q[1] - s * v[1]];
        norm(&d) <= s + 1e-12
    })
}

proptest! {
    #[test]
    fn sigma_is_positively_homogeneous(v in planar(2.5), q in planar(3.0), t in 0.05f64..20.0) {
        let a = sigma_with(&v, &q);
        let tq: Vec<f64> = q.iter().map(|c| t * c).collect();
        let b = sigma_with(&v, &tq);
        if a.is_infinite() {
            prop_assert!(b.is_infinite());
        } else {
            prop_assert!((b - t * a).abs() <= 1e-12 * (1.0 + t * a));
        }
    }

    #[test]
    fn sigma_is_subadditive(v in planar(2.5), q1 in planar(2.0), q2 in planar(2.0)) {
        let a = sigma_with(&v, &q1);
        let b = sigma_with(&v, &q2);
        let s: Vec<f64> = q1.iter().zip(&q2).map(|(x, y)| x + y).collect();
        let c = sigma_with(&v, &s);
        if a.is_finite() && b.is_finite() {
            prop_assert!(c <= a + b + 1e-9);
        }
    }

    #[test]
    fn gauge_membership_matches_scan(v in planar(2.5), q in planar(3.5)) {
        let s = sigma_with(&v, &q);
        prop_assume!((s - 1.0).abs() > 1e-3);
        let query = ControlSetQuery { center: v.clone(), radius: 1.0 };
        prop_assert_eq!(gauge_membership(&query, &q, 0.0), member_by_scan(&v, &q));
    }

    #[test]
    fn recession_cone_is_polar_of_control_set(v in planar(2.5), p in planar(2.0)) {
        let h = hamiltonian_with(&v, &p);
        prop_assume!(h.abs() > 1e-3);
        let spec = VectorFieldSpec::constant(v.clone());
        // extreme points V + e of F; p·q ≤ 0 on F iff it holds on them
        let polar = unit_circle(4096)
            .iter()
            .all(|e| p[0] * (v[0] + e[0]) + p[1] * (v[1] + e[1]) <= 0.0);
        prop_assert_eq!(recession_cone_contains(&spec, &[0.3, 0.7], &p), polar);
    }

    #[test]
    fn hamiltonian_is_support_of_shifted_ball(v in planar(2.5), p in planar(3.0)) {
        let sampled = unit_circle(10_000)
            .iter()
            .map(|e| p[0] * (v[0] + e[0]) + p[1] * (v[1] + e[1]))
            .fold(f64::NEG_INFINITY, f64::max);
        let h = hamiltonian_with(&v, &p);
        prop_assert!((h - sampled).abs() <= 1e-3 * (1.0 + h.abs()));
    }

    #[test]
    fn truncations_decrease_to_hamiltonian(v in planar(2.5), p in planar(20.0)) {
        let h = hamiltonian_with(&v, &p);
        let mut prev = f64::INFINITY;
        for k in [1.0, 2.0, 4.0, 8.0] {
            let hk = coercive_hamiltonian_with(&v, k, &p);
            prop_assert!(hk >= h - 1e-12);
            prop_assert!(hk <= prev + 1e-12);
            prev = hk;
        }
    }

    #[test]
    fn truncated_support_increases_with_k(v in planar(2.5), q in unit()) {
        let s1 = sigma_truncated_with(&v, 1.0, 1.0, &q);
        let s3 = sigma_truncated_with(&v, 3.0, 1.0, &q);
        let s = sigma_with(&v, &q);
        prop_assert!(s1 <= s3 + 1e-9);
        prop_assert!(s3 <= s + 1e-9);
    }

    #[test]
    fn nested_control_sets(
        x in prop::array::uniform2(0.0f64..1.0),
        dir in unit(),
        frac in 0.0f64..1.0,
        d1 in 0.1f64..0.9,
        gap in 0.01f64..0.1,
    ) {
        let spec = VectorFieldSpec::shear_sin(2.0);
        let (lip, _) = field_constants(&spec, &TorusGrid::cube(2, 64).unwrap());
        let d2 = (d1 + gap).min(1.0);
        let r = frac * (d2 - d1) / lip;
        let y = [x[0] + r * dir[0], x[1] + r * dir[1]];
        let small = ControlSetQuery::at(&spec, &x, d1);
        let big = ControlSetQuery::at(&spec, &y, d2);
        for q in small.sample_extreme_points(64) {
            prop_assert!(gauge_membership(&big, &q, 1e-9));
        }
    }
}

#[test]
fn control_set_contains_origin_and_center() {
    for v in [[0.0, 0.0], [0.4, -0.2], [2.0, 0.0], [-1.5, 1.5]] {
        for delta in [0.25, 1.0] {
            let q = ControlSetQuery { center: v.to_vec(), radius: delta };
            assert!(gauge_membership(&q, &[0.0, 0.0], 0.0));
            assert!(gauge_membership(&q, &v, 1e-12));
        }
    }
}

#[test]
fn support_vanishes_only_at_zero() {
    let v = [1.7, 0.3];
    assert_eq!(sigma_with(&v, &[0.0, 0.0]), 0.0);
    for e in unit_circle(64) {
        assert!(sigma_with(&v, &e) > 0.0);
    }
}
