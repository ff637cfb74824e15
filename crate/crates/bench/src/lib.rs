//! Shared fixtures for the benchmarks.

use homog_core::metric::{build_weights, EdgeWeighting, WeightTable};
use homog_core::{TorusGrid, VectorFieldSpec};

/// Shear of amplitude 2, the standard benchmark field.
pub fn shear() -> VectorFieldSpec {
    VectorFieldSpec::shear_sin(2.0)
}

pub fn planar_grid(n: usize) -> TorusGrid {
    TorusGrid::cube(2, n).expect("valid resolution")
}

/// Truncated tilted weights at level `a` for `P = e₁`.
pub fn tilted_table(n: usize, k: u32, a: f64) -> WeightTable {
    let w = EdgeWeighting::new(2, a)
        .with_tilt(vec![1.0, 0.0])
        .with_truncation(Some(k));
    build_weights(&shear(), &planar_grid(n), &w).expect("valid weighting")
}

/// Deterministic `(V, q)` pairs with `|V| ≤ 2.5` and unit `q`.
pub fn sigma_queries(count: usize) -> Vec<([f64; 2], [f64; 2])> {
    (0..count)
        .map(|i| {
            let t = i as f64 / count as f64;
            let a = std::f64::consts::TAU * t;
            let b = std::f64::consts::TAU * (0.37 + 3.0 * t);
            let r = 2.5 * ((7 * i) % count) as f64 / count as f64;
            ([r * a.cos(), r * a.sin()], [b.cos(), b.sin()])
        })
        .collect()
}
