use proptest::prelude::*;

use homog_core::torus_grid::{inf_convolution, inf_convolution_with_argmin};
use homog_core::vector_field::{check_assumptions, field_constants};
use homog_core::{GridFunction, TorusGrid, VectorFieldSpec};

fn field8() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0f64..2.0, 64)
}

fn catalog() -> Vec<VectorFieldSpec> {
    vec![
        VectorFieldSpec::constant(vec![0.7, -0.4]),
        VectorFieldSpec::shear_sin(2.0),
        VectorFieldSpec::cellular(1.5),
        VectorFieldSpec::sink(2.0, vec![0.5, 0.5]),
    ]
}

proptest! {
    #[test]
    fn shift_by_period_is_identity(n in 4usize..12, m in 4usize..12, idx in 0usize..1000, axis in 0usize..2) {
        let g = TorusGrid::new(vec![n, m]).unwrap();
        let c = idx % g.len();
        let mut o = vec![0i64; 2];
        o[axis] = g.resolution()[axis] as i64;
        prop_assert_eq!(g.shift(c, &o), c);
        o[axis] = -o[axis];
        prop_assert_eq!(g.shift(c, &o), c);
        prop_assert!(g.center(c).iter().all(|&x| (0.0..1.0).contains(&x)));
    }

    #[test]
    fn inf_convolution_is_monotone(u in field8(), bump in field8(), delta in 0.001f64..0.5) {
        let g = TorusGrid::cube(2, 8).unwrap();
        let v: Vec<f64> = u.iter().zip(&bump).map(|(a, b)| a + b.abs()).collect();
        let u = GridFunction::new(g.clone(), u).unwrap();
        let v = GridFunction::new(g, v).unwrap();
        let ud = inf_convolution(&u, delta).unwrap();
        let vd = inf_convolution(&v, delta).unwrap();
        for i in 0..ud.values().len() {
            prop_assert!(ud.get(i) <= vd.get(i) + 1e-12);
            prop_assert!(ud.get(i) <= u.get(i) + 1e-12);
        }
    }

    #[test]
    fn inf_convolution_rises_as_delta_falls(u in field8(), d in 0.01f64..0.5) {
        let g = TorusGrid::cube(2, 8).unwrap();
        let u = GridFunction::new(g, u).unwrap();
        let wide = inf_convolution(&u, d).unwrap();
        let narrow = inf_convolution(&u, d / 4.0).unwrap();
        for i in 0..u.values().len() {
            prop_assert!(wide.get(i) <= narrow.get(i) + 1e-12);
        }
    }

    #[test]
    fn constants_bound_the_field(x in prop::array::uniform2(-3.0f64..3.0), y in prop::array::uniform2(-3.0f64..3.0), which in 0usize..4) {
        let spec = &catalog()[which];
        let (lip, sup) = field_constants(spec, &TorusGrid::cube(2, 64).unwrap());
        let vx = spec.eval(&x);
        let vy = spec.eval(&y);
        let dv = ((vx[0] - vy[0]).powi(2) + (vx[1] - vy[1]).powi(2)).sqrt();
        let dx = ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)).sqrt();
        prop_assert!(dv <= lip * dx + 1e-12);
        prop_assert!((vx[0] * vx[0] + vx[1] * vx[1]).sqrt() <= sup + 1e-12);
    }
}

fn max_divergence_error(spec: &VectorFieldSpec, n: usize) -> f64 {
    let h = 1.0 / n as f64;
    let g = TorusGrid::cube(2, n).unwrap();
    (0..g.len())
        .map(|c| {
            let x = g.center(c);
            let mut fd = 0.0;
            for a in 0..2 {
                let mut p = x.clone();
                let mut m = x.clone();
                p[a] += h;
                m[a] -= h;
                fd += (spec.eval(&p)[a] - spec.eval(&m)[a]) / (2.0 * h);
            }
            (fd - spec.divergence(&x)).abs()
        })
        .fold(0.0, f64::max)
}

#[test]
fn central_differences_converge_at_second_order() {
    for spec in [
        VectorFieldSpec::sink(2.0, vec![0.5, 0.5]),
        VectorFieldSpec::sink(1.0, vec![0.2, 0.7]),
    ] {
        let coarse = max_divergence_error(&spec, 64);
        let fine = max_divergence_error(&spec, 128);
        let ratio = coarse / fine;
        assert!((ratio - 4.0).abs() <= 0.8, "ratio {ratio}");
    }
    // divergence-free variants stay at round-off
    for spec in [VectorFieldSpec::shear_sin(2.0), VectorFieldSpec::cellular(1.5)] {
        assert!(max_divergence_error(&spec, 128) < 1e-9);
    }
}

#[test]
fn assumption_verdict_matches_threshold() {
    let g = TorusGrid::cube(2, 64).unwrap();
    for spec in catalog() {
        let r = check_assumptions(&spec, 0.35, &g).unwrap();
        assert_eq!(r.passes_a2, r.divergence_norm <= r.threshold);
    }
}

#[test]
fn optimal_pair_gap_shrinks() {
    let g = TorusGrid::cube(2, 128).unwrap();
    let u = GridFunction::from_fn(g, |x| ((x[0] - 0.5).powi(2) + (x[1] - 0.5).powi(2)).sqrt());
    let gaps: Vec<f64> = [0.1, 0.01, 0.001]
        .iter()
        .map(|&d| inf_convolution_with_argmin(&u, d).unwrap().max_gap_ratio())
        .collect();
    assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{gaps:?}");
}
