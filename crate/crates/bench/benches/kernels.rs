use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use homog_bench::{planar_grid, shear, sigma_queries, tilted_table};
use homog_core::dynamics::{build_reachability_graph, detect_invariant_sets, MarginPolicy, Side};
use homog_core::effective::{EffectiveOptions, EffectiveSolver};
use homog_core::geometry::{sigma_truncated_with, sigma_with};
use homog_core::hj_solver::{InitialData, OscillatoryScheme, SolverConfig};
use homog_core::metric::{bellman_ford_negative_cycle, shortest_path_field, EdgeGeometry, EdgeWeighting};
use homog_core::VectorFieldSpec;

fn support(c: &mut Criterion) {
    let qs = sigma_queries(1024);
    c.bench_function("sigma/1024", |b| {
        b.iter(|| qs.iter().map(|(v, q)| sigma_with(black_box(v), q)).sum::<f64>())
    });
    c.bench_function("sigma_truncated/1024", |b| {
        b.iter(|| {
            qs.iter()
                .map(|(v, q)| sigma_truncated_with(black_box(v), 8.0, 1.0, q))
                .filter(|s| s.is_finite())
                .sum::<f64>()
        })
    });
}

fn metric(c: &mut Criterion) {
    let mut g = c.benchmark_group("metric");
    g.sample_size(10);
    for n in [32usize, 64] {
        let grid = planar_grid(n);
        g.bench_with_input(BenchmarkId::new("edge_geometry", n), &grid, |b, grid| {
            b.iter(|| EdgeGeometry::new(&shear(), grid, 2).unwrap())
        });
        let geo = EdgeGeometry::new(&shear(), &grid, 2).unwrap();
        let w = EdgeWeighting::new(2, 1.0);
        let table = geo.weights(&w).unwrap();
        g.bench_with_input(BenchmarkId::new("dijkstra", n), &table, |b, t| {
            b.iter(|| shortest_path_field(t, 0).unwrap())
        });
        let tilted = tilted_table(n, 8, 2.5);
        g.bench_with_input(BenchmarkId::new("negative_cycle", n), &tilted, |b, t| {
            b.iter(|| bellman_ford_negative_cycle(t))
        });
    }
    g.finish();
}

fn dynamics(c: &mut Criterion) {
    let mut g = c.benchmark_group("invariant_sets");
    g.sample_size(10);
    let sink = VectorFieldSpec::sink(2.0, vec![0.5, 0.5]);
    for n in [64usize, 128] {
        let grid = planar_grid(n);
        g.bench_with_input(BenchmarkId::new("sink", n), &grid, |b, grid| {
            b.iter(|| {
                let graph =
                    build_reachability_graph(&sink, grid, 2, 0.05, Side::Inner, MarginPolicy::Report)
                        .unwrap();
                detect_invariant_sets(&graph).component_count
            })
        });
    }
    g.finish();
}

fn effective(c: &mut Criterion) {
    let mut g = c.benchmark_group("effective");
    g.sample_size(10);
    let solver = EffectiveSolver::new(
        &shear(),
        EffectiveOptions {
            resolution: 32,
            ..Default::default()
        },
    )
    .unwrap();
    g.bench_function("cycles_k4_32", |b| b.iter(|| solver.cycles(&[1.0, 0.0], 4, 1e-3).unwrap()));
    g.finish();
}

fn solver(c: &mut Criterion) {
    let mut g = c.benchmark_group("oscillatory");
    let config = SolverConfig::new(0.25, 0.5, 128);
    let scheme = OscillatoryScheme::new(&shear(), &config).unwrap();
    let u = scheme.sample(&InitialData::cone(vec![0.5, 0.5]));
    let mut next = vec![0.0; u.len()];
    g.bench_function("step_128", |b| b.iter(|| scheme.step(black_box(&u), &mut next, scheme.dt)));
    g.finish();
}

criterion_group!(benches, support, metric, dynamics, effective, solver);
criterion_main!(benches);
