use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use gridrecov_core::graph::{count_saps, enumerate_filled_regions, EnumerationCaps};
use gridrecov_core::inference::{gamma, map_full, marginals, max_agreement_edges, two_step};
use gridrecov_core::noise::sample_observations;
use gridrecov_core::oracles::brute_force_max;
use gridrecov_core::{build_grid, GridGraph, Labeling, NoiseParams, Observations};

fn instance(rows: usize, cols: usize, p: f64, q: f64) -> (GridGraph, Observations) {
    let grid = build_grid(rows, cols).unwrap();
    let truth = Labeling::all_plus(grid.n());
    let obs = sample_observations(&grid, &truth, &NoiseParams::new(p, q).unwrap(), 1).unwrap();
    (grid, obs)
}

fn solvers(c: &mut Criterion) {
    let mut group = c.benchmark_group("solvers");
    group.sample_size(10);
    let (grid, obs) = instance(20, 20, 0.04, 0.4);
    group.bench_function("two_step_20x20", |b| b.iter(|| two_step(black_box(&grid), obs.signals()).unwrap()));
    let (grid, obs) = instance(12, 12, 0.04, 0.4);
    group.bench_function("edge_only_12x12", |b| b.iter(|| max_agreement_edges(black_box(&grid), obs.signals()).unwrap()));
    let w = gamma(0.04, 0.4).unwrap();
    group.bench_function("map_full_12x12", |b| b.iter(|| map_full(black_box(&grid), obs.signals(), w).unwrap()));
    group.bench_function("marginals_12x12", |b| b.iter(|| marginals(black_box(&grid), obs.signals(), 0.04, 0.4).unwrap()));
    let (grid, obs) = instance(4, 4, 0.1, 0.3);
    group.bench_function("brute_force_4x4", |b| b.iter(|| brute_force_max(black_box(&grid), obs.signals(), 0.0).unwrap()));
    group.finish();
}

fn combinatorics(c: &mut Criterion) {
    let mut group = c.benchmark_group("combinatorics");
    group.sample_size(10);
    let grid = build_grid(5, 5).unwrap();
    group.bench_function("filled_regions_5x5_b10", |b| {
        b.iter(|| enumerate_filled_regions(black_box(&grid), 10, EnumerationCaps::default()).unwrap())
    });
    group.bench_function("polygon_census_12", |b| b.iter(|| count_saps(black_box(12)).unwrap()));
    group.finish();
}

criterion_group!(benches, solvers, combinatorics);
criterion_main!(benches);
