use std::collections::BTreeSet;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hermix_core::verify::random_mixed_graph;
use hermix_core::{
    build_l, det, offdiag_minor_l, principal_minor_q, run_sweep, spanning_trees_kirchhoff, CheckId,
    GraphSource, MixedGraph, OrientationMode, SweepSpec,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn graph(n: usize, m: usize, seed: u64) -> MixedGraph {
    random_mixed_graph(n, m, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn determinants(c: &mut Criterion) {
    let mut group = c.benchmark_group("det_l");
    for n in [8, 16, 32] {
        let l = build_l(&graph(n, 2 * n, n as u64));
        group.bench_with_input(BenchmarkId::from_parameter(n), &l, |b, l| {
            b.iter(|| det(black_box(l)).unwrap())
        });
    }
    group.finish();

    let g = graph(24, 60, 1);
    c.bench_function("kirchhoff_24", |b| {
        b.iter(|| spanning_trees_kirchhoff(black_box(&g)))
    });
}

fn minors(c: &mut Criterion) {
    let g = graph(6, 9, 2);
    let all: BTreeSet<usize> = (1..=6).collect();
    let v1: BTreeSet<usize> = [1, 2, 3].into();
    let v2: BTreeSet<usize> = [2, 4, 5].into();
    c.bench_function("principal_minor_q_full_6", |b| {
        b.iter(|| principal_minor_q(black_box(&g), &all).unwrap())
    });
    c.bench_function("offdiag_minor_l_3_of_6", |b| {
        b.iter(|| offdiag_minor_l(black_box(&g), &v1, &v2).unwrap())
    });
}

fn sweeps(c: &mut Criterion) {
    let mut spec = SweepSpec::new(
        "bench",
        GraphSource::Catalog {
            min_vertices: 1,
            max_vertices: 4,
        },
        vec![
            CheckId::CycleDets,
            CheckId::SingularityL,
            CheckId::SingularityQ,
        ],
    );
    spec.orientations = OrientationMode::Exhaustive;
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    group.bench_function("singularity_catalog_4", |b| {
        b.iter(|| run_sweep(black_box(&spec)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, determinants, minors, sweeps);
criterion_main!(benches);
