use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use zdcoh::sample::{
    random_finite_coboundary, random_pl_coboundary, random_section_finite_along, random_top_cocycle_with_class,
    SampleShape,
};
use zdcoh::{
    compact_primitive, full_support_primitive, solve_primitive, top_class, CoefficientRing, DiscreteSpace, Scalar,
    Sheaf, SupportFamily,
};

fn sheaf(d: usize) -> std::sync::Arc<Sheaf> {
    Sheaf::functions(DiscreteSpace::with_labels(d, 1, 2, CoefficientRing::Integers))
}

fn shape(terms: usize) -> SampleShape {
    SampleShape {
        terms,
        radius: 4,
        magnitude: 5,
    }
}

fn bench_solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_primitive");
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for d in 2..=4 {
        let w = random_finite_coboundary(&mut rng, &sheaf(d), d - 1, shape(6)).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(d), &w, |b, w| {
            b.iter(|| solve_primitive(black_box(w), &SupportFamily::Finite).unwrap())
        });
    }
    group.finish();
}

fn bench_top(c: &mut Criterion) {
    let mut group = c.benchmark_group("top_degree");
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for d in 1..=3 {
        let w = random_top_cocycle_with_class(&mut rng, &sheaf(d), shape(8)).unwrap();
        group.bench_with_input(BenchmarkId::new("top_class", d), &w, |b, w| {
            b.iter(|| top_class(black_box(w)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("full_support_primitive", d), &w, |b, w| {
            b.iter(|| full_support_primitive(black_box(w)).unwrap())
        });
    }
    group.finish();
}

fn bench_ray_primitive(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let s = random_section_finite_along(&mut rng, &sheaf(3), 2, shape(12)).unwrap();
    c.bench_function("ray_primitive", |b| b.iter(|| black_box(&s).ray_primitive(2).unwrap()));
}

fn bench_flows(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let s = Scalar::new(3.into(), 2.into());
    let (f, _) = random_pl_coboundary(&mut rng, &s, 12, 6).unwrap();
    c.bench_function("compact_primitive", |b| {
        b.iter(|| compact_primitive(black_box(&f), &s).unwrap())
    });
}

criterion_group!(benches, bench_solve, bench_top, bench_ray_primitive, bench_flows);
criterion_main!(benches);
