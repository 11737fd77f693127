use criterion::{criterion_group, criterion_main, Criterion};
use dforge_bench::{small_matrices, x_polynomial};
use dforge_core::diff_poly::eliminate_x;
use dforge_core::fixtures;
use dforge_core::formal_eval::{prop3_threshold, substitute};
use dforge_core::lattice::hermite_normal_form;
use dforge_core::obstruction::{finite_basis_certificate, ExponentStream};
use dforge_core::transforms::check_hilbert_zeta;
use dforge_core::wronskian::derive_ade;
use num_bigint::BigInt;
use std::hint::black_box;

fn series(c: &mut Criterion) {
    let z = fixtures::zeta(200);
    c.bench_function("zeta200 square", |b| b.iter(|| black_box(&z).mul(&z).unwrap()));
    let g = fixtures::geometric(40);
    let f = fixtures::geometric_equation();
    c.bench_function("geometric40 substitute", |b| b.iter(|| substitute(&f, black_box(&g), None).unwrap()));
    c.bench_function("geometric40 prop3", |b| b.iter(|| prop3_threshold(&f, black_box(&g)).unwrap()));
}

fn algebra(c: &mut Criterion) {
    let p = x_polynomial(3);
    c.bench_function("eliminate_x deg 3", |b| b.iter(|| eliminate_x(black_box(&p)).unwrap()));
    let ms: Vec<Vec<Vec<BigInt>>> = small_matrices(100, 4)
        .into_iter()
        .map(|m| m.into_iter().map(|r| r.into_iter().map(BigInt::from).collect()).collect())
        .collect();
    c.bench_function("hnf 100 x 4x4", |b| {
        b.iter(|| ms.iter().map(|m| hermite_normal_form(m).len()).sum::<usize>())
    });
}

fn searches(c: &mut Criterion) {
    let idx: Vec<u64> = (1..=1000).collect();
    c.bench_function("finite basis n<=1000", |b| {
        b.iter(|| finite_basis_certificate(ExponentStream::Indices(black_box(&idx)), 10).unwrap())
    });
    let g = fixtures::geometric(12);
    let mut group = c.benchmark_group("slow");
    group.sample_size(10);
    group.bench_function("derive_ade geometric W3", |b| b.iter(|| derive_ade(black_box(&g), 3, None).unwrap()));
    group.bench_function("hilbert n20 mu3 nu3", |b| b.iter(|| check_hilbert_zeta(20, 3, 3).unwrap()));
    group.finish();
}

criterion_group!(benches, series, algebra, searches);
criterion_main!(benches);
