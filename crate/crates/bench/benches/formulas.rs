use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use motive_series::fixtures;
use motive_series::formulas::{eq11_product, theorem1_series, theorem2_series, theorem3_series};
use motive_series::ExpVec;

fn closed_sums(c: &mut Criterion) {
    let cusp = fixtures::cusp_graph();
    let arrowed = cusp.with_arrows(vec![2]).unwrap();
    let hi1 = ExpVec(vec![24]);
    let hi3 = ExpVec::filled(3, 8);
    c.bench_function("curve closed sum, cusp to 24", |b| {
        b.iter(|| theorem1_series(black_box(&arrowed), &hi1).unwrap())
    });
    c.bench_function("divisorial closed sum, cusp to 8", |b| {
        b.iter(|| theorem2_series(black_box(&cusp), &hi3).unwrap())
    });
    c.bench_function("semigroup rational function, cusp to 8", |b| {
        b.iter(|| theorem3_series(black_box(&cusp), &hi3).unwrap())
    });
    c.bench_function("edge product, cusp to 8", |b| {
        b.iter(|| eq11_product(black_box(&cusp), &hi3).unwrap())
    });
}

criterion_group!(benches, closed_sums);
criterion_main!(benches);
