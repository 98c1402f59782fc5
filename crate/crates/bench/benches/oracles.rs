use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use motive_series::blowup::{auto_resolve, DivisorialOracle, Modification};
use motive_series::curve::HilbertOracle;
use motive_series::filtration::{series, HilbertFunction, SeriesKind};
use motive_series::fixtures;
use motive_series::ExpVec;

// fresh oracles each iteration, so the rank caches start empty
fn jet_rank(c: &mut Criterion) {
    let hi = ExpVec::filled(2, 6);
    c.bench_function("jet oracle Pg of C on [0,6]^2", |b| {
        b.iter(|| series(&HilbertOracle::new(fixtures::curve_c()), SeriesKind::Pg, black_box(&hi)).unwrap())
    });
    c.bench_function("jet oracle h of cusp at 20", |b| {
        b.iter(|| HilbertOracle::new(fixtures::cusp()).h(black_box(&ExpVec(vec![20]))).unwrap())
    });
}

fn divisorial(c: &mut Criterion) {
    let m = Modification::from_script(&fixtures::cusp_script()).unwrap();
    let w = ExpVec(vec![4, 6, 12]);
    c.bench_function("divisorial oracle h at (4,6,12)", |b| {
        b.iter(|| DivisorialOracle::new(m.clone()).unwrap().h(black_box(&w)).unwrap())
    });
}

fn resolution(c: &mut Criterion) {
    let curve = fixtures::transverse_lines();
    c.bench_function("auto_resolve lines", |b| b.iter(|| auto_resolve(black_box(&curve)).unwrap()));
    let cusp = fixtures::cusp();
    c.bench_function("auto_resolve cusp", |b| b.iter(|| auto_resolve(black_box(&cusp)).unwrap()));
}

criterion_group!(benches, jet_rank, divisorial, resolution);
criterion_main!(benches);
