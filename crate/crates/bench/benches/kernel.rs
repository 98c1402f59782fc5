use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use motive_series::{expand_rational, ExpVec, LaurentPoly, MPoly, MSeries};

fn geometric(c: &mut Criterion) {
    let one = LaurentPoly::one();
    let l = LaurentPoly::lefschetz();
    let factors = vec![
        (one.clone(), ExpVec(vec![1, 1, 2])),
        (l.clone(), ExpVec(vec![1, 1, 2])),
        (one.clone(), ExpVec(vec![2, 3, 6])),
        (l, ExpVec(vec![1, 2, 3])),
    ];
    let hi = ExpVec::filled(3, 12);
    c.bench_function("expand_rational 3 vars to 12", |b| {
        b.iter(|| expand_rational(black_box(&MPoly::one(3)), &factors, &hi).unwrap())
    });
}

fn products(c: &mut Criterion) {
    let hi = ExpVec::filled(2, 16);
    let f = expand_rational(&MPoly::one(2), &[(LaurentPoly::one(), ExpVec(vec![1, 2]))], &hi).unwrap();
    let g = expand_rational(&MPoly::one(2), &[(LaurentPoly::lefschetz(), ExpVec(vec![3, 1]))], &hi).unwrap();
    c.bench_function("series product 2 vars to 16", |b| {
        b.iter(|| black_box(&f).mul(black_box(&g)).unwrap())
    });
    let s: MSeries = f.mul(&g).unwrap();
    c.bench_function("series json roundtrip", |b| {
        b.iter(|| MSeries::from_json(&black_box(&s).to_json()).unwrap())
    });
}

criterion_group!(benches, geometric, products);
criterion_main!(benches);
