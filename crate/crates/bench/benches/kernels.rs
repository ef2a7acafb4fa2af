use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use goe_charpoly::asymptotics::{c12_bulk, BulkParams};
use goe_charpoly::estimators::{estimate, QuantitySpec};
use goe_charpoly::linalg::{eigen_sym, sample_goe};
use goe_charpoly::specfun::{bessel_k0, bessel_k1, hermite_he_log};
use goe_charpoly::StreamKey;
use num_complex::Complex64;

fn linalg(c: &mut Criterion) {
    let mut rng = StreamKey::new(1, 0).stream();
    for n in [20usize, 80] {
        let h = sample_goe(n, 1.0, &mut rng).unwrap();
        c.bench_function(&format!("eigen_sym/{n}"), |b| b.iter(|| eigen_sym(black_box(&h)).unwrap()));
    }
}

fn specfun(c: &mut Criterion) {
    c.bench_function("bessel_k0_k1", |b| {
        b.iter(|| {
            let x = black_box(0.75);
            bessel_k0(x).unwrap() + bessel_k1(x).unwrap()
        })
    });
    c.bench_function("hermite_he_log/80", |b| b.iter(|| hermite_he_log(80, black_box(Complex64::new(3.1, 0.2)))));
}

fn closed_forms(c: &mut Criterion) {
    let p = BulkParams::new(0.3, 1.0, 80, &[0.5], &[1.0, -1.0]);
    c.bench_function("c12_bulk", |b| b.iter(|| c12_bulk(black_box(&p)).unwrap()));
}

fn monte_carlo(c: &mut Criterion) {
    let q = QuantitySpec::c12(0.0, 1.0, 40, 0.5, [1.0, -1.0]);
    let mut g = c.benchmark_group("estimate");
    g.sample_size(10);
    g.bench_function("c12/N40/2048", |b| b.iter(|| estimate(black_box(&q), 2048, 3).unwrap()));
    g.finish();
}

criterion_group!(benches, linalg, specfun, closed_forms, monte_carlo);
criterion_main!(benches);
