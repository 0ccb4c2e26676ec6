use cartan_core::algebra::{rat, smith_normal_form, Matrix, Polynomial};
use cartan_core::gcomplex::{cohomology_generic, cohomology_hilbert};
use cartan_core::gysin::{gysin_localized, ModelMap};
use cartan_core::models::builtin;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

fn hilbert(c: &mut Criterion) {
    let mut group = c.benchmark_group("hilbert");
    for name in ["s2_rotation", "circle_free", "c_alpha(1,-2)"] {
        let m = builtin(name).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(name), &m, |b, m| {
            b.iter(|| cohomology_hilbert(black_box(m), 12).unwrap())
        });
    }
    group.finish();
    c.bench_function("generic/c_alpha(1,-2)", |b| {
        let m = builtin("c_alpha(1,-2)").unwrap();
        b.iter(|| cohomology_generic(black_box(&m)).unwrap())
    });
}

/// `(u + i)^j (u − j)` in entry `(i, j)`: dense and of full rank.
fn snf_input(n: usize) -> Matrix<Polynomial> {
    let u = Polynomial::var(1, 0);
    Matrix::from_fn(n, n, Polynomial::zero(1), |i, j| {
        let a = &u + &Polynomial::constant(1, rat(i as i64 + 1));
        let b = &u - &Polynomial::constant(1, rat(j as i64));
        &a.pow(j as u32) * &b
    })
}

fn snf(c: &mut Criterion) {
    let mut group = c.benchmark_group("smith_normal_form");
    for n in [3usize, 4, 5] {
        let a = snf_input(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &a, |b, a| {
            b.iter(|| smith_normal_form(black_box(a)).unwrap())
        });
    }
    group.finish();
}

fn gysin(c: &mut Criterion) {
    let s2 = builtin("s2_rotation").unwrap();
    let pt = builtin("point").unwrap();
    let inclusion = ModelMap::fixed_point_inclusion(&s2, 0, &pt).unwrap();
    let collapse = ModelMap::constant(&s2, &pt).unwrap();
    c.bench_function("gysin/inclusion", |b| b.iter(|| gysin_localized(black_box(&inclusion)).unwrap()));
    c.bench_function("gysin/collapse", |b| b.iter(|| gysin_localized(black_box(&collapse)).unwrap()));
}

criterion_group!(benches, hilbert, snf, gysin);
criterion_main!(benches);
