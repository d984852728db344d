//! Hot-loop benchmarks: sumset convolution, divisibility quotients, the
//! decomposability kernel behind the density counts, and full factorization
//! of the canonical interval example.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use powmon_core::budget::Budget;
use powmon_core::density::{count_exact, DensityVariant};
use powmon_core::factor::{divides, factorizations, Ambient};
use powmon_core::set::FiniteSet;

fn dense_set(max: u32, stride: u32) -> FiniteSet {
    FiniteSet::from_elements((0..=max).filter(|x| x % stride != 1)).unwrap()
}

fn bench_sumset(c: &mut Criterion) {
    let a = dense_set(512, 3);
    let b = dense_set(768, 5);
    c.bench_function("sumset_512_768", |bench| {
        bench.iter(|| black_box(&a).sumset(black_box(&b)).unwrap())
    });
    let small: FiniteSet = "{0,1,3}".parse().unwrap();
    c.bench_function("k_fold_{0,1,3}_x64", |bench| {
        bench.iter(|| black_box(&small).k_fold(64).unwrap())
    });
}

fn bench_divides(c: &mut Criterion) {
    let ambient = Ambient::restricted_natural();
    let a = dense_set(256, 7);
    let b: FiniteSet = "{0,2,3}".parse().unwrap();
    c.bench_function("divides_pair_into_256", |bench| {
        bench.iter(|| divides(black_box(&b), black_box(&a), &ambient).unwrap())
    });
}

fn bench_density_kernel(c: &mut Criterion) {
    let budget = Budget::unlimited();
    c.bench_function("count_exact_restricted_n14", |bench| {
        bench.iter(|| count_exact(14, &DensityVariant::Restricted, None, &budget).unwrap())
    });
}

fn bench_factorize(c: &mut Criterion) {
    let ambient = Ambient::restricted_natural();
    let target: FiniteSet = "[0,6]".parse().unwrap();
    c.bench_function("factorize_interval_six", |bench| {
        bench.iter(|| {
            let budget = Budget::unlimited();
            factorizations(black_box(&target), &ambient, &budget).unwrap()
        })
    });
}

criterion_group!(
    kernels,
    bench_sumset,
    bench_divides,
    bench_density_kernel,
    bench_factorize
);
criterion_main!(kernels);
