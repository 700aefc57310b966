use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use spinframe_core::{
    collective, fidelity, haar_random_state, haar_random_u2, haar_random_unitary, signature, Convention,
    PairFamily, SubsystemSpec,
};

fn reduce(c: &mut Criterion) {
    let mut group = c.benchmark_group("reduce");
    for n in [6usize, 8, 10] {
        let state = haar_random_state(n, 1).unwrap();
        let keep = SubsystemSpec::new(vec![n, 1]).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| state.reduce(black_box(&keep)).unwrap())
        });
    }
    group.finish();
}

fn fidelity_kernel(c: &mut Criterion) {
    let mut group = c.benchmark_group("fidelity");
    for k in [1usize, 2, 3] {
        let state = haar_random_state(2 * k + 1, 2).unwrap();
        let a: Vec<usize> = (1..=k).collect();
        let b: Vec<usize> = (k + 1..=2 * k).collect();
        let rho = state.reduce(&SubsystemSpec::new(a).unwrap()).unwrap();
        let sigma = state.reduce(&SubsystemSpec::new(b).unwrap()).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(1 << k), &k, |bench, _| {
            bench.iter(|| fidelity(black_box(&rho), black_box(&sigma)).unwrap())
        });
    }
    group.finish();
}

fn signature_kernel(c: &mut Criterion) {
    let mut group = c.benchmark_group("signature");
    group.sample_size(20);
    for n in [4usize, 6, 8] {
        let state = haar_random_state(n, 3).unwrap();
        group.bench_with_input(BenchmarkId::new("single", n), &n, |b, _| {
            b.iter(|| signature(&state, &PairFamily::single_spin(), Convention::Sqrt).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("tuples2", n), &n, |b, _| {
            b.iter(|| signature(&state, &PairFamily::tuples(2, true), Convention::Sqrt).unwrap())
        });
    }
    group.finish();
}

fn unitaries(c: &mut Criterion) {
    let mut group = c.benchmark_group("unitaries");
    group.sample_size(20);
    let v = haar_random_u2(4);
    for n in [4usize, 6, 8] {
        group.bench_with_input(BenchmarkId::new("collective", n), &n, |b, &n| {
            b.iter(|| collective(&v, n).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("haar", n), &n, |b, &n| {
            b.iter(|| haar_random_unitary(1 << n, black_box(5)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, reduce, fidelity_kernel, signature_kernel, unitaries);
criterion_main!(benches);
