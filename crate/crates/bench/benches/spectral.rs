use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hodgelink_bench::random_ladder;
use hodgelink_core::spectral::{betti_1, spectrum_decomposition};
use hodgelink_core::{lift, verify_lifting_identity};

fn spectra(c: &mut Criterion) {
    let mut group = c.benchmark_group("spectral");
    group.sample_size(10);
    for (n, x) in random_ladder(&[20, 40, 60], 0.2, 0.5) {
        group.bench_with_input(BenchmarkId::new("lifting_identity", n), &x, |b, x| {
            b.iter(|| verify_lifting_identity(black_box(x)).unwrap())
        });
        let g = lift(&x);
        group.bench_with_input(BenchmarkId::new("decomposition", n), &g, |b, g| {
            b.iter(|| spectrum_decomposition(black_box(g)).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("betti_1", n), &x, |b, x| b.iter(|| betti_1(black_box(x)).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, spectra);
criterion_main!(benches);
