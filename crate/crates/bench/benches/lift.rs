use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use hodgelink_bench::ladder;
use hodgelink_core::{lift, normalized_l1, transition_matrix};

fn construction(c: &mut Criterion) {
    let mut group = c.benchmark_group("lift");
    group.sample_size(20);
    for (size, x) in ladder() {
        group.throughput(Throughput::Elements(size as u64));
        group.bench_with_input(BenchmarkId::new("lifted_adjacency", size), &x, |b, x| b.iter(|| lift(black_box(x))));
        group.bench_with_input(BenchmarkId::new("normalized_l1", size), &x, |b, x| {
            b.iter(|| normalized_l1(black_box(x)).unwrap())
        });
        let g = lift(&x);
        group.bench_with_input(BenchmarkId::new("transition", size), &g, |b, g| {
            b.iter(|| transition_matrix(black_box(g)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, construction);
criterion_main!(benches);
