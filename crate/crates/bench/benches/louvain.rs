use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hodgelink_bench::random_ladder;
use hodgelink_core::baselines::{partition_line_graph, BaselineOptions};
use hodgelink_core::{lift, partition_lifted, partition_supernode, LineGraphKind, PartitionOptions};

fn partitioning(c: &mut Criterion) {
    let mut group = c.benchmark_group("louvain");
    group.sample_size(10);
    let opts = PartitionOptions::default();
    for (n, x) in random_ladder(&[50, 100, 200], 0.1, 0.5) {
        let g = lift(&x);
        group.bench_with_input(BenchmarkId::new("lifted", n), &g, |b, g| {
            b.iter(|| partition_lifted(black_box(g), &opts).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("supernode", n), &g, |b, g| {
            b.iter(|| partition_supernode(black_box(g), &opts).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("line_graph_D", n), &x, |b, x| {
            b.iter(|| partition_line_graph(black_box(x), LineGraphKind::D, &BaselineOptions::default(), None).unwrap())
        });
    }
    let (_, x) = random_ladder(&[40], 0.15, 0.5).remove(0);
    let g = lift(&x);
    let stab = PartitionOptions { t: 3, ..opts };
    group.bench_function("supernode_t3_n40", |b| b.iter(|| partition_supernode(black_box(&g), &stab).unwrap()));
    group.finish();
}

criterion_group!(benches, partitioning);
criterion_main!(benches);
