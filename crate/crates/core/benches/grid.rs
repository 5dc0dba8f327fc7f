// SPDX-License-Identifier: Apache-2.0

use criterion::{criterion_group, criterion_main, Criterion};
use dualq::harness::{run_batch, run_batch_sequential};
use dualq::workload::{basic_scenario, GRID_AQMS};

fn bench_grid(c: &mut Criterion) {
    let scenarios: Vec<_> = GRID_AQMS.iter().map(|&aqm| basic_scenario(aqm, 12.0, 10.0, 5.0, 1)).collect();
    let mut group = c.benchmark_group("basic_grid_slice");
    group.sample_size(10);
    group.bench_function("sequential", |b| b.iter(|| run_batch_sequential(&scenarios)));
    group.bench_function("batch", |b| b.iter(|| run_batch(&scenarios)));
    group.finish();
}

criterion_group!(benches, bench_grid);
criterion_main!(benches);
