//! Compares one worker thread against the machine's full pool on the two
//! embarrassingly parallel entry points. With the `parallel` feature off the
//! pool is ignored and both rows measure the sequential path.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dormwave_core::particles::{rightmost_speed, SimOptions};
use dormwave_core::wavespeed::{sweep_critical, SweepAxis};
use dormwave_core::{ModelParams, Variant};
use rayon::ThreadPoolBuilder;

fn thread_counts() -> Vec<usize> {
    let max = std::thread::available_parallelism().map_or(4, |n| n.get());
    if max > 1 {
        vec![1, max]
    } else {
        vec![1]
    }
}

fn bench_rightmost_speed(c: &mut Criterion) {
    let params = ModelParams::unit(Variant::SeedBank);
    let opts = SimOptions::default();
    let mut group = c.benchmark_group("rightmost_speed/t4_x256");
    group.sample_size(10);
    for threads in thread_counts() {
        let pool = ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool");
        group.bench_with_input(BenchmarkId::from_parameter(threads), &threads, |b, _| {
            b.iter(|| pool.install(|| rightmost_speed(&params, 4.0, 256, 7, &opts).unwrap()));
        });
    }
    group.finish();
}

fn bench_sweep_critical(c: &mut Criterion) {
    let base = ModelParams::unit(Variant::SeedBank);
    let values: Vec<f64> = (0..64).map(|i| 0.25 + 0.12 * i as f64).collect();
    let mut group = c.benchmark_group("sweep_critical/s64");
    group.sample_size(10);
    for threads in thread_counts() {
        let pool = ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool");
        group.bench_with_input(BenchmarkId::from_parameter(threads), &threads, |b, _| {
            b.iter(|| pool.install(|| sweep_critical(SweepAxis::S, &values, &base).unwrap()));
        });
    }
    group.finish();
}

criterion_group!(benches, bench_rightmost_speed, bench_sweep_critical);
criterion_main!(benches);
