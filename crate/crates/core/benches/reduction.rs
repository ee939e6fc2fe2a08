//! Compare the rayon-parallel exact reductions against the sequential
//! fallback on realistic workloads (sphere and disk sums at moderate N).

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use plasma_core::disk::{z_soft, z_soft_serial};
use plasma_core::sphere::{i_hat, i_hat_serial, z_sphere, z_sphere_serial};
use plasma_core::{expand, CoefficientTable, PlasmaParams};

fn table(n: usize, gamma: u32) -> CoefficientTable {
    expand(&PlasmaParams::new(n, gamma).unwrap()).unwrap()
}

fn bench_sphere_partition_sum(c: &mut Criterion) {
    let mut group = c.benchmark_group("z_sphere");
    for n in [6usize, 8] {
        let t = table(n, 4);
        group.bench_with_input(BenchmarkId::new("parallel", n), &t, |b, t| {
            b.iter(|| z_sphere(t))
        });
        group.bench_with_input(BenchmarkId::new("serial", n), &t, |b, t| {
            b.iter(|| z_sphere_serial(t))
        });
    }
    group.finish();
}

fn bench_sphere_moment(c: &mut Criterion) {
    let mut group = c.benchmark_group("i_hat_n2");
    for n in [6usize, 8] {
        let t = table(n, 4);
        group.bench_with_input(BenchmarkId::new("parallel", n), &t, |b, t| {
            b.iter(|| i_hat(t, 2).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("serial", n), &t, |b, t| {
            b.iter(|| i_hat_serial(t, 2).unwrap())
        });
    }
    group.finish();
}

fn bench_disk_partition_sum(c: &mut Criterion) {
    let mut group = c.benchmark_group("z_soft");
    for n in [6usize, 8] {
        let t = table(n, 4);
        group.bench_with_input(BenchmarkId::new("parallel", n), &t, |b, t| {
            b.iter(|| z_soft(t))
        });
        group.bench_with_input(BenchmarkId::new("serial", n), &t, |b, t| {
            b.iter(|| z_soft_serial(t))
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_sphere_partition_sum,
    bench_sphere_moment,
    bench_disk_partition_sum
);
criterion_main!(benches);
