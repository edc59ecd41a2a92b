use bandnorm::ensembles::{sample_band, sample_gue, EnsembleSpec};
use bandnorm::linalg::lanczos::largest_eigenvalue;
use bandnorm::linalg::{eigenvalues_with, EigenRoute, LanczosOptions};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

fn dense_eigen(c: &mut Criterion) {
    let mut g = c.benchmark_group("dense_eigen");
    g.sample_size(10);
    for n in [64, 256] {
        let h = sample_gue(&EnsembleSpec::gue(n, 1.0, 7), 0).unwrap();
        g.bench_with_input(BenchmarkId::new("direct", n), &h, |b, h| {
            b.iter(|| black_box(eigenvalues_with(h, EigenRoute::Direct).unwrap()))
        });
        g.bench_with_input(BenchmarkId::new("real_embedding", n), &h, |b, h| {
            b.iter(|| black_box(eigenvalues_with(h, EigenRoute::RealEmbedding).unwrap()))
        });
        g.bench_with_input(BenchmarkId::new("lanczos", n), &h, |b, h| {
            b.iter(|| black_box(largest_eigenvalue(h, &LanczosOptions::default())))
        });
    }
    g.finish();
}

fn band_kernels(c: &mut Criterion) {
    let mut g = c.benchmark_group("band");
    g.sample_size(10);
    let m = sample_band(&EnsembleSpec::band(2048, 64, 1.0, 9), 0).unwrap();
    g.bench_function("lanczos_2048_64", |b| {
        b.iter(|| black_box(largest_eigenvalue(&m, &LanczosOptions::default())))
    });
    g.bench_function("trace_powers_8_2048_64", |b| {
        b.iter(|| black_box(m.trace_power_means(8)))
    });
    g.bench_function("site_diagonal_16_2048_64", |b| {
        b.iter(|| black_box(m.site_power_diagonal(1024, 16)))
    });
    g.finish();
}

criterion_group!(benches, dense_eigen, band_kernels);
criterion_main!(benches);
