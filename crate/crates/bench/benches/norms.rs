use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use radialfs_bench::{dense_grid, shell_profile};
use radialfs_core::decay::surrogate_norm;
use radialfs_core::decomposition::{lp_besov_norm_1d, spherical_mean_wavelet_coeffs};
use radialfs_core::seq::{seq_norm_bspqd, seq_norm_fspqd};
use radialfs_core::{weighted_lp_norm, SpaceParams};

fn profile_norms(c: &mut Criterion) {
    let params = SpaceParams::b(1.0, 2.0, 2.0, 2).unwrap();
    let mut group = c.benchmark_group("profile-norms");
    group.sample_size(10);
    for levels in [8, 10, 12] {
        let g = shell_profile(levels);
        group.bench_with_input(BenchmarkId::new("weighted_lp", levels), &g, |b, g| {
            b.iter(|| weighted_lp_norm(g, 2.0, 2).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("lp_besov_1d", levels), &g, |b, g| {
            b.iter(|| lp_besov_norm_1d(g, &params, true).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("tb_surrogate", levels), &g, |b, g| {
            b.iter(|| surrogate_norm(g, &params).unwrap())
        });
    }
    group.finish();
}

fn sequence_norms(c: &mut Criterion) {
    let mut group = c.benchmark_group("sequence-norms");
    for top in [4, 8] {
        let grid = dense_grid(top);
        let bp = SpaceParams::b(0.5, 1.5, 2.0, 3).unwrap();
        let fp = SpaceParams::f(0.5, 1.5, 2.0, 3).unwrap();
        group.bench_with_input(BenchmarkId::new("b", top), &grid, |b, g| b.iter(|| seq_norm_bspqd(g, &bp).unwrap()));
        group.bench_with_input(BenchmarkId::new("f", top), &grid, |b, g| b.iter(|| seq_norm_fspqd(g, &fp).unwrap()));
    }
    group.finish();
}

fn wavelets(c: &mut Criterion) {
    let mut group = c.benchmark_group("spherical-mean-wavelet");
    group.sample_size(10);
    group.bench_function("d2_j4", |b| b.iter(|| spherical_mean_wavelet_coeffs(2, 1.0, 4).unwrap()));
    group.finish();
}

criterion_group!(benches, profile_norms, sequence_norms, wavelets);
criterion_main!(benches);
