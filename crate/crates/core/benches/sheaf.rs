//! Rayon pool vs a single worker on the data-parallel hot paths. Build with
//! `--no-default-features` to measure the purely sequential fallback instead.

use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use kl_sheaves::bmsheaf::{build_bm, DEFAULT_CAP_MARGIN};
use kl_sheaves::conjectures::{genmaps_sample, GenericMapProblem, GenmapsParams};
use kl_sheaves::coxeter::{enumerate_ball, CoxeterSystem};
use kl_sheaves::hecke::HeckeAlgebra;

fn pools() -> Vec<(&'static str, rayon::ThreadPool)> {
    let default = rayon::ThreadPoolBuilder::new().build().unwrap();
    let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    vec![("pool", default), ("single", single)]
}

fn bench_build(c: &mut Criterion) {
    let sys = CoxeterSystem::type_a(3);
    let ball = Arc::new(enumerate_ball(&sys, 6));
    let mut group = c.benchmark_group("build_bm");
    group.sample_size(10);
    for w in ["s2 s1 s3 s2", "s1 s2 s1 s3 s2 s1"] {
        let x = ball.parse(w).unwrap();
        for (name, pool) in pools() {
            group.bench_with_input(BenchmarkId::new(name, w), &x, |b, &x| {
                b.iter(|| pool.install(|| build_bm(&ball, x, DEFAULT_CAP_MARGIN).unwrap()))
            });
        }
    }
    group.finish();
}

fn bench_kl(c: &mut Criterion) {
    let sys = CoxeterSystem::type_a(3);
    let ball = Arc::new(enumerate_ball(&sys, 6));
    let mut group = c.benchmark_group("kl_basis_all");
    for (name, pool) in pools() {
        group.bench_function(name, |b| {
            b.iter(|| {
                pool.install(|| {
                    let alg = HeckeAlgebra::new(ball.clone());
                    for x in ball.ids() {
                        alg.kl_basis(x).unwrap();
                    }
                })
            })
        });
    }
    group.finish();
}

fn bench_genmaps(c: &mut Criterion) {
    let params = GenmapsParams {
        problem: GenericMapProblem { l: 2, ks: vec![2, 0], r: 2 },
        trials: 50,
        seed: 0,
        coeff_range: 10,
    };
    let mut group = c.benchmark_group("genmaps_sample");
    group.sample_size(10);
    for (name, pool) in pools() {
        group.bench_function(name, |b| b.iter(|| pool.install(|| genmaps_sample(&params).unwrap())));
    }
    group.finish();
}

criterion_group!(benches, bench_build, bench_kl, bench_genmaps);
criterion_main!(benches);
