use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use susywalk::chiral::index_alpha;
use susywalk::matcore::eig_unitary;
use susywalk::models::{grover_search, grover_walk, Graph};
use susywalk::random::random_pair;
use susywalk::{verify_spectral_mapping, Tolerance};

fn random_pairs(c: &mut Criterion) {
    let tol = Tolerance::default();
    let mut group = c.benchmark_group("random_pair");
    for dim in [8, 16, 32, 64] {
        let pair = random_pair(dim, &mut ChaCha8Rng::seed_from_u64(dim as u64), tol).unwrap();
        group.bench_with_input(BenchmarkId::new("index_alpha", dim), &pair, |b, p| {
            b.iter(|| index_alpha(black_box(p)))
        });
        group.bench_with_input(BenchmarkId::new("eig_unitary", dim), &pair, |b, p| {
            b.iter(|| eig_unitary(black_box(p.evolution()), &tol))
        });
        group.bench_with_input(BenchmarkId::new("verify", dim), &pair, |b, p| {
            b.iter(|| verify_spectral_mapping(black_box(p)))
        });
    }
    group.finish();
}

fn models(c: &mut Criterion) {
    let tol = Tolerance::default();
    let mut group = c.benchmark_group("models");
    group.sample_size(10);
    for n in [3u32, 5] {
        let pair = grover_search(n, 1, tol).unwrap();
        group.bench_with_input(
            BenchmarkId::new("grover_search_verify", n),
            &pair,
            |b, p| b.iter(|| verify_spectral_mapping(black_box(p))),
        );
    }
    let k6 = grover_walk(&Graph::complete(6).unwrap(), tol).unwrap();
    group.bench_function("grover_walk_k6_verify", |b| {
        b.iter(|| verify_spectral_mapping(black_box(&k6)))
    });
    group.finish();
}

criterion_group!(benches, random_pairs, models);
criterion_main!(benches);
