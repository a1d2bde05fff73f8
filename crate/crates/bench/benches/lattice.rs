use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use instanton_core::lattice::{
    enumerate_weyl_group, ib_fixture, les_restriction, random_round_trip, torelli_match, DEFAULT_WORD_BOUND,
};
use instanton_core::numerics::{smith_normal_form, IntMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn smith(c: &mut Criterion) {
    let mut group = c.benchmark_group("les_restriction");
    for b in [2, 5, 9] {
        let m = ib_fixture(b, 0).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(b), &m, |bch, m| bch.iter(|| les_restriction(black_box(m)).unwrap()));
    }
    group.finish();
    let rows: Vec<Vec<i64>> = (0..10).map(|i| (0..10).map(|j| ((i * 7 + j * 13) % 11) as i64 - 5).collect()).collect();
    let m = IntMatrix::from_rows(&rows).unwrap();
    c.bench_function("smith_normal_form/10x10", |b| b.iter(|| smith_normal_form(black_box(&m))));
}

fn weyl(c: &mut Criterion) {
    let mut group = c.benchmark_group("enumerate_weyl_group");
    for rank in [1, 2, 3] {
        let m = ib_fixture(2, rank).unwrap();
        group.bench_with_input(BenchmarkId::new("A", rank), &m, |b, m| {
            b.iter(|| enumerate_weyl_group(&m.lattice, black_box(&m.nodal), DEFAULT_WORD_BOUND).unwrap())
        });
    }
    group.finish();
}

fn torelli(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let case = random_round_trip(&mut rng, 6).unwrap();
    c.bench_function("torelli_match/random_case", |b| {
        b.iter(|| torelli_match(&case.source, &case.target, black_box(&case.mu), DEFAULT_WORD_BOUND).unwrap())
    });
}

criterion_group!(benches, smith, weyl, torelli);
criterion_main!(benches);
