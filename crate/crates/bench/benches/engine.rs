use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nangle_bench::{exact, octa, pair, splice, square_matrix};
use nangle_core::cluster::n4star_steps;
use nangle_core::decompose::decompose_exact;
use nangle_core::engine::{cone_completion, higher_octahedron, n4_from_n4star, SearchBudget};
use std::hint::black_box;

fn linear_algebra(c: &mut Criterion) {
    let mut g = c.benchmark_group("rref");
    for n in [8, 32, 64] {
        let m = square_matrix(n, 1);
        g.bench_with_input(BenchmarkId::from_parameter(n), &m, |b, m| {
            b.iter(|| black_box(m.rref()))
        });
    }
    g.finish();
}

fn sequences(c: &mut Criterion) {
    let mut g = c.benchmark_group("sequences");
    for n in [3, 6] {
        let s = exact(n, 2);
        g.bench_with_input(BenchmarkId::new("is_exact", n), &s, |b, s| {
            b.iter(|| black_box(s.is_exact()))
        });
        g.bench_with_input(BenchmarkId::new("decompose", n), &s, |b, s| {
            b.iter(|| decompose_exact(s).unwrap())
        });
    }
    g.finish();
}

fn constructions(c: &mut Criterion) {
    let mut g = c.benchmark_group("constructions");
    for n in [3, 4, 6] {
        let (s, t, p1, p2) = pair(n, 3);
        g.bench_function(BenchmarkId::new("cone_completion", n), |b| {
            b.iter(|| cone_completion(&s, &t, &p1, &p2).unwrap())
        });
        g.bench_function(BenchmarkId::new("converse", n), |b| {
            b.iter(|| n4_from_n4star(&s, &t, &p1, &p2).unwrap())
        });
        let o = octa(n, 4);
        g.bench_function(BenchmarkId::new("higher_octahedron", n), |b| {
            b.iter(|| higher_octahedron(&o.a, &o.b, &o.c, &o.phi2).unwrap())
        });
    }
    let t = splice(5);
    g.bench_function("n4star_steps", |b| {
        b.iter(|| n4star_steps(&t.a, &t.b, &t.c, &t.phi2, SearchBudget::default()).unwrap())
    });
    g.finish();
}

criterion_group!(benches, linear_algebra, sequences, constructions);
criterion_main!(benches);
