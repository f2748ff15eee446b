use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hanflab::fologic::{ef_equivalent, eval_sentence, localize, parse_unchecked};
use hanflab::invariance::{eval_invariant, SIGMA_CONN};
use hanflab::lab::cycle_pair;
use hanflab::presentations::{enumerate_tables, LocalOrder, Traversal};
use hanflab::{ClassFilter, InvariantQuery, Signature, Structure};
use std::hint::black_box;

const TRIANGLE: &str = "exists x. exists y. exists z. (E(x,y) & E(y,z) & E(z,x))";

fn bench_eval(c: &mut Criterion) {
    let phi = parse_unchecked(TRIANGLE).unwrap();
    let mut group = c.benchmark_group("eval_triangle");
    for n in [8, 16, 32] {
        let g = Structure::cycle(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &g, |b, g| {
            b.iter(|| eval_sentence(black_box(g), &phi))
        });
    }
    group.finish();
}

fn bench_localize(c: &mut Criterion) {
    let phi = parse_unchecked("forall y. (E(x,y) -> exists z. (E(y,z) & !z=x))").unwrap();
    c.bench_function("localize_r2", |b| {
        b.iter(|| localize(&Signature::graph(), black_box(&phi), 2, &["x"]))
    });
}

fn bench_ef(c: &mut Criterion) {
    let mut group = c.benchmark_group("ef_cycles");
    for q in [2, 3] {
        let (a, b2) = cycle_pair(5);
        group.bench_with_input(BenchmarkId::from_parameter(q), &q, |b, &q| {
            b.iter(|| ef_equivalent(&a, &b2, q))
        });
    }
    group.finish();
}

fn bench_presentations(c: &mut Criterion) {
    let k4 = Structure::complete(4);
    c.bench_function("enumerate_local_order_k4", |b| {
        b.iter(|| enumerate_tables(&LocalOrder, black_box(&k4), 1_000_000))
    });
    let q = InvariantQuery::new(
        Box::new(Traversal),
        parse_unchecked(SIGMA_CONN).unwrap(),
        ClassFilter::Any,
    )
    .unwrap();
    let c6 = Structure::cycle(6);
    c.bench_function("eval_invariant_conn_c6", |b| {
        b.iter(|| eval_invariant(&q, black_box(&c6), 1_000_000))
    });
}

criterion_group!(benches, bench_eval, bench_localize, bench_ef, bench_presentations);
criterion_main!(benches);
