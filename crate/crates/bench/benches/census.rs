use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hanflab::census::canonical_key;
use hanflab::fologic::parse_unchecked;
use hanflab::lab::{all_graphs, generate_corpus, locality_search, BATTERY};
use hanflab::{census, hanf_equivalent, CorpusSpec, PointedStructure, Query, Radius, Structure, Threshold};
use std::hint::black_box;

fn bench_census(c: &mut Criterion) {
    let mut group = c.benchmark_group("census");
    for n in [16, 64, 256] {
        let g = Structure::cycle(n);
        group.bench_with_input(BenchmarkId::new("cycle_r2", n), &g, |b, g| {
            b.iter(|| census(black_box(g), Radius::Finite(2)))
        });
    }
    let corpus = generate_corpus(&"random:d=3,n=40,count=1,seed=5".parse::<CorpusSpec>().unwrap()).unwrap();
    let g = &corpus.structures[0];
    group.bench_function("random_d3_n40_r2", |b| {
        b.iter(|| census(black_box(g), Radius::Finite(2)))
    });
    group.finish();
}

fn bench_hanf(c: &mut Criterion) {
    let c7 = Structure::cycle(7);
    let c44 = Structure::cycle(4).disjoint_union(&Structure::cycle(4)).unwrap();
    c.bench_function("hanf_c7_c44_t7", |b| {
        b.iter(|| hanf_equivalent(black_box(&c7), black_box(&c44), Radius::Finite(1), Threshold::Finite(7)))
    });
}

fn bench_canonical_key(c: &mut Criterion) {
    let graphs = all_graphs(6);
    c.bench_function("canonical_key_all_6", |b| {
        b.iter(|| {
            for g in &graphs {
                black_box(canonical_key(&PointedStructure::new(g.clone(), vec![0]).unwrap()));
            }
        })
    });
}

fn bench_locality(c: &mut Criterion) {
    let corpus = generate_corpus(&CorpusSpec::UpTo { n: 5, max_degree: None }).unwrap();
    let q = Query::Sentence(parse_unchecked(BATTERY[3]).unwrap());
    c.bench_function("locality_search_upto5", |b| {
        b.iter(|| locality_search(&q, &corpus, Radius::Finite(1), Threshold::Finite(2), 1_000_000))
    });
}

criterion_group!(benches, bench_census, bench_hanf, bench_canonical_key, bench_locality);
criterion_main!(benches);
