mod common;

use std::collections::BTreeSet;

use common::{adjacency, bfs, brute_isomorphic, exhaustive_max_scatter};
use hanflab::fologic::parse_unchecked;
use hanflab::invariance::SIGMA_CONN;
use hanflab::lab::{
    audit_report, generate_corpus, greedy_scatter, locality_search, max_scatter, minimal_locality_parameters,
    scattered_check, BATTERY,
};
use hanflab::presentations::Traversal;
use hanflab::{ClassFilter, Corpus, CorpusSpec, Element, InvariantQuery, Query, Radius, Structure, Threshold};
use proptest::prelude::*;

const BUDGET: u64 = 1_000_000;

fn corpus(spec: &str) -> Corpus {
    generate_corpus(&spec.parse().unwrap()).unwrap()
}

fn sentence(text: &str) -> Query {
    Query::Sentence(parse_unchecked(text).unwrap())
}

fn pairs(report: &hanflab::LocalityReport) -> BTreeSet<(usize, usize)> {
    report.violations.iter().map(|v| (v.a, v.b)).collect()
}

#[test]
fn triangles_are_local_at_radius_one() {
    let q = sentence("exists x. exists y. exists z. (E(x,y) & E(y,z) & E(z,x))");
    let c = corpus("upto:6");
    let report = locality_search(&q, &c, Radius::Finite(1), Threshold::Finite(1), BUDGET).unwrap();
    assert!(report.local());
    assert_eq!(report.pairs_examined, (c.len() * (c.len() - 1) / 2) as u64);
}

#[test]
fn connectivity_violates_locality() {
    let c7 = Structure::cycle(7);
    let c44 = Structure::cycle(4).disjoint_union(&Structure::cycle(4)).unwrap();
    let c = Corpus::explicit("c7-c44", vec![c7, c44]);
    let q = Query::Invariant(
        InvariantQuery::new(
            Box::new(Traversal),
            parse_unchecked(SIGMA_CONN).unwrap(),
            ClassFilter::Any,
        )
        .unwrap(),
    );
    let report = locality_search(&q, &c, Radius::Finite(1), Threshold::Finite(7), BUDGET).unwrap();
    assert_eq!(report.violations.len(), 1);
    let v = &report.violations[0];
    assert_eq!((v.value_a, v.value_b), (true, false));
    assert!(audit_report(&report, &q, BUDGET).unwrap().is_empty());
    let strict = locality_search(&q, &c, Radius::Finite(1), Threshold::Finite(8), BUDGET).unwrap();
    assert!(strict.local());
}

/// Radius-one Hanf equivalence by brute force: thresholded counts of
/// isomorphism classes of pointed 1-balls.
fn brute_hanf_one(a: &Structure, b: &Structure, t: usize) -> bool {
    let balls = |g: &Structure| -> Vec<(Structure, Element)> {
        (0..g.universe())
            .map(|v| {
                let ball: Vec<Element> = bfs(g, v)
                    .iter()
                    .enumerate()
                    .filter(|(_, d)| **d <= 1)
                    .map(|(w, _)| w)
                    .collect();
                let sub = g.restrict(&ball).unwrap();
                let p = sub.origin.iter().position(|&w| w == v).unwrap();
                (sub.structure, p)
            })
            .collect()
    };
    let (ba, bb) = (balls(a), balls(b));
    let count = |side: &[(Structure, Element)], (s, p): &(Structure, Element)| {
        side.iter()
            .filter(|(h, q)| brute_isomorphic(s, &[*p], h, &[*q]))
            .count()
            .min(t)
    };
    ba.iter().chain(&bb).all(|x| count(&ba, x) == count(&bb, x))
}

#[test]
fn violations_match_brute_force() {
    let c = corpus("upto:5");
    for text in [BATTERY[1], BATTERY[4], BATTERY[6]] {
        let q = sentence(text);
        let values: Vec<bool> = c.structures.iter().map(|a| q.evaluate(a, BUDGET).unwrap()).collect();
        for t in 1..=2 {
            let report = locality_search(&q, &c, Radius::Finite(1), Threshold::Finite(t), BUDGET).unwrap();
            let mut expected = BTreeSet::new();
            for i in 0..c.len() {
                for j in i + 1..c.len() {
                    if values[i] != values[j] && brute_hanf_one(&c.structures[i], &c.structures[j], t) {
                        expected.insert((i, j));
                    }
                }
            }
            assert_eq!(pairs(&report), expected, "{text} t={t}");
        }
    }
}

#[test]
fn minimal_parameters_for_simple_sentences() {
    let c = corpus("upto:5");
    let edge = sentence(BATTERY[0]);
    let p = minimal_locality_parameters(&edge, &c, 3, 3, BUDGET).unwrap().unwrap();
    assert_eq!((p.r, p.t), (1, 1));
    let trivially = sentence("true");
    let p = minimal_locality_parameters(&trivially, &c, 3, 3, BUDGET)
        .unwrap()
        .unwrap();
    assert_eq!((p.r, p.t), (0, 1));
}

#[test]
fn random_corpora_are_reproducible() {
    let spec = "random:d=3,n=10,count=8,seed=42";
    let (a, b) = (corpus(spec), corpus(spec));
    assert_eq!(a.structures, b.structures);
    assert_eq!(a.seed, Some(42));
    assert_eq!(a.len(), 8);
    for g in &a.structures {
        assert_eq!(g.universe(), 10);
        assert!(adjacency(g).iter().all(|n| n.len() <= 3));
    }
    assert_ne!(corpus("random:d=3,n=10,count=8,seed=43").structures, a.structures);
    let fixed = corpus("random:d=2,n=8,count=4,seed=1,edges=5");
    assert!(fixed.structures.iter().all(|g| common::edge_set(g).len() == 5));
}

#[test]
fn corpus_specs_round_trip() {
    for text in [
        "all:4",
        "upto:5",
        "upto:6:maxdeg=2",
        "cycles-paths:12",
        "random:d=3,n=10,count=5,seed=1",
        "random:d=3,n=10,count=5,seed=1,edges=7",
    ] {
        let spec: CorpusSpec = text.parse().unwrap();
        assert_eq!(spec.to_string(), text);
    }
    assert!("upto:x".parse::<CorpusSpec>().is_err());
    assert_eq!(corpus("cycles-paths:12").len(), 10 + 12);
}

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Structure> {
    (1..=max_n).prop_flat_map(|n| {
        (proptest::collection::vec(any::<bool>(), n * (n - 1) / 2), 1u32..4).prop_map(move |(bits, sparse)| {
            let pairs: Vec<(usize, usize)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
            // thin the edges so that scattered sets are not trivially small
            let edges: Vec<_> = pairs
                .into_iter()
                .zip(bits)
                .enumerate()
                .filter(|(i, (_, b))| *b && (*i as u32).is_multiple_of(sparse))
                .map(|(_, (p, _))| p)
                .collect();
            Structure::graph(n, &edges)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn greedy_scatter_is_scattered_and_maximal(g in graph_strategy(10), r in 0usize..3, mask in any::<u16>()) {
        let n = g.universe();
        let candidates: Vec<Element> = (0..n).filter(|&v| mask >> v & 1 == 1).collect();
        let greedy = greedy_scatter(&g, &candidates, Radius::Finite(r), &[]).unwrap();
        let dist: Vec<Vec<usize>> = (0..n).map(|v| bfs(&g, v)).collect();
        for (i, &x) in greedy.set.iter().enumerate() {
            for &y in &greedy.set[i + 1..] {
                prop_assert!(dist[x][y] > 2 * r);
            }
        }
        for &c in &candidates {
            prop_assert!(greedy.set.contains(&c) || greedy.set.iter().any(|&y| dist[c][y] <= 2 * r));
        }
        prop_assert!(scattered_check(&g, &greedy.set, Radius::Finite(r), &[]).unwrap());
        let best = exhaustive_max_scatter(&g, &candidates, r);
        prop_assert!(greedy.set.len() <= best);
        prop_assert_eq!(max_scatter(&g, &candidates, Radius::Finite(r), &[]).unwrap(), best);
        prop_assert!(greedy.bound_holds);
    }

    #[test]
    fn violations_shrink_with_larger_parameters(seed in 0u64..1000, r in 0usize..2, t in 1usize..3) {
        let c = corpus(&format!("random:d=2,n=7,count=12,seed={seed}"));
        let q = sentence(BATTERY[(seed % 10) as usize]);
        let run = |r, t| pairs(&locality_search(&q, &c, Radius::Finite(r), Threshold::Finite(t), BUDGET).unwrap());
        let base = run(r, t);
        prop_assert!(run(r + 1, t).is_subset(&base));
        prop_assert!(run(r, t + 1).is_subset(&base));
    }
}
