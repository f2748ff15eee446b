mod common;

use std::collections::BTreeSet;

use common::{adjacency, permutations, union_find_components};
use hanflab::lab::{all_graphs, generate_corpus, CorpusSpec};
use hanflab::presentations::check::power_bound;
use hanflab::presentations::{
    check_degree_bound, check_disjoint_amalgamation, check_elementary, check_localization, check_neighborhood_bound,
    enumerate_tables, scheme_by_name, CheckOptions, CircularSuccessor, ComponentColoring, Linear, LocalOrder,
    PresentationScheme, Traversal, SCHEME_NAMES,
};
use hanflab::{Element, Structure, Table};

fn upto(n: usize) -> Vec<Structure> {
    generate_corpus(&CorpusSpec::UpTo { n, max_degree: None })
        .unwrap()
        .structures
}

const OPTS: CheckOptions = CheckOptions { budget: 10_000_000 };

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// Candidate tuples for a scheme on `a`: every tuple that could appear in a
/// presentation, so subsets of them cover all presentations.
fn candidate_tuples(s: &dyn PresentationScheme, a: &Structure) -> Vec<Vec<Element>> {
    let n = a.universe();
    let adj = adjacency(a);
    match s.symbol().arity {
        1 => (0..n).map(|v| vec![v]).collect(),
        2 => (0..n).flat_map(|x| (0..n).map(move |y| vec![x, y])).collect(),
        _ => (0..n)
            .flat_map(|v| {
                let adj = adj.clone();
                adj[v]
                    .clone()
                    .into_iter()
                    .flat_map(move |b| adj[v].clone().into_iter().map(move |c| vec![v, b, c]))
            })
            .collect(),
    }
}

/// Presentations found by testing every subset of candidate tuples.
fn brute_presentations(s: &dyn PresentationScheme, a: &Structure) -> Option<BTreeSet<Table>> {
    let cands = candidate_tuples(s, a);
    if cands.len() > 16 {
        return None;
    }
    let arity = s.symbol().arity;
    Some(
        (0u32..1 << cands.len())
            .map(|m| {
                Table::from_tuples(
                    arity,
                    (0..cands.len()).filter(|&i| m >> i & 1 == 1).map(|i| cands[i].clone()),
                )
            })
            .filter(|t| s.is_valid(a, t))
            .collect(),
    )
}

#[test]
fn enumeration_matches_brute_force_filter() {
    for name in SCHEME_NAMES {
        let s = scheme_by_name(name).unwrap();
        let mut compared = 0;
        for a in upto(4) {
            if let Some(expected) = brute_presentations(s.as_ref(), &a) {
                let got = enumerate_tables(s.as_ref(), &a, 1_000_000).unwrap();
                assert!(got.windows(2).all(|w| w[0] < w[1]), "{name}: sorted and distinct");
                assert_eq!(
                    got.into_iter().collect::<BTreeSet<_>>(),
                    expected,
                    "{name} on {}",
                    a.to_json()
                );
                compared += 1;
            }
        }
        assert!(compared >= 10, "{name}: only {compared} structures compared");
    }
}

/// Traversals by their definition: components are intervals and every
/// non-first vertex of a component has an earlier neighbour.
fn is_traversal(adj: &[Vec<Element>], order: &[Element]) -> bool {
    let comp = {
        let mut label = vec![usize::MAX; adj.len()];
        for s in 0..adj.len() {
            if label[s] == usize::MAX {
                let mut stack = vec![s];
                label[s] = s;
                while let Some(v) = stack.pop() {
                    for &w in &adj[v] {
                        if label[w] == usize::MAX {
                            label[w] = s;
                            stack.push(w);
                        }
                    }
                }
            }
        }
        label
    };
    order.iter().enumerate().all(|(i, &v)| {
        let earlier = &order[..i];
        let starts = i == 0 || comp[order[i - 1]] != comp[v];
        let seen_comp = earlier.iter().any(|&u| comp[u] == comp[v]);
        if starts {
            !seen_comp
        } else {
            earlier.iter().any(|u| adj[v].contains(u))
        }
    })
}

#[test]
fn presentation_counts() {
    assert_eq!(
        enumerate_tables(&Linear, &Structure::edgeless(4), 100).unwrap().len(),
        24
    );
    assert_eq!(
        enumerate_tables(&LocalOrder, &Structure::path(3), 100).unwrap().len(),
        2
    );
    assert_eq!(enumerate_tables(&Traversal, &Structure::path(3), 100).unwrap().len(), 4);
    for a in upto(5) {
        let adj = adjacency(&a);
        let degrees: Vec<usize> = adj.iter().map(Vec::len).collect();
        let local: usize = degrees.iter().map(|&d| factorial(d)).product();
        if local <= 100_000 {
            assert_eq!(enumerate_tables(&LocalOrder, &a, 1 << 24).unwrap().len(), local);
        }
        assert_eq!(LocalOrder.count(&a), Some(local as u128));
        assert_eq!(CircularSuccessor.count(&a), Some(local as u128));
        let traversals = permutations(a.universe())
            .iter()
            .filter(|p| is_traversal(&adj, p))
            .count();
        assert_eq!(enumerate_tables(&Traversal, &a, 1 << 20).unwrap().len(), traversals);
        assert_eq!(
            enumerate_tables(&ComponentColoring, &a, 1 << 20).unwrap().len(),
            1 << union_find_components(&a)
        );
    }
}

#[test]
fn validity_sentences_agree_with_checkers() {
    let corpus = upto(4);
    for name in SCHEME_NAMES {
        let s = scheme_by_name(name).unwrap();
        let r = check_elementary(s.as_ref(), &corpus, OPTS).unwrap();
        assert!(r.disagreement.is_none(), "{name}: {:?}", r.disagreement);
        assert!(r.expansions_checked > 0);
    }
}

#[test]
fn neighbourhood_bounds() {
    let corpus = upto(5);
    let o = check_neighborhood_bound(&LocalOrder, &corpus, 2, OPTS).unwrap();
    assert!(o.passed());
    assert!(!check_neighborhood_bound(&LocalOrder, &corpus, 1, OPTS)
        .unwrap()
        .passed());
    assert!(check_neighborhood_bound(&CircularSuccessor, &corpus, 2, OPTS)
        .unwrap()
        .passed());
    assert!(check_neighborhood_bound(&ComponentColoring, &corpus, 0, OPTS)
        .unwrap()
        .passed());
    let l = check_neighborhood_bound(&Linear, &corpus, 2, OPTS).unwrap();
    let w = l.witness.expect("orders relate non-adjacent elements");
    // the witness pair is related by the order but far apart or disconnected
    let dist = common::bfs(&w.structure, w.element)[w.neighbor];
    assert!(dist > 2);
    assert!(check_degree_bound(&LocalOrder, &corpus, &power_bound(2), OPTS)
        .unwrap()
        .passed());
}

#[test]
fn locality_matrix_on_small_graphs() {
    let corpus = upto(5);
    let expected = [
        ("linear", true, true),
        ("traversal", false, false),
        ("local-order", true, true),
        ("circular-successor", false, true),
        ("component-coloring", true, false),
    ];
    for (name, loc, amal) in expected {
        let s = scheme_by_name(name).unwrap();
        let l = check_localization(s.as_ref(), &corpus, OPTS).unwrap();
        let a = check_disjoint_amalgamation(s.as_ref(), &corpus, OPTS).unwrap();
        assert_eq!((l.passed(), a.passed()), (loc, amal), "{name}");
        if let Some(w) = l.witness {
            // the restriction really is invalid
            let sub = w.structure.restrict(&w.subset).unwrap().structure;
            let table = w.restriction.table_by_name(&s.symbol().name).unwrap();
            assert!(!s.is_valid(&sub, table));
            let full = w.presentation.table_by_name(&s.symbol().name).unwrap();
            assert!(s.is_valid(&w.structure, full));
        }
        if let Some(w) = a.witness {
            assert!(w.b.iter().all(|x| !w.c.contains(x)));
        }
    }
}

#[test]
fn traversal_localization_needs_four_vertices() {
    let small: Vec<Structure> = (1..=3).flat_map(all_graphs).collect();
    assert!(check_localization(&Traversal, &small, OPTS).unwrap().passed());
    assert!(!check_localization(&Traversal, &all_graphs(4), OPTS).unwrap().passed());
}
