mod common;

use common::{brute_isomorphic, labelled_graphs, permutations, relabel};
use hanflab::census::canonical_key;
use hanflab::lab::all_graphs;
use hanflab::{census, hanf_equivalent, hanf_full, isomorphic, PointedStructure, Radius, Structure, Threshold};
use proptest::prelude::*;

fn two(a: &Structure) -> Structure {
    a.disjoint_union(a).unwrap()
}

#[test]
fn cycles_against_pairs_of_cycles() {
    let (c7, c44) = (Structure::cycle(7), two(&Structure::cycle(4)));
    assert!(
        hanf_equivalent(&c7, &c44, Radius::Finite(1), Threshold::Finite(7))
            .unwrap()
            .equivalent
    );
    let v = hanf_equivalent(&c7, &c44, Radius::Finite(1), Threshold::Finite(8)).unwrap();
    assert!(!v.equivalent);
    assert_eq!((v.witnesses[0].count_a, v.witnesses[0].count_b), (7, 8));
    let (c6, c33) = (Structure::cycle(6), two(&Structure::cycle(3)));
    for t in (1..=6).map(Threshold::Finite).chain([Threshold::Omega]) {
        assert!(
            !hanf_equivalent(&c6, &c33, Radius::Finite(1), t).unwrap().equivalent,
            "t={t}"
        );
    }
    assert!(
        hanf_equivalent(&c6, &c33, Radius::Finite(0), Threshold::Omega)
            .unwrap()
            .equivalent
    );
}

#[test]
fn graph_counts_match_labelled_enumeration() {
    // dedup every labelled graph with the brute-force oracle
    for n in 1..=4 {
        let mut reps: Vec<Structure> = Vec::new();
        for g in labelled_graphs(n) {
            if !reps.iter().any(|h| brute_isomorphic(&g, &[], h, &[])) {
                reps.push(g);
            }
        }
        assert_eq!(reps.len(), all_graphs(n).len(), "n={n}");
    }
}

#[test]
fn full_equivalence_is_isomorphism_on_four_vertices() {
    let gs = all_graphs(4);
    for (i, a) in gs.iter().enumerate() {
        for (j, b) in gs.iter().enumerate() {
            let full = hanf_full(a, b).unwrap().equivalent;
            assert_eq!(full, brute_isomorphic(a, &[], b, &[]), "{i} {j}");
            assert_eq!(full, i == j);
        }
    }
}

#[test]
fn pointed_keys_match_bijection_oracle() {
    let mut pointed = Vec::new();
    for g in all_graphs(4).into_iter().chain(all_graphs(3)) {
        for v in 0..g.universe() {
            pointed.push((g.clone(), vec![v]));
        }
    }
    for (a, pa) in &pointed {
        for (b, pb) in &pointed {
            let ka = canonical_key(&PointedStructure::new(a.clone(), pa.clone()).unwrap());
            let kb = canonical_key(&PointedStructure::new(b.clone(), pb.clone()).unwrap());
            assert_eq!(ka == kb, brute_isomorphic(a, pa, b, pb));
        }
    }
}

#[test]
fn isomorphism_witness_is_checked() {
    let a = Structure::path(4);
    let b = relabel(&a, &[2, 0, 3, 1]);
    let pa = PointedStructure::new(a.clone(), vec![]).unwrap();
    let pb = PointedStructure::new(b, vec![]).unwrap();
    let f = isomorphic(&pa, &pb).unwrap().expect("relabelled paths are isomorphic");
    assert!(hanflab::census::is_isomorphism(&pa, &pb, &f));
    let star = PointedStructure::new(Structure::star(3), vec![]).unwrap();
    assert!(isomorphic(&pa, &star).unwrap().is_none());
}

fn graph_strategy(max_n: usize) -> impl Strategy<Value = Structure> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        proptest::collection::vec(any::<bool>(), pairs).prop_map(move |bits| {
            let mut edges = Vec::new();
            let mut k = 0;
            for a in 0..n {
                for b in a + 1..n {
                    if bits[k] {
                        edges.push((a, b));
                    }
                    k += 1;
                }
            }
            Structure::graph(n, &edges)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn census_is_relabelling_invariant(g in graph_strategy(7), seed in any::<u64>(), r in 0usize..3) {
        let perms = permutations(g.universe());
        let p = &perms[(seed % perms.len() as u64) as usize];
        let h = relabel(&g, p);
        prop_assert_eq!(census(&g, Radius::Finite(r)).types, census(&h, Radius::Finite(r)).types);
    }

    #[test]
    fn census_counts_sum_to_universe(g in graph_strategy(8), r in 0usize..4) {
        let c = census(&g, Radius::Finite(r));
        prop_assert_eq!(c.counts().iter().sum::<usize>(), g.universe());
    }

    #[test]
    fn larger_thresholds_and_radii_only_refine(a in graph_strategy(6), b in graph_strategy(6), r in 0usize..3, t in 1usize..4) {
        let eq = |r, t| hanf_equivalent(&a, &b, Radius::Finite(r), t).unwrap().equivalent;
        if eq(r, Threshold::Finite(t + 1)) {
            prop_assert!(eq(r, Threshold::Finite(t)));
        }
        if eq(r, Threshold::Omega) {
            prop_assert!(eq(r, Threshold::Finite(t)));
        }
        if eq(r + 1, Threshold::Finite(t)) {
            prop_assert!(eq(r, Threshold::Finite(t)));
        }
    }

    #[test]
    fn hanf_equivalence_is_symmetric(a in graph_strategy(6), b in graph_strategy(6), r in 0usize..3) {
        let ab = hanf_equivalent(&a, &b, Radius::Finite(r), Threshold::Finite(2)).unwrap().equivalent;
        let ba = hanf_equivalent(&b, &a, Radius::Finite(r), Threshold::Finite(2)).unwrap().equivalent;
        prop_assert_eq!(ab, ba);
    }
}
