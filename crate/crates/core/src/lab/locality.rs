//! Empirical Hanf and threshold locality of queries on a corpus.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::census::{census, compare_censuses, CensusReport, HanfVerdict, Threshold};
use crate::fologic::{ef_equivalent, eval_sentence, Formula};
use crate::invariance::{eval_invariant, InvariantQuery};
use crate::structures::{Radius, Structure};

use super::{Corpus, LabError};

/// `(3^q - 1) / 2`, a standard Hanf radius for quantifier rank `q`.
pub fn hanf_radius_default(q: usize) -> usize {
    (3usize.pow(q as u32) - 1) / 2
}

/// A boolean query: a plain sentence or a presentation-invariant one.
#[derive(Debug)]
pub enum Query {
    Sentence(Formula),
    Invariant(InvariantQuery),
}

impl Query {
    pub fn evaluate(&self, a: &Structure, budget: u64) -> Result<bool, LabError> {
        match self {
            Query::Sentence(phi) => Ok(eval_sentence(a, phi)?),
            Query::Invariant(q) => Ok(eval_invariant(q, a, budget)?),
        }
    }
}

impl fmt::Display for Query {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Query::Sentence(phi) => write!(f, "{phi}"),
            Query::Invariant(q) => f.write_str(&q.describe()),
        }
    }
}

/// A pair of Hanf-equivalent structures on which the query differs.
#[derive(Debug, Clone, Serialize)]
pub struct Violation {
    pub a: usize,
    pub b: usize,
    pub structure_a: Structure,
    pub structure_b: Structure,
    pub verdict: HanfVerdict,
    pub value_a: bool,
    pub value_b: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct LocalityReport {
    pub query: String,
    pub corpus: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub corpus_size: usize,
    pub r: Radius,
    pub t: Threshold,
    pub d: usize,
    pub pairs_examined: u64,
    pub violations: Vec<Violation>,
}

impl LocalityReport {
    pub fn local(&self) -> bool {
        self.violations.is_empty()
    }
}

fn check_signatures(corpus: &Corpus) -> Result<(), LabError> {
    match corpus.structures.split_first() {
        Some((first, rest)) if rest.iter().any(|a| a.signature() != first.signature()) => {
            Err(LabError::MixedSignatures)
        }
        _ => Ok(()),
    }
}

fn query_values(query: &Query, corpus: &Corpus, budget: u64) -> Result<Vec<bool>, LabError> {
    corpus
        .structures
        .par_iter()
        .map(|a| query.evaluate(a, budget))
        .collect()
}

fn censuses(corpus: &Corpus, r: Radius) -> Vec<CensusReport> {
    corpus.structures.par_iter().map(|a| census(a, r)).collect()
}

fn violations(corpus: &Corpus, values: &[bool], censuses: &[CensusReport], t: Threshold) -> (u64, Vec<Violation>) {
    let n = corpus.len();
    let found: Vec<Violation> = (0..n)
        .into_par_iter()
        .flat_map_iter(|i| {
            (i + 1..n).filter_map(move |j| {
                if values[i] == values[j] {
                    return None;
                }
                let verdict = compare_censuses(&censuses[i], &censuses[j], t);
                verdict.equivalent.then(|| Violation {
                    a: i,
                    b: j,
                    structure_a: corpus.structures[i].clone(),
                    structure_b: corpus.structures[j].clone(),
                    verdict,
                    value_a: values[i],
                    value_b: values[j],
                })
            })
        })
        .collect();
    ((n * n.saturating_sub(1) / 2) as u64, found)
}

/// Every unordered pair that is Hanf `(r,t)`-equivalent yet differs on `query`.
pub fn locality_search(
    query: &Query,
    corpus: &Corpus,
    r: Radius,
    t: Threshold,
    budget: u64,
) -> Result<LocalityReport, LabError> {
    check_signatures(corpus)?;
    let values = query_values(query, corpus, budget)?;
    let (pairs_examined, violations) = violations(corpus, &values, &censuses(corpus, r), t);
    Ok(LocalityReport {
        query: query.to_string(),
        corpus: corpus.spec.clone(),
        seed: corpus.seed,
        corpus_size: corpus.len(),
        r,
        t,
        d: corpus.max_degree(),
        pairs_examined,
        violations,
    })
}

/// Re-derives each violation from scratch: the pair must be Hanf-equivalent
/// and differ on the query. Returns the indices of violations failing audit.
pub fn audit_report(report: &LocalityReport, query: &Query, budget: u64) -> Result<Vec<usize>, LabError> {
    let mut failed = Vec::new();
    for (k, v) in report.violations.iter().enumerate() {
        let eq = compare_censuses(
            &census(&v.structure_a, report.r),
            &census(&v.structure_b, report.r),
            report.t,
        )
        .equivalent;
        let va = query.evaluate(&v.structure_a, budget)?;
        let vb = query.evaluate(&v.structure_b, budget)?;
        if !eq || va == vb || va != v.value_a || vb != v.value_b {
            failed.push(k);
        }
    }
    Ok(failed)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LocalityParameters {
    pub r: usize,
    pub t: usize,
}

/// Least `(r,t)` in lexicographic order with no violations on the corpus.
pub fn minimal_locality_parameters(
    query: &Query,
    corpus: &Corpus,
    r_max: usize,
    t_max: usize,
    budget: u64,
) -> Result<Option<LocalityParameters>, LabError> {
    check_signatures(corpus)?;
    let values = query_values(query, corpus, budget)?;
    for r in 0..=r_max {
        let cs = censuses(corpus, Radius::Finite(r));
        for t in 1..=t_max {
            if violations(corpus, &values, &cs, Threshold::Finite(t)).1.is_empty() {
                return Ok(Some(LocalityParameters { r, t }));
            }
        }
    }
    Ok(None)
}

/// Least `m` in `range` for which the family's pair is `q`-equivalent.
pub fn ef_indistinguishability_demo(
    family: &dyn Fn(usize) -> (Structure, Structure),
    range: std::ops::RangeInclusive<usize>,
    q: usize,
) -> Result<Option<usize>, LabError> {
    for m in range {
        let (a, b) = family(m);
        if ef_equivalent(&a, &b, q)? {
            return Ok(Some(m));
        }
    }
    Ok(None)
}

/// `C_{2m}` against `C_m ⊎ C_m`.
pub fn cycle_pair(m: usize) -> (Structure, Structure) {
    let c = Structure::cycle(m);
    (
        Structure::cycle(2 * m),
        c.disjoint_union(&c).expect("graphs have no constants"),
    )
}

/// Ten graph sentences of quantifier rank at most 3.
pub const BATTERY: [&str; 10] = [
    "exists x. exists y. E(x,y)",
    "forall x. exists y. E(x,y)",
    "exists x. forall y. (x=y | E(x,y))",
    "exists x. exists y. exists z. (E(x,y) & E(y,z) & E(z,x))",
    "exists x. exists y. exists z. (!y=z & E(x,y) & E(x,z))",
    "forall x. forall y. (E(x,y) -> exists z. (E(x,z) & E(y,z)))",
    "exists x. exists y. (!x=y & !E(x,y))",
    "forall x. exists y. !x=y",
    "exists x. forall y. !E(x,y)",
    "forall x. forall y. forall z. ((E(x,y) & E(y,z)) -> (x=z | E(x,z)))",
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fologic::parse_unchecked;
    use crate::lab::{generate_corpus, CorpusSpec};

    fn sentence(text: &str) -> Query {
        Query::Sentence(parse_unchecked(text).unwrap())
    }

    #[test]
    fn radius_defaults() {
        assert_eq!([0, 1, 2, 3].map(hanf_radius_default), [0, 1, 4, 13]);
    }

    #[test]
    fn battery_ranks() {
        for s in BATTERY {
            assert!(parse_unchecked(s).unwrap().quantifier_rank() <= 3, "{s}");
        }
    }

    #[test]
    fn edge_existence_needs_radius_one() {
        let c = generate_corpus(&CorpusSpec::UpTo { n: 5, max_degree: None }).unwrap();
        let q = sentence("exists x. exists y. E(x,y)");
        let p = minimal_locality_parameters(&q, &c, 3, 3, 1000).unwrap();
        assert_eq!(p, Some(LocalityParameters { r: 1, t: 1 }));
        let constant = sentence("true");
        assert_eq!(
            minimal_locality_parameters(&constant, &c, 3, 3, 1000).unwrap(),
            Some(LocalityParameters { r: 0, t: 1 })
        );
    }

    #[test]
    fn single_structure_has_no_violations() {
        let c = Corpus::explicit("one", vec![Structure::cycle(4)]);
        let r = locality_search(&sentence(BATTERY[3]), &c, Radius::Finite(0), Threshold::Finite(1), 10).unwrap();
        assert!(r.local());
        assert_eq!(r.pairs_examined, 0);
    }

    #[test]
    fn identical_family_is_equivalent_at_start() {
        let fam = |m: usize| (Structure::cycle(m), Structure::cycle(m));
        assert_eq!(ef_indistinguishability_demo(&fam, 3..=6, 3).unwrap(), Some(3));
        assert_eq!(ef_indistinguishability_demo(&cycle_pair, 3..=6, 1).unwrap(), Some(3));
        assert_eq!(ef_indistinguishability_demo(&cycle_pair, 3..=6, 2).unwrap(), Some(3));
        assert_eq!(ef_indistinguishability_demo(&cycle_pair, 3..=6, 3).unwrap(), Some(5));
    }
}
