//! Corpus specifications and generators.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::census::canonize;
use crate::structures::{Element, Structure};

use super::LabError;

/// Name of the generator used by random corpora.
pub const RNG_NAME: &str = "ChaCha8";

/// How a corpus is produced.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CorpusSpec {
    /// Graphs on exactly `n` vertices up to isomorphism.
    All { n: usize },
    /// Graphs on `1..=n` vertices up to isomorphism, optionally degree-bounded.
    UpTo { n: usize, max_degree: Option<usize> },
    /// Cycles `C_3..=C_n` and paths `P_1..=P_n`.
    CyclesPaths { n: usize },
    /// `count` random graphs of max degree `d` on `n` vertices.
    Random {
        d: usize,
        n: usize,
        count: usize,
        seed: u64,
        edges: Option<usize>,
    },
    /// Structures read from JSON files.
    Files(Vec<PathBuf>),
}

impl fmt::Display for CorpusSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CorpusSpec::All { n } => write!(f, "all:{n}"),
            CorpusSpec::UpTo { n, max_degree: None } => write!(f, "upto:{n}"),
            CorpusSpec::UpTo { n, max_degree: Some(d) } => write!(f, "upto:{n}:maxdeg={d}"),
            CorpusSpec::CyclesPaths { n } => write!(f, "cycles-paths:{n}"),
            CorpusSpec::Random {
                d,
                n,
                count,
                seed,
                edges,
            } => {
                write!(f, "random:d={d},n={n},count={count},seed={seed}")?;
                if let Some(e) = edges {
                    write!(f, ",edges={e}")?;
                }
                Ok(())
            }
            CorpusSpec::Files(paths) => {
                let names: Vec<String> = paths.iter().map(|p| p.display().to_string()).collect();
                write!(f, "files:{}", names.join(","))
            }
        }
    }
}

impl FromStr for CorpusSpec {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = |why: &str| LabError::BadSpec(format!("{s}: {why}"));
        let num = |v: &str| v.trim().parse::<usize>().map_err(|_| bad("expected a natural number"));
        let (kind, rest) = s.split_once(':').ok_or_else(|| bad("expected <kind>:<arguments>"))?;
        match kind {
            "all" => Ok(CorpusSpec::All { n: num(rest)? }),
            "upto" => {
                let (n, opt) = match rest.split_once(':') {
                    Some((n, o)) => (n, Some(o)),
                    None => (rest, None),
                };
                let max_degree = match opt {
                    None => None,
                    Some(o) => Some(num(o
                        .strip_prefix("maxdeg=")
                        .ok_or_else(|| bad("expected maxdeg=<d>"))?)?),
                };
                Ok(CorpusSpec::UpTo { n: num(n)?, max_degree })
            }
            "cycles-paths" => Ok(CorpusSpec::CyclesPaths { n: num(rest)? }),
            "random" => {
                let mut fields = BTreeMap::new();
                for part in rest.split(',') {
                    let (k, v) = part.split_once('=').ok_or_else(|| bad("expected key=value"))?;
                    fields.insert(k.trim(), v.trim());
                }
                let mut need = |k: &str| fields.remove(k).ok_or_else(|| bad(&format!("missing {k}")));
                let d = num(need("d")?)?;
                let n = num(need("n")?)?;
                let count = num(need("count")?)?;
                let seed = need("seed")?
                    .parse::<u64>()
                    .map_err(|_| bad("seed must be a 64-bit natural number"))?;
                let edges = fields.remove("edges").map(num).transpose()?;
                if let Some(k) = fields.keys().next() {
                    return Err(bad(&format!("unknown field {k}")));
                }
                Ok(CorpusSpec::Random {
                    d,
                    n,
                    count,
                    seed,
                    edges,
                })
            }
            "files" => {
                let paths: Vec<PathBuf> = rest.split(',').filter(|p| !p.is_empty()).map(PathBuf::from).collect();
                if paths.is_empty() {
                    return Err(bad("empty file list"));
                }
                Ok(CorpusSpec::Files(paths))
            }
            _ => Err(bad("unknown corpus kind")),
        }
    }
}

/// A named, materialized list of structures.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Corpus {
    pub name: String,
    pub spec: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rng: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub structures: Vec<Structure>,
}

impl Corpus {
    pub fn explicit(name: impl Into<String>, structures: Vec<Structure>) -> Self {
        let name = name.into();
        Corpus {
            spec: format!("explicit:{name}"),
            name,
            rng: None,
            seed: None,
            structures,
        }
    }

    pub fn len(&self) -> usize {
        self.structures.len()
    }

    pub fn is_empty(&self) -> bool {
        self.structures.is_empty()
    }

    pub fn max_degree(&self) -> usize {
        self.structures
            .iter()
            .map(|a| a.degree_profile().max_degree)
            .max()
            .unwrap_or(0)
    }
}

pub fn generate_corpus(spec: &CorpusSpec) -> Result<Corpus, LabError> {
    let text = spec.to_string();
    let (structures, seed) = match spec {
        CorpusSpec::All { n } => (all_graphs(*n), None),
        CorpusSpec::UpTo { n, max_degree } => {
            let mut out = Vec::new();
            for k in 1..=*n {
                out.extend(
                    all_graphs(k)
                        .into_iter()
                        .filter(|g| max_degree.is_none_or(|d| g.degree_profile().max_degree <= d)),
                );
            }
            (out, None)
        }
        CorpusSpec::CyclesPaths { n } => {
            let mut out: Vec<Structure> = (3..=*n).map(Structure::cycle).collect();
            out.extend((1..=*n).map(Structure::path));
            (out, None)
        }
        CorpusSpec::Random {
            d,
            n,
            count,
            seed,
            edges,
        } => {
            if let Some(e) = edges {
                if 2 * e > n * d || 2 * e > n * n.saturating_sub(1) {
                    return Err(LabError::Infeasible(format!(
                        "{e} edges on {n} vertices exceed max degree {d}"
                    )));
                }
            }
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let out = (0..*count)
                .map(|_| random_graph(&mut rng, *n, *d, *edges))
                .collect::<Result<Vec<_>, _>>()?;
            (out, Some(*seed))
        }
        CorpusSpec::Files(paths) => {
            let mut out = Vec::new();
            for p in paths {
                let text = std::fs::read_to_string(p).map_err(|e| LabError::Io(format!("{}: {e}", p.display())))?;
                let a =
                    Structure::from_json(&text).map_err(|e| LabError::BadStructure(format!("{}: {e}", p.display())))?;
                out.push(a);
            }
            (out, None)
        }
    };
    Ok(Corpus {
        name: text.clone(),
        spec: text,
        rng: seed.map(|_| RNG_NAME),
        seed,
        structures,
    })
}

fn canonical_form(n: usize, edges: &[(Element, Element)]) -> (Vec<u8>, Vec<(Element, Element)>) {
    let g = Structure::graph(n, edges);
    let c = canonize(&g, &[]);
    let mut relabeled: Vec<(Element, Element)> = edges
        .iter()
        .map(|&(a, b)| {
            let (x, y) = (c.labeling[a], c.labeling[b]);
            (x.min(y), x.max(y))
        })
        .collect();
    relabeled.sort_unstable();
    (c.key, relabeled)
}

type EdgeList = Vec<(Element, Element)>;

/// Graphs on exactly `n` vertices up to isomorphism, each in canonical
/// labeling, ordered by edge count and then canonical key.
pub fn all_graphs(n: usize) -> Vec<Structure> {
    if n == 0 {
        return vec![Structure::edgeless(0)];
    }
    let mut level: Vec<Vec<(Element, Element)>> = vec![Vec::new()];
    for k in 1..n {
        // extend each graph on k vertices by a vertex k joined to a subset
        let children: Vec<(Vec<u8>, EdgeList)> = level
            .par_iter()
            .flat_map_iter(|edges| {
                (0u64..1 << k).map(move |mask| {
                    let mut e = edges.clone();
                    e.extend((0..k).filter(|&v| mask >> v & 1 == 1).map(|v| (v, k)));
                    canonical_form(k + 1, &e)
                })
            })
            .collect();
        let unique: BTreeMap<Vec<u8>, Vec<(Element, Element)>> = children.into_iter().collect();
        let mut next: Vec<(usize, Vec<u8>, EdgeList)> = unique.into_iter().map(|(key, e)| (e.len(), key, e)).collect();
        next.sort();
        level = next.into_iter().map(|(_, _, e)| e).collect();
    }
    let mut graphs: Vec<(usize, Vec<u8>, EdgeList)> = level
        .into_iter()
        .map(|e| {
            let (key, e) = canonical_form(n, &e);
            (e.len(), key, e)
        })
        .collect();
    graphs.sort();
    graphs.into_iter().map(|(_, _, e)| Structure::graph(n, &e)).collect()
}

/// Restarts allowed when aiming for an exact edge count.
const ATTEMPTS: usize = 10_000;

fn random_graph(rng: &mut ChaCha8Rng, n: usize, d: usize, edges: Option<usize>) -> Result<Structure, LabError> {
    let mut pairs: Vec<(Element, Element)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    let mut degree = vec![0usize; n];
    let mut chosen = Vec::new();
    match edges {
        None => {
            pairs.shuffle(rng);
            for (a, b) in pairs {
                if degree[a] < d && degree[b] < d && rng.random_bool(0.5) {
                    degree[a] += 1;
                    degree[b] += 1;
                    chosen.push((a, b));
                }
            }
        }
        Some(target) => {
            // restart until a greedy pass reaches the target edge count
            for attempt in 0.. {
                if attempt == ATTEMPTS {
                    return Err(LabError::Infeasible(format!(
                        "no graph with {target} edges and max degree {d} found in {ATTEMPTS} attempts"
                    )));
                }
                pairs.shuffle(rng);
                degree.iter_mut().for_each(|x| *x = 0);
                chosen.clear();
                for &(a, b) in &pairs {
                    if chosen.len() == target {
                        break;
                    }
                    if degree[a] < d && degree[b] < d {
                        degree[a] += 1;
                        degree[b] += 1;
                        chosen.push((a, b));
                    }
                }
                if chosen.len() == target {
                    break;
                }
            }
        }
    }
    chosen.sort_unstable();
    Ok(Structure::graph(n, &chosen))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_graph_counts() {
        let counts: Vec<usize> = (1..=6).map(|n| all_graphs(n).len()).collect();
        assert_eq!(counts, [1, 2, 4, 11, 34, 156]);
    }

    #[test]
    fn specs_roundtrip() {
        for s in [
            "all:4",
            "upto:5",
            "upto:6:maxdeg=2",
            "cycles-paths:12",
            "random:d=3,n=10,count=5,seed=1",
            "random:d=2,n=6,count=2,seed=9,edges=5",
            "files:a.json,b.json",
        ] {
            assert_eq!(s.parse::<CorpusSpec>().unwrap().to_string(), s);
        }
        for s in [
            "all",
            "all:x",
            "random:d=3,n=4",
            "random:d=1,n=2,count=1,seed=1,zzz=1",
            "nope:3",
        ] {
            assert!(s.parse::<CorpusSpec>().is_err(), "{s}");
        }
    }

    #[test]
    fn random_corpus_respects_degree_and_seed() {
        let spec: CorpusSpec = "random:d=3,n=10,count=5,seed=1".parse().unwrap();
        let c = generate_corpus(&spec).unwrap();
        assert_eq!(c.len(), 5);
        assert!(c.max_degree() <= 3);
        assert_eq!(c.seed, Some(1));
        assert_eq!(generate_corpus(&spec).unwrap(), c);
        let e: CorpusSpec = "random:d=2,n=6,count=3,seed=4,edges=6".parse().unwrap();
        assert!(generate_corpus(&e)
            .unwrap()
            .structures
            .iter()
            .all(|g| g.gaifman().edges().len() == 6));
        let bad: CorpusSpec = "random:d=1,n=6,count=1,seed=4,edges=4".parse().unwrap();
        assert!(matches!(generate_corpus(&bad), Err(LabError::Infeasible(_))));
    }

    #[test]
    fn upto_with_degree_bound() {
        let c = generate_corpus(&"upto:4:maxdeg=1".parse().unwrap()).unwrap();
        // 1: K1; 2: 2K1, K2; 3: 3K1, K2+K1; 4: 4K1, K2+2K1, 2K2
        assert_eq!(c.len(), 8);
    }
}
