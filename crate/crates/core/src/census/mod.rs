//! Isomorphism types of pointed neighbourhoods, censuses, and Hanf equivalence.

pub mod canon;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::structures::{Element, PointedStructure, Radius, Structure, StructureError};

pub use canon::{canonize, Canon};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CensusError {
    #[error("signatures differ")]
    SignatureMismatch,
    #[error("{0}")]
    Structure(#[from] StructureError),
}

/// Isomorphism type of a pointed structure.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct NeighborhoodType {
    pub canonical_key: Vec<u8>,
    pub size: usize,
    pub radius: Radius,
}

impl NeighborhoodType {
    pub fn hex(&self) -> String {
        hex::encode(&self.canonical_key)
    }
}

impl Serialize for NeighborhoodType {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Repr<'a> {
            key: String,
            size: usize,
            radius: &'a Radius,
        }
        Repr {
            key: self.hex(),
            size: self.size,
            radius: &self.radius,
        }
        .serialize(s)
    }
}

/// Canonical key of `p`. The radius is recorded as infinite; callers that cut
/// `p` out at a finite radius overwrite it.
pub fn canonical_key(p: &PointedStructure) -> NeighborhoodType {
    NeighborhoodType {
        canonical_key: canonize(&p.base, &p.points).key,
        size: p.base.universe(),
        radius: Radius::Infinite,
    }
}

/// A point-, relation- and constant-preserving bijection from `p` to `q`, if any.
/// `witness[v]` is the image of `v`; it is checked tuple by tuple.
pub fn isomorphic(p: &PointedStructure, q: &PointedStructure) -> Result<Option<Vec<Element>>, CensusError> {
    if p.base.signature() != q.base.signature() {
        return Err(CensusError::SignatureMismatch);
    }
    if p.base.universe() != q.base.universe() || p.points.len() != q.points.len() {
        return Ok(None);
    }
    let cp = canonize(&p.base, &p.points);
    let cq = canonize(&q.base, &q.points);
    if cp.key != cq.key {
        return Ok(None);
    }
    let mut inv_q = vec![0; cq.labeling.len()];
    for (v, &l) in cq.labeling.iter().enumerate() {
        inv_q[l] = v;
    }
    let witness: Vec<Element> = cp.labeling.iter().map(|&l| inv_q[l]).collect();
    assert!(is_isomorphism(p, q, &witness), "canonical labelings disagree");
    Ok(Some(witness))
}

/// Direct check that `f` is an isomorphism of pointed structures.
pub fn is_isomorphism(p: &PointedStructure, q: &PointedStructure, f: &[Element]) -> bool {
    let n = p.base.universe();
    if f.len() != n || q.base.universe() != n {
        return false;
    }
    let mut hit = vec![false; n];
    for &x in f {
        if x >= n || std::mem::replace(&mut hit[x], true) {
            return false;
        }
    }
    let tables_ok = p.base.tables().iter().zip(q.base.tables()).all(|(tp, tq)| {
        tp.len() == tq.len()
            && tp
                .iter()
                .all(|row| tq.contains(&row.iter().map(|&v| f[v]).collect::<Vec<_>>()))
    });
    let consts_ok = p
        .base
        .constant_values()
        .iter()
        .zip(q.base.constant_values())
        .all(|(&a, &b)| f[a] == b);
    let points_ok = p.points.len() == q.points.len() && p.points.iter().zip(&q.points).all(|(&a, &b)| f[a] == b);
    tables_ok && consts_ok && points_ok
}

/// One isomorphism type in a census.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CensusEntry {
    pub size: usize,
    pub count: usize,
}

/// Counts of pointed `r`-neighbourhood types, ordered by key bytes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CensusReport {
    pub radius: Radius,
    pub types: BTreeMap<Vec<u8>, CensusEntry>,
    pub total: usize,
}

impl CensusReport {
    pub fn count(&self, key: &[u8]) -> usize {
        self.types.get(key).map_or(0, |e| e.count)
    }

    pub fn type_count(&self) -> usize {
        self.types.len()
    }

    pub fn counts(&self) -> Vec<usize> {
        self.types.values().map(|e| e.count).collect()
    }
}

impl Serialize for CensusReport {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Row {
            key: String,
            size: usize,
            count: usize,
        }
        #[derive(Serialize)]
        struct Repr<'a> {
            radius: &'a Radius,
            total: usize,
            types: Vec<Row>,
        }
        Repr {
            radius: &self.radius,
            total: self.total,
            types: self
                .types
                .iter()
                .map(|(k, e)| Row {
                    key: hex::encode(k),
                    size: e.size,
                    count: e.count,
                })
                .collect(),
        }
        .serialize(s)
    }
}

/// Per-element neighbourhood keys, in element order.
pub fn element_types(a: &Structure, r: Radius) -> Vec<NeighborhoodType> {
    let g = a.gaifman();
    (0..a.universe())
        .into_par_iter()
        .map(|v| {
            let ball = g.ball(v, r);
            let p = a.pointed_on(&ball, &[v]).expect("ball elements are in range");
            let mut t = canonical_key(&p);
            t.radius = r;
            t
        })
        .collect()
}

pub fn census(a: &Structure, r: Radius) -> CensusReport {
    let mut types: BTreeMap<Vec<u8>, CensusEntry> = BTreeMap::new();
    for t in element_types(a, r) {
        types
            .entry(t.canonical_key)
            .or_insert(CensusEntry { size: t.size, count: 0 })
            .count += 1;
    }
    CensusReport {
        radius: r,
        types,
        total: a.universe(),
    }
}

/// Either a natural number or ω.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Threshold {
    Finite(usize),
    Omega,
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threshold::Finite(t) => write!(f, "{t}"),
            Threshold::Omega => f.write_str("omega"),
        }
    }
}

impl FromStr for Threshold {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "omega" | "ω" | "w" => Ok(Threshold::Omega),
            other => other
                .parse()
                .map(Threshold::Finite)
                .map_err(|_| format!("invalid threshold {other:?}: expected a natural number or omega")),
        }
    }
}

impl Serialize for Threshold {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Threshold::Finite(t) => s.serialize_u64(*t as u64),
            Threshold::Omega => s.serialize_str("omega"),
        }
    }
}

impl<'de> Deserialize<'de> for Threshold {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            N(usize),
            S(String),
        }
        match Repr::deserialize(d)? {
            Repr::N(n) => Ok(Threshold::Finite(n)),
            Repr::S(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// `x ~_t y`: equal, or both at least `t`.
pub fn equipollent(x: usize, y: usize, t: Threshold) -> bool {
    x == y
        || match t {
            Threshold::Finite(t) => x >= t && y >= t,
            Threshold::Omega => false,
        }
}

/// A neighbourhood type whose counts are not equipollent.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HanfWitness {
    #[serde(serialize_with = "as_hex")]
    pub key: Vec<u8>,
    pub size: usize,
    pub count_a: usize,
    pub count_b: usize,
}

fn as_hex<S: Serializer>(k: &[u8], s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&hex::encode(k))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HanfVerdict {
    pub equivalent: bool,
    pub r: Radius,
    pub t: Threshold,
    pub witnesses: Vec<HanfWitness>,
}

/// Compares two censuses type by type; types absent from one side count 0.
pub fn compare_censuses(ca: &CensusReport, cb: &CensusReport, t: Threshold) -> HanfVerdict {
    let mut keys: Vec<&Vec<u8>> = ca.types.keys().chain(cb.types.keys()).collect();
    keys.sort();
    keys.dedup();
    let witnesses: Vec<HanfWitness> = keys
        .into_iter()
        .filter_map(|k| {
            let (x, y) = (ca.count(k), cb.count(k));
            (!equipollent(x, y, t)).then(|| HanfWitness {
                key: k.clone(),
                size: ca.types.get(k).or_else(|| cb.types.get(k)).unwrap().size,
                count_a: x,
                count_b: y,
            })
        })
        .collect();
    HanfVerdict {
        equivalent: witnesses.is_empty(),
        r: ca.radius,
        t,
        witnesses,
    }
}

/// Hanf `(r,t)`-equivalence.
pub fn hanf_equivalent(a: &Structure, b: &Structure, r: Radius, t: Threshold) -> Result<HanfVerdict, CensusError> {
    if a.signature() != b.signature() {
        return Err(CensusError::SignatureMismatch);
    }
    Ok(compare_censuses(&census(a, r), &census(b, r), t))
}

/// Hanf equivalence at every radius. On finite structures neighbourhoods
/// saturate once `r` reaches the larger universe size, so the scan stops
/// there. Returns the first failing verdict, or the last passing one.
pub fn hanf_full(a: &Structure, b: &Structure) -> Result<HanfVerdict, CensusError> {
    if a.signature() != b.signature() {
        return Err(CensusError::SignatureMismatch);
    }
    let top = a.universe().max(b.universe());
    let mut last = None;
    for r in 0..=top {
        let v = hanf_equivalent(a, b, Radius::Finite(r), Threshold::Omega)?;
        if !v.equivalent {
            return Ok(v);
        }
        last = Some(v);
    }
    Ok(last.expect("at least radius 0 is checked"))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two(a: &Structure) -> Structure {
        a.disjoint_union(a).unwrap()
    }

    #[test]
    fn equipollence_cases() {
        assert!(equipollent(3, 3, Threshold::Finite(5)));
        assert!(equipollent(5, 7, Threshold::Finite(5)));
        assert!(!equipollent(3, 4, Threshold::Finite(5)));
        assert!(!equipollent(5, 7, Threshold::Omega));
        assert!(equipollent(0, 9, Threshold::Finite(0)));
    }

    #[test]
    fn threshold_text() {
        assert_eq!("omega".parse::<Threshold>().unwrap(), Threshold::Omega);
        assert_eq!("7".parse::<Threshold>().unwrap(), Threshold::Finite(7));
        assert!("-1".parse::<Threshold>().is_err());
        assert_eq!(serde_json::to_string(&Threshold::Omega).unwrap(), "\"omega\"");
    }

    #[test]
    fn cycle_census_is_uniform() {
        let c = census(&Structure::cycle(7), Radius::Finite(1));
        assert_eq!(c.counts(), vec![7]);
        let c = census(&two(&Structure::cycle(3)), Radius::Finite(1));
        assert_eq!(c.counts(), vec![6]);
    }

    #[test]
    fn path_census_has_two_types() {
        let c = census(&Structure::path(3), Radius::Finite(1));
        let mut counts = c.counts();
        counts.sort();
        assert_eq!(counts, vec![1, 2]);
        assert_eq!(c.total, 3);
    }

    #[test]
    fn seven_cycle_against_two_squares() {
        let c7 = Structure::cycle(7);
        let c44 = two(&Structure::cycle(4));
        let r1 = Radius::Finite(1);
        assert!(hanf_equivalent(&c7, &c44, r1, Threshold::Finite(7)).unwrap().equivalent);
        let v = hanf_equivalent(&c7, &c44, r1, Threshold::Finite(8)).unwrap();
        assert!(!v.equivalent);
        assert_eq!((v.witnesses[0].count_a, v.witnesses[0].count_b), (7, 8));
    }

    #[test]
    fn hexagon_against_triangles() {
        let c6 = Structure::cycle(6);
        let tt = two(&Structure::cycle(3));
        for t in (1..=6).map(Threshold::Finite).chain([Threshold::Omega]) {
            let v = hanf_equivalent(&c6, &tt, Radius::Finite(1), t).unwrap();
            assert!(!v.equivalent);
            assert_eq!(v.witnesses.len(), 2);
        }
    }

    #[test]
    fn pointed_path_middle_differs_from_end() {
        let p = Structure::path(3);
        let mid = PointedStructure::new(p.clone(), vec![1]).unwrap();
        let end = PointedStructure::new(p.clone(), vec![0]).unwrap();
        let end2 = PointedStructure::new(p, vec![2]).unwrap();
        assert!(isomorphic(&mid, &end).unwrap().is_none());
        assert_eq!(isomorphic(&end, &end2).unwrap(), Some(vec![2, 1, 0]));
    }

    #[test]
    fn full_equivalence_separates_nonisomorphic() {
        let a = Structure::path(4);
        let b = Structure::star(3);
        assert!(!hanf_full(&a, &b).unwrap().equivalent);
        let c = Structure::graph(4, &[(3, 2), (2, 0), (0, 1)]);
        assert!(hanf_full(&a, &c).unwrap().equivalent);
    }

    #[test]
    fn report_serializes_with_hex_keys() {
        let c = census(&Structure::cycle(3), Radius::Finite(1));
        let json = serde_json::to_string(&c).unwrap();
        assert!(json.starts_with("{\"radius\":1,\"total\":3,\"types\":[{\"key\":\""));
    }
}
