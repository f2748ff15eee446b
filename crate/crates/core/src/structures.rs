//! Finite relational structures, their Gaifman graphs, balls and induced
//! substructures.
//!
//! Elements are the dense naturals `0..n`. Every operation that re-indexes
//! elements (restriction, neighbourhood extraction) returns the map back to
//! the source structure.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::de::{self, Deserializer};
use serde::ser::{SerializeMap, SerializeStruct, Serializer};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Element = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructureError {
    #[error("duplicate symbol name `{0}`")]
    DuplicateName(String),
    #[error("relation `{0}` must have arity >= 1")]
    ZeroArity(String),
    #[error("unknown relation `{0}`")]
    UnknownRelation(String),
    #[error("relation `{relation}`: arity mismatch, expected {expected} but found a {found}-tuple")]
    ArityMismatch {
        relation: String,
        expected: usize,
        found: usize,
    },
    #[error("relation `{relation}`: element {element} out of range (universe size {universe})")]
    ElementOutOfRange {
        relation: String,
        element: i64,
        universe: usize,
    },
    #[error("unknown constant `{0}`")]
    UnknownConstant(String),
    #[error("constant `{0}` has no value")]
    MissingConstant(String),
    #[error("constant `{name}`: element {element} out of range (universe size {universe})")]
    ConstantOutOfRange {
        name: String,
        element: i64,
        universe: usize,
    },
    #[error("empty universe is only allowed when the signature has no constants")]
    EmptyUniverseWithConstants,
    #[error("element {element} out of range (universe size {universe})")]
    PointOutOfRange { element: Element, universe: usize },
    #[error("signatures differ")]
    SignatureMismatch,
    #[error("disjoint union of structures with constants is undefined")]
    ConstantCollision,
    #[error("symbol `{0}` already belongs to the signature")]
    SymbolClash(String),
    #[error("malformed structure document: {0}")]
    Malformed(String),
}

/// All violations found while validating a structure description.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}", self.0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
pub struct ValidationErrors(pub Vec<StructureError>);

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RelSymbol {
    pub name: String,
    pub arity: usize,
}

impl RelSymbol {
    pub fn new(name: impl Into<String>, arity: usize) -> Self {
        RelSymbol {
            name: name.into(),
            arity,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Signature {
    relations: Vec<RelSymbol>,
    constants: Vec<String>,
}

impl Signature {
    pub fn new(relations: Vec<RelSymbol>, constants: Vec<String>) -> Result<Self, StructureError> {
        let mut seen = BTreeSet::new();
        for r in &relations {
            if r.arity == 0 {
                return Err(StructureError::ZeroArity(r.name.clone()));
            }
            if !seen.insert(r.name.as_str()) {
                return Err(StructureError::DuplicateName(r.name.clone()));
            }
        }
        for c in &constants {
            if !seen.insert(c.as_str()) {
                return Err(StructureError::DuplicateName(c.clone()));
            }
        }
        Ok(Signature { relations, constants })
    }

    /// One binary relation `E`, no constants.
    pub fn graph() -> Self {
        Signature {
            relations: vec![RelSymbol::new("E", 2)],
            constants: Vec::new(),
        }
    }

    pub fn relations(&self) -> &[RelSymbol] {
        &self.relations
    }

    pub fn constants(&self) -> &[String] {
        &self.constants
    }

    pub fn relation_index(&self, name: &str) -> Option<usize> {
        self.relations.iter().position(|r| r.name == name)
    }

    pub fn relation(&self, name: &str) -> Option<&RelSymbol> {
        self.relations.iter().find(|r| r.name == name)
    }

    pub fn constant_index(&self, name: &str) -> Option<usize> {
        self.constants.iter().position(|c| c == name)
    }

    pub fn has_symbol(&self, name: &str) -> bool {
        self.relation_index(name).is_some() || self.constant_index(name).is_some()
    }

    /// The signature extended by one fresh relation symbol.
    pub fn with_relation(&self, symbol: RelSymbol) -> Result<Signature, StructureError> {
        if self.has_symbol(&symbol.name) {
            return Err(StructureError::SymbolClash(symbol.name));
        }
        let mut relations = self.relations.clone();
        relations.push(symbol);
        Signature::new(relations, self.constants.clone())
    }

    /// True when both signatures list the same relation symbols in the same order.
    pub fn same_relations(&self, other: &Signature) -> bool {
        self.relations == other.relations
    }
}

impl Serialize for Signature {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let relations: Vec<(&str, usize)> = self.relations.iter().map(|r| (r.name.as_str(), r.arity)).collect();
        let mut s = serializer.serialize_struct("Signature", 2)?;
        s.serialize_field("relations", &relations)?;
        s.serialize_field("constants", &self.constants)?;
        s.end()
    }
}

/// A relation table: a duplicate-free set of tuples kept in lexicographic
/// order and stored flat.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Table {
    arity: usize,
    rows: Vec<Element>,
}

impl Table {
    pub fn empty(arity: usize) -> Self {
        assert!(arity >= 1, "tables have arity >= 1");
        Table {
            arity,
            rows: Vec::new(),
        }
    }

    /// Builds a table from arbitrary tuples, sorting and removing duplicates.
    /// Panics if a tuple has the wrong length.
    pub fn from_tuples<T: AsRef<[Element]>>(arity: usize, tuples: impl IntoIterator<Item = T>) -> Self {
        assert!(arity >= 1, "tables have arity >= 1");
        let mut list: Vec<Vec<Element>> = tuples
            .into_iter()
            .map(|t| {
                let t = t.as_ref();
                assert_eq!(t.len(), arity, "tuple length must equal the arity");
                t.to_vec()
            })
            .collect();
        list.sort_unstable();
        list.dedup();
        Table {
            arity,
            rows: list.concat(),
        }
    }

    /// Wraps rows that are already sorted and duplicate-free.
    pub fn from_sorted_flat(arity: usize, rows: Vec<Element>) -> Self {
        assert!(arity >= 1 && rows.len().is_multiple_of(arity));
        let t = Table { arity, rows };
        debug_assert!(t.iter().zip(t.iter().skip(1)).all(|(a, b)| a < b));
        t
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.rows.len() / self.arity
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn iter(&self) -> std::slice::ChunksExact<'_, Element> {
        self.rows.chunks_exact(self.arity)
    }

    pub fn row(&self, i: usize) -> &[Element] {
        &self.rows[i * self.arity..(i + 1) * self.arity]
    }

    pub fn flat(&self) -> &[Element] {
        &self.rows
    }

    pub fn contains(&self, tuple: &[Element]) -> bool {
        if tuple.len() != self.arity {
            return false;
        }
        let (mut lo, mut hi) = (0, self.len());
        while lo < hi {
            let mid = (lo + hi) / 2;
            match self.row(mid).cmp(tuple) {
                std::cmp::Ordering::Less => lo = mid + 1,
                std::cmp::Ordering::Greater => hi = mid,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }

    pub fn to_vecs(&self) -> Vec<Vec<Element>> {
        self.iter().map(<[Element]>::to_vec).collect()
    }

    /// Applies an element map to every tuple (the result is re-sorted).
    pub fn map_elements(&self, f: impl Fn(Element) -> Element) -> Table {
        Table::from_tuples(
            self.arity,
            self.iter().map(|t| t.iter().map(|&e| f(e)).collect::<Vec<_>>()),
        )
    }

    fn max_element(&self) -> Option<Element> {
        self.rows.iter().copied().max()
    }
}

impl Serialize for Table {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter())
    }
}

/// A radius: a natural number or the distinguished "whole component" token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Radius {
    Finite(usize),
    Infinite,
}

impl Radius {
    pub fn covers(self, distance: usize) -> bool {
        match self {
            Radius::Finite(r) => distance <= r,
            Radius::Infinite => true,
        }
    }

    pub fn finite(self) -> Option<usize> {
        match self {
            Radius::Finite(r) => Some(r),
            Radius::Infinite => None,
        }
    }
}

impl From<usize> for Radius {
    fn from(r: usize) -> Self {
        Radius::Finite(r)
    }
}

impl fmt::Display for Radius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Radius::Finite(r) => write!(f, "{r}"),
            Radius::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Radius {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "infinity" | "∞" => Ok(Radius::Infinite),
            other => other
                .parse::<usize>()
                .map(Radius::Finite)
                .map_err(|_| format!("invalid radius `{other}` (expected a natural number or `inf`)")),
        }
    }
}

impl Serialize for Radius {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Radius::Finite(r) => serializer.serialize_u64(*r as u64),
            Radius::Infinite => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for Radius {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            N(usize),
            S(String),
        }
        match Repr::deserialize(deserializer)? {
            Repr::N(n) => Ok(Radius::Finite(n)),
            Repr::S(s) => s.parse().map_err(de::Error::custom),
        }
    }
}

/// Structure description as read from a file, before validation.
#[derive(Debug, Clone, Deserialize)]
pub struct RawStructure {
    pub signature: RawSignature,
    pub universe: i64,
    #[serde(default)]
    pub relations: BTreeMap<String, Vec<Vec<i64>>>,
    #[serde(default)]
    pub constants: BTreeMap<String, i64>,
}

#[derive(Debug, Clone, Deserialize)]
pub struct RawSignature {
    #[serde(default)]
    pub relations: Vec<(String, usize)>,
    #[serde(default)]
    pub constants: Vec<String>,
}

/// A finite relational structure over a [`Signature`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Structure {
    signature: Signature,
    universe: usize,
    tables: Vec<Table>,
    constants: Vec<Element>,
}

impl Structure {
    pub fn new(
        signature: Signature,
        universe: usize,
        tables: Vec<Table>,
        constants: Vec<Element>,
    ) -> Result<Self, StructureError> {
        if tables.len() != signature.relations.len() {
            return Err(StructureError::Malformed(format!(
                "{} tables for {} relation symbols",
                tables.len(),
                signature.relations.len()
            )));
        }
        for (sym, table) in signature.relations.iter().zip(&tables) {
            if table.arity != sym.arity {
                return Err(StructureError::ArityMismatch {
                    relation: sym.name.clone(),
                    expected: sym.arity,
                    found: table.arity,
                });
            }
            if let Some(m) = table.max_element() {
                if m >= universe {
                    return Err(StructureError::ElementOutOfRange {
                        relation: sym.name.clone(),
                        element: m as i64,
                        universe,
                    });
                }
            }
        }
        if constants.len() != signature.constants.len() {
            return Err(StructureError::Malformed(format!(
                "{} constant values for {} constant symbols",
                constants.len(),
                signature.constants.len()
            )));
        }
        if universe == 0 && !constants.is_empty() {
            return Err(StructureError::EmptyUniverseWithConstants);
        }
        for (name, &v) in signature.constants.iter().zip(&constants) {
            if v >= universe {
                return Err(StructureError::ConstantOutOfRange {
                    name: name.clone(),
                    element: v as i64,
                    universe,
                });
            }
        }
        Ok(Structure {
            signature,
            universe,
            tables,
            constants,
        })
    }

    /// Validates a raw description, collecting every violation.
    pub fn validate(raw: RawStructure) -> Result<Self, ValidationErrors> {
        let mut errors = Vec::new();
        let mut seen = BTreeSet::new();
        let mut relations = Vec::new();
        for (name, arity) in &raw.signature.relations {
            if !seen.insert(name.clone()) {
                errors.push(StructureError::DuplicateName(name.clone()));
                continue;
            }
            if *arity == 0 {
                errors.push(StructureError::ZeroArity(name.clone()));
                continue;
            }
            relations.push(RelSymbol::new(name.clone(), *arity));
        }
        let mut constants = Vec::new();
        for c in &raw.signature.constants {
            if !seen.insert(c.clone()) {
                errors.push(StructureError::DuplicateName(c.clone()));
                continue;
            }
            constants.push(c.clone());
        }
        let universe = if raw.universe < 0 {
            errors.push(StructureError::Malformed(format!(
                "universe size {} is negative",
                raw.universe
            )));
            0
        } else {
            raw.universe as usize
        };

        let mut tables: Vec<Table> = relations.iter().map(|r| Table::empty(r.arity)).collect();
        for (name, tuples) in &raw.relations {
            let Some(idx) = relations.iter().position(|r| &r.name == name) else {
                errors.push(StructureError::UnknownRelation(name.clone()));
                continue;
            };
            let arity = relations[idx].arity;
            let mut good = Vec::new();
            for t in tuples {
                if t.len() != arity {
                    errors.push(StructureError::ArityMismatch {
                        relation: name.clone(),
                        expected: arity,
                        found: t.len(),
                    });
                    continue;
                }
                let mut ok = true;
                for &e in t {
                    if e < 0 || e as u64 >= universe as u64 {
                        errors.push(StructureError::ElementOutOfRange {
                            relation: name.clone(),
                            element: e,
                            universe,
                        });
                        ok = false;
                    }
                }
                if ok {
                    good.push(t.iter().map(|&e| e as usize).collect::<Vec<_>>());
                }
            }
            tables[idx] = Table::from_tuples(arity, good);
        }

        let mut values = Vec::new();
        for c in &constants {
            match raw.constants.get(c) {
                None => errors.push(StructureError::MissingConstant(c.clone())),
                Some(&v) if v < 0 || v as u64 >= universe as u64 => errors.push(StructureError::ConstantOutOfRange {
                    name: c.clone(),
                    element: v,
                    universe,
                }),
                Some(&v) => values.push(v as usize),
            }
        }
        for name in raw.constants.keys() {
            if !constants.contains(name) {
                errors.push(StructureError::UnknownConstant(name.clone()));
            }
        }
        if universe == 0 && !constants.is_empty() {
            errors.push(StructureError::EmptyUniverseWithConstants);
        }

        if !errors.is_empty() {
            return Err(ValidationErrors(errors));
        }
        let signature = Signature { relations, constants };
        Structure::new(signature, universe, tables, values).map_err(|e| ValidationErrors(vec![e]))
    }

    pub fn from_json(text: &str) -> Result<Self, ValidationErrors> {
        let raw: RawStructure =
            serde_json::from_str(text).map_err(|e| ValidationErrors(vec![StructureError::Malformed(e.to_string())]))?;
        Structure::validate(raw)
    }

    /// Canonical single-line JSON (relation tables sorted).
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("structure serialization is infallible")
    }

    /// Simple graph on `n` vertices with the symmetric closure of `edges`.
    pub fn graph(n: usize, edges: &[(Element, Element)]) -> Self {
        let tuples = edges
            .iter()
            .flat_map(|&(a, b)| [[a, b], [b, a]])
            .filter(|t| t[0] != t[1]);
        Structure::new(Signature::graph(), n, vec![Table::from_tuples(2, tuples)], Vec::new())
            .expect("graph edges must lie inside the universe")
    }

    pub fn edgeless(n: usize) -> Self {
        Structure::graph(n, &[])
    }

    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "cycles have at least three vertices");
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Structure::graph(n, &edges)
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Structure::graph(n, &edges)
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                edges.push((i, j));
            }
        }
        Structure::graph(n, &edges)
    }

    /// `K_{1,leaves}` with centre 0.
    pub fn star(leaves: usize) -> Self {
        let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        Structure::graph(leaves + 1, &edges)
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn universe(&self) -> usize {
        self.universe
    }

    pub fn tables(&self) -> &[Table] {
        &self.tables
    }

    pub fn table(&self, index: usize) -> &Table {
        &self.tables[index]
    }

    pub fn table_by_name(&self, name: &str) -> Option<&Table> {
        self.signature.relation_index(name).map(|i| &self.tables[i])
    }

    pub fn constant_values(&self) -> &[Element] {
        &self.constants
    }

    pub fn constant(&self, name: &str) -> Option<Element> {
        self.signature.constant_index(name).map(|i| self.constants[i])
    }

    /// If this is a simple graph (one symmetric irreflexive binary relation,
    /// no constants), the name of its edge relation.
    pub fn graph_edge_relation(&self) -> Option<&str> {
        if self.signature.relations.len() != 1 || !self.signature.constants.is_empty() {
            return None;
        }
        let sym = &self.signature.relations[0];
        if sym.arity != 2 {
            return None;
        }
        let t = &self.tables[0];
        let ok = t.iter().all(|e| e[0] != e[1] && t.contains(&[e[1], e[0]]));
        ok.then_some(sym.name.as_str())
    }

    /// Expansion by a fresh relation symbol.
    pub fn expand(&self, symbol: RelSymbol, table: Table) -> Result<Structure, StructureError> {
        let signature = self.signature.with_relation(symbol)?;
        let mut tables = self.tables.clone();
        tables.push(table);
        Structure::new(signature, self.universe, tables, self.constants.clone())
    }

    /// Drops a relation symbol (the reduct to the remaining signature).
    pub fn reduct_without(&self, name: &str) -> Result<Structure, StructureError> {
        let idx = self
            .signature
            .relation_index(name)
            .ok_or_else(|| StructureError::UnknownRelation(name.to_string()))?;
        let mut relations = self.signature.relations.clone();
        relations.remove(idx);
        let mut tables = self.tables.clone();
        tables.remove(idx);
        Structure::new(
            Signature::new(relations, self.signature.constants.clone())?,
            self.universe,
            tables,
            self.constants.clone(),
        )
    }

    pub fn gaifman(&self) -> GaifmanGraph {
        GaifmanGraph::of(self)
    }

    pub fn check_element(&self, a: Element) -> Result<(), StructureError> {
        if a < self.universe {
            Ok(())
        } else {
            Err(StructureError::PointOutOfRange {
                element: a,
                universe: self.universe,
            })
        }
    }

    pub fn ball(&self, a: Element, r: Radius) -> Result<Vec<Element>, StructureError> {
        self.check_element(a)?;
        Ok(self.gaifman().ball(a, r))
    }

    pub fn degree_profile(&self) -> DegreeProfile {
        self.gaifman().degree_profile()
    }

    pub fn components(&self) -> Vec<Vec<Element>> {
        self.gaifman().components()
    }

    /// Induced substructure on `elements` (any order, duplicates ignored),
    /// re-indexed in ascending order of the original elements.
    pub fn restrict(&self, elements: &[Element]) -> Result<Restriction, StructureError> {
        let mut origin: Vec<Element> = elements.to_vec();
        origin.sort_unstable();
        origin.dedup();
        if let Some(&m) = origin.last() {
            self.check_element(m)?;
        }
        let mut index = vec![usize::MAX; self.universe];
        for (new, &old) in origin.iter().enumerate() {
            index[old] = new;
        }
        let tables = self
            .tables
            .iter()
            .map(|t| {
                let tuples = t
                    .iter()
                    .filter(|tup| tup.iter().all(|&e| index[e] != usize::MAX))
                    .map(|tup| tup.iter().map(|&e| index[e]).collect::<Vec<_>>());
                Table::from_tuples(t.arity, tuples)
            })
            .collect();
        let mut constants = Vec::new();
        let mut values = Vec::new();
        let mut dropped = Vec::new();
        for (name, &v) in self.signature.constants.iter().zip(&self.constants) {
            if index[v] != usize::MAX {
                constants.push(name.clone());
                values.push(index[v]);
            } else {
                dropped.push(name.clone());
            }
        }
        let signature = Signature {
            relations: self.signature.relations.clone(),
            constants,
        };
        let structure = Structure::new(signature, origin.len(), tables, values)?;
        Ok(Restriction {
            structure,
            origin,
            dropped_constants: dropped,
        })
    }

    /// Disjoint union; `other`'s elements are shifted by `self.universe()`.
    pub fn disjoint_union(&self, other: &Structure) -> Result<Structure, StructureError> {
        if !self.signature.same_relations(&other.signature) || self.signature.constants != other.signature.constants {
            return Err(StructureError::SignatureMismatch);
        }
        if !self.signature.constants.is_empty() {
            return Err(StructureError::ConstantCollision);
        }
        let shift = self.universe;
        let tables = self
            .tables
            .iter()
            .zip(&other.tables)
            .map(|(a, b)| {
                let mut rows = a.rows.clone();
                rows.extend(b.rows.iter().map(|&e| e + shift));
                // every shifted tuple is larger than every unshifted one
                Table::from_sorted_flat(a.arity, rows)
            })
            .collect();
        Structure::new(
            self.signature.clone(),
            self.universe + other.universe,
            tables,
            Vec::new(),
        )
    }

    /// Pointed neighbourhood of radius `r` around a single element.
    pub fn pointed_neighborhood(&self, a: Element, r: Radius) -> Result<PointedStructure, StructureError> {
        self.tuple_neighborhood(&[a], r)
    }

    /// Induced structure on the union of the `r`-balls of `points`, with the
    /// points distinguished.
    pub fn tuple_neighborhood(&self, points: &[Element], r: Radius) -> Result<PointedStructure, StructureError> {
        for &p in points {
            self.check_element(p)?;
        }
        let g = self.gaifman();
        let mut elems = BTreeSet::new();
        for &p in points {
            elems.extend(g.ball(p, r));
        }
        let elems: Vec<Element> = elems.into_iter().collect();
        self.pointed_on(&elems, points)
    }

    /// Induced pointed structure on `elements`, which must contain `points`.
    pub fn pointed_on(&self, elements: &[Element], points: &[Element]) -> Result<PointedStructure, StructureError> {
        let restriction = self.restrict(elements)?;
        let mut mapped = Vec::with_capacity(points.len());
        for &p in points {
            match restriction.origin.binary_search(&p) {
                Ok(i) => mapped.push(i),
                Err(_) => {
                    return Err(StructureError::PointOutOfRange {
                        element: p,
                        universe: restriction.origin.len(),
                    })
                }
            }
        }
        Ok(PointedStructure {
            base: restriction.structure,
            points: mapped,
            origin: restriction.origin,
            dropped_constants: restriction.dropped_constants,
        })
    }
}

impl Serialize for Structure {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        struct Rels<'a>(&'a Structure);
        impl Serialize for Rels<'_> {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                let mut m = serializer.serialize_map(Some(self.0.tables.len()))?;
                for (sym, t) in self.0.signature.relations.iter().zip(&self.0.tables) {
                    m.serialize_entry(&sym.name, t)?;
                }
                m.end()
            }
        }
        struct Consts<'a>(&'a Structure);
        impl Serialize for Consts<'_> {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                let mut m = serializer.serialize_map(Some(self.0.constants.len()))?;
                for (name, v) in self.0.signature.constants.iter().zip(&self.0.constants) {
                    m.serialize_entry(name, v)?;
                }
                m.end()
            }
        }
        let mut s = serializer.serialize_struct("Structure", 4)?;
        s.serialize_field("signature", &self.signature)?;
        s.serialize_field("universe", &self.universe)?;
        s.serialize_field("relations", &Rels(self))?;
        s.serialize_field("constants", &Consts(self))?;
        s.end()
    }
}

impl<'de> Deserialize<'de> for Structure {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let raw = RawStructure::deserialize(deserializer)?;
        Structure::validate(raw).map_err(de::Error::custom)
    }
}

/// Result of [`Structure::restrict`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Restriction {
    pub structure: Structure,
    /// `origin[new] = old`.
    pub origin: Vec<Element>,
    /// Constants whose value fell outside the restricted universe.
    pub dropped_constants: Vec<String>,
}

/// A structure with a distinguished tuple of points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PointedStructure {
    pub base: Structure,
    pub points: Vec<Element>,
    /// Map back to the structure this was cut out of (identity if built directly).
    pub origin: Vec<Element>,
    pub dropped_constants: Vec<String>,
}

impl PointedStructure {
    pub fn new(base: Structure, points: Vec<Element>) -> Result<Self, StructureError> {
        for &p in &points {
            base.check_element(p)?;
        }
        let origin = (0..base.universe()).collect();
        Ok(PointedStructure {
            base,
            points,
            origin,
            dropped_constants: Vec::new(),
        })
    }

    pub fn point(&self) -> Element {
        self.points[0]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeProfile {
    pub max_degree: usize,
    pub degrees: Vec<usize>,
}

/// The Gaifman graph: symmetric, irreflexive, adjacency lists sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GaifmanGraph {
    adj: Vec<Vec<Element>>,
}

impl GaifmanGraph {
    pub fn of(a: &Structure) -> Self {
        let mut sets = vec![BTreeSet::new(); a.universe];
        for t in &a.tables {
            for tup in t.iter() {
                for (i, &x) in tup.iter().enumerate() {
                    for &y in &tup[i + 1..] {
                        if x != y {
                            sets[x].insert(y);
                            sets[y].insert(x);
                        }
                    }
                }
            }
        }
        GaifmanGraph {
            adj: sets.into_iter().map(|s| s.into_iter().collect()).collect(),
        }
    }

    pub fn order(&self) -> usize {
        self.adj.len()
    }

    pub fn neighbors(&self, a: Element) -> &[Element] {
        &self.adj[a]
    }

    pub fn degree(&self, a: Element) -> usize {
        self.adj[a].len()
    }

    pub fn is_edge(&self, a: Element, b: Element) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }

    /// Edges `{a, b}` with `a < b`, in lexicographic order.
    pub fn edges(&self) -> Vec<(Element, Element)> {
        let mut out = Vec::new();
        for (a, ns) in self.adj.iter().enumerate() {
            for &b in ns {
                if a < b {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// BFS distances from `a`, `None` for unreachable elements.
    pub fn distances_from(&self, a: Element) -> Vec<Option<usize>> {
        self.bounded_distances(a, Radius::Infinite)
    }

    fn bounded_distances(&self, a: Element, r: Radius) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.adj.len()];
        dist[a] = Some(0);
        let mut queue = VecDeque::from([a]);
        while let Some(u) = queue.pop_front() {
            let du = dist[u].unwrap();
            if !r.covers(du + 1) {
                continue;
            }
            for &v in &self.adj[u] {
                if dist[v].is_none() {
                    dist[v] = Some(du + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    /// All-pairs distances (BFS from every element).
    pub fn distance_matrix(&self) -> Vec<Vec<Option<usize>>> {
        (0..self.adj.len()).map(|a| self.distances_from(a)).collect()
    }

    /// Elements at distance at most `r` from `a`, ascending.
    pub fn ball(&self, a: Element, r: Radius) -> Vec<Element> {
        self.bounded_distances(a, r)
            .iter()
            .enumerate()
            .filter_map(|(i, d)| d.map(|_| i))
            .collect()
    }

    pub fn degree_profile(&self) -> DegreeProfile {
        let degrees: Vec<usize> = self.adj.iter().map(Vec::len).collect();
        DegreeProfile {
            max_degree: degrees.iter().copied().max().unwrap_or(0),
            degrees,
        }
    }

    /// Connected components, each sorted, ordered by least element.
    pub fn components(&self) -> Vec<Vec<Element>> {
        let mut seen = vec![false; self.adj.len()];
        let mut out = Vec::new();
        for start in 0..self.adj.len() {
            if seen[start] {
                continue;
            }
            let block = self.ball(start, Radius::Infinite);
            for &e in &block {
                seen[e] = true;
            }
            out.push(block);
        }
        out
    }

    /// The graph as a structure over the graph signature.
    pub fn to_structure(&self) -> Structure {
        Structure::graph(self.adj.len(), &self.edges())
    }
}

impl Serialize for GaifmanGraph {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut s = serializer.serialize_struct("GaifmanGraph", 2)?;
        s.serialize_field("universe", &self.adj.len())?;
        s.serialize_field("edges", &self.edges())?;
        s.end()
    }
}
