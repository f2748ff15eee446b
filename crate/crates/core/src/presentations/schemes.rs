//! The built-in presentation schemes.

use std::ops::ControlFlow;

use crate::fologic::{adjacency_formula, parse, Formula, Term};
use crate::structures::{Element, RelSymbol, Structure, Table};

use super::{PresentationError, PresentationScheme};

/// Advances `v` to the next permutation in lexicographic order.
pub(crate) fn next_permutation(v: &mut [Element]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Every permutation of `items` (sorted first), in lexicographic order.
pub(crate) fn permutations(items: &[Element]) -> Vec<Vec<Element>> {
    let mut p = items.to_vec();
    p.sort_unstable();
    let mut out = vec![p.clone()];
    while next_permutation(&mut p) {
        out.push(p.clone());
    }
    out
}

fn factorial(n: usize) -> u128 {
    (1..=n as u128).fold(1u128, |acc, k| acc.saturating_mul(k))
}

fn require_graph<'a>(scheme: &str, a: &'a Structure) -> Result<&'a str, PresentationError> {
    a.graph_edge_relation().ok_or_else(|| PresentationError::OutsideClass {
        scheme: scheme.to_string(),
        reason: "expected a simple graph (one symmetric irreflexive binary relation, no constants)".into(),
    })
}

fn sentence(text: &str) -> Formula {
    crate::fologic::parse_unchecked(text).expect("built-in sentence parses")
}

/// Rewrites `E(s,t)` atoms of `f` into the named edge relation.
fn with_edge(f: Formula, edge: &str) -> Formula {
    if edge == "E" {
        return f;
    }
    f.replace_atoms("E", &mut |args| Formula::atom_terms(edge, args.to_vec()))
}

/// Strict total order check on `0..n` given as a table of pairs.
fn order_positions(n: usize, table: &Table) -> Option<Vec<usize>> {
    if table.arity() != 2 || table.len() != n * n.saturating_sub(1) / 2 {
        return None;
    }
    let mut below = vec![0usize; n];
    for row in table.iter() {
        if row[0] >= n || row[1] >= n || row[0] == row[1] {
            return None;
        }
        below[row[1]] += 1;
    }
    let mut seen = vec![false; n];
    for &b in &below {
        if b >= n || std::mem::replace(&mut seen[b], true) {
            return None;
        }
    }
    // distinct predecessor counts fix a candidate order; the table must be it
    let ok = table.iter().all(|row| below[row[0]] < below[row[1]]);
    ok.then_some(below)
}

fn order_table(seq: &[Element]) -> Table {
    let mut rows = Vec::with_capacity(seq.len() * seq.len().saturating_sub(1) / 2);
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            rows.push([seq[i], seq[j]]);
        }
    }
    Table::from_tuples(2, rows)
}

fn emit_sorted(mut tables: Vec<Table>, f: &mut dyn FnMut(&Table) -> ControlFlow<()>) {
    tables.sort_unstable();
    for t in &tables {
        if f(t).is_break() {
            return;
        }
    }
}

/// Cartesian product of per-vertex blocks; blocks of later vertices vary fastest.
fn product(arity: usize, blocks: &[Vec<Vec<Element>>], f: &mut dyn FnMut(&Table) -> ControlFlow<()>) {
    let mut idx = vec![0usize; blocks.len()];
    loop {
        let flat: Vec<Element> = blocks
            .iter()
            .zip(&idx)
            .flat_map(|(b, &i)| b[i].iter().copied())
            .collect();
        if f(&Table::from_sorted_flat(arity, flat)).is_break() {
            return;
        }
        let mut k = blocks.len();
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            idx[k] += 1;
            if idx[k] < blocks[k].len() {
                break;
            }
            idx[k] = 0;
        }
    }
}

/// Linear orders of the universe.
#[derive(Debug, Clone, Copy, Default)]
pub struct Linear;

impl PresentationScheme for Linear {
    fn name(&self) -> String {
        "linear".into()
    }

    fn symbol(&self) -> RelSymbol {
        RelSymbol::new("<", 2)
    }

    fn declared_nu(&self) -> Option<usize> {
        None
    }

    fn notes(&self) -> String {
        "strict linear order of the universe".into()
    }

    fn check_class(&self, _a: &Structure) -> Result<(), PresentationError> {
        Ok(())
    }

    fn is_valid(&self, a: &Structure, table: &Table) -> bool {
        order_positions(a.universe(), table).is_some()
    }

    fn validity_sentence(&self, _a: &Structure) -> Option<Formula> {
        Some(sentence(
            "(forall x. !x<x) & (forall x. forall y. forall z. (x<y & y<z -> x<z)) \
             & (forall x. forall y. (x=y | x<y | y<x))",
        ))
    }

    fn count(&self, a: &Structure) -> Option<u128> {
        Some(factorial(a.universe()))
    }

    fn for_each(&self, a: &Structure, f: &mut dyn FnMut(&Table) -> ControlFlow<()>) {
        let n = a.universe();
        let tables = permutations(&(0..n).collect::<Vec<_>>())
            .iter()
            .map(|p| order_table(p))
            .collect();
        emit_sorted(tables, f);
    }
}

/// Traversals of graphs: linear orders in which components are intervals and
/// every vertex but the first of its component has an earlier neighbour.
#[derive(Debug, Clone, Copy, Default)]
pub struct Traversal;

impl Traversal {
    fn extend(adj: &[Vec<Element>], seq: &mut Vec<Element>, used: &mut Vec<bool>, out: &mut Vec<Table>) {
        let n = adj.len();
        if seq.len() == n {
            out.push(order_table(seq));
            return;
        }
        // vertices of the current component reachable from the placed ones
        let frontier: Vec<Element> = (0..n)
            .filter(|&v| !used[v] && adj[v].iter().any(|&u| used[u]))
            .collect();
        let candidates = if frontier.is_empty() {
            (0..n).filter(|&v| !used[v]).collect()
        } else {
            frontier
        };
        for v in candidates {
            used[v] = true;
            seq.push(v);
            Self::extend(adj, seq, used, out);
            seq.pop();
            used[v] = false;
        }
    }
}

impl PresentationScheme for Traversal {
    fn name(&self) -> String {
        "traversal".into()
    }

    fn symbol(&self) -> RelSymbol {
        RelSymbol::new("<", 2)
    }

    fn declared_nu(&self) -> Option<usize> {
        None
    }

    fn notes(&self) -> String {
        "graph traversal: components occupy intervals, each non-first vertex has an earlier neighbour".into()
    }

    fn check_class(&self, a: &Structure) -> Result<(), PresentationError> {
        require_graph(&self.name(), a).map(|_| ())
    }

    fn is_valid(&self, a: &Structure, table: &Table) -> bool {
        let n = a.universe();
        let Some(pos) = order_positions(n, table) else {
            return false;
        };
        let g = a.gaifman();
        for comp in g.components() {
            let lo = comp.iter().map(|&v| pos[v]).min().unwrap();
            let hi = comp.iter().map(|&v| pos[v]).max().unwrap();
            if hi - lo + 1 != comp.len() {
                return false;
            }
            let ok = comp
                .iter()
                .all(|&v| pos[v] == lo || g.neighbors(v).iter().any(|&u| pos[u] < pos[v]));
            if !ok {
                return false;
            }
        }
        true
    }

    fn validity_sentence(&self, a: &Structure) -> Option<Formula> {
        let edge = a.graph_edge_relation()?;
        let base = Linear.validity_sentence(a)?;
        let cond = sentence("forall a. forall b. forall c. (a<b & b<c & E(a,c) -> exists d. (d<b & E(d,b)))");
        Some(Formula::and(base, with_edge(cond, edge)))
    }

    fn count(&self, _a: &Structure) -> Option<u128> {
        None
    }

    fn for_each(&self, a: &Structure, f: &mut dyn FnMut(&Table) -> ControlFlow<()>) {
        let g = a.gaifman();
        let adj: Vec<Vec<Element>> = (0..a.universe()).map(|v| g.neighbors(v).to_vec()).collect();
        let mut out = Vec::new();
        Self::extend(&adj, &mut Vec::new(), &mut vec![false; adj.len()], &mut out);
        emit_sorted(out, f);
    }
}

/// Checks that, for every vertex, the triples starting at it describe a
/// relation on its neighbours accepted by `accept`.
fn per_vertex_ternary(
    a: &Structure,
    table: &Table,
    accept: impl Fn(&[Element], &[(Element, Element)]) -> bool,
) -> bool {
    if table.arity() != 3 {
        return false;
    }
    let g = a.gaifman();
    let n = a.universe();
    let mut pairs: Vec<Vec<(Element, Element)>> = vec![Vec::new(); n];
    for row in table.iter() {
        if row.iter().any(|&x| x >= n) || !g.is_edge(row[0], row[1]) || !g.is_edge(row[0], row[2]) {
            return false;
        }
        pairs[row[0]].push((row[1], row[2]));
    }
    (0..n).all(|v| accept(g.neighbors(v), &pairs[v]))
}

fn neighbour_blocks(a: &Structure, block: impl Fn(Element, &[Element]) -> Vec<Element>) -> Vec<Vec<Vec<Element>>> {
    let g = a.gaifman();
    (0..a.universe())
        .map(|v| {
            let mut opts: Vec<Vec<Element>> = permutations(g.neighbors(v)).iter().map(|p| block(v, p)).collect();
            opts.sort_unstable();
            opts
        })
        .collect()
}

fn degree_factorials(a: &Structure) -> u128 {
    let g = a.gaifman();
    (0..a.universe()).fold(1u128, |acc, v| acc.saturating_mul(factorial(g.degree(v))))
}

/// Local orders: for every vertex, a strict linear order of its neighbours.
#[derive(Debug, Clone, Copy, Default)]
pub struct LocalOrder;

impl PresentationScheme for LocalOrder {
    fn name(&self) -> String {
        "local-order".into()
    }

    fn symbol(&self) -> RelSymbol {
        RelSymbol::new("O", 3)
    }

    fn declared_nu(&self) -> Option<usize> {
        Some(2)
    }

    fn notes(&self) -> String {
        "O(a,b,c): b precedes c in the order of the neighbours of a".into()
    }

    fn check_class(&self, a: &Structure) -> Result<(), PresentationError> {
        require_graph(&self.name(), a).map(|_| ())
    }

    fn is_valid(&self, a: &Structure, table: &Table) -> bool {
        per_vertex_ternary(a, table, |nbrs, pairs| {
            let d = nbrs.len();
            if pairs.len() != d * d.saturating_sub(1) / 2 {
                return false;
            }
            let mut below = vec![0usize; d];
            for &(b, c) in pairs {
                if b == c {
                    return false;
                }
                below[nbrs.binary_search(&c).unwrap()] += 1;
            }
            let mut seen = vec![false; d];
            if below.iter().any(|&k| k >= d || std::mem::replace(&mut seen[k], true)) {
                return false;
            }
            pairs
                .iter()
                .all(|&(b, c)| below[nbrs.binary_search(&b).unwrap()] < below[nbrs.binary_search(&c).unwrap()])
        })
    }

    fn validity_sentence(&self, a: &Structure) -> Option<Formula> {
        let edge = a.graph_edge_relation()?;
        Some(with_edge(
            sentence(
                "(forall a. forall b. forall c. (O(a,b,c) -> E(a,b) & E(a,c))) \
                 & (forall a. forall b. !O(a,b,b)) \
                 & (forall a. forall b. forall c. forall d. (O(a,b,c) & O(a,c,d) -> O(a,b,d))) \
                 & (forall a. forall b. forall c. (E(a,b) & E(a,c) & !b=c -> O(a,b,c) | O(a,c,b)))",
            ),
            edge,
        ))
    }

    fn count(&self, a: &Structure) -> Option<u128> {
        Some(degree_factorials(a))
    }

    fn for_each(&self, a: &Structure, f: &mut dyn FnMut(&Table) -> ControlFlow<()>) {
        let blocks = neighbour_blocks(a, |v, p| {
            let mut rows = Vec::new();
            for i in 0..p.len() {
                for j in i + 1..p.len() {
                    rows.push(vec![v, p[i], p[j]]);
                }
            }
            rows.sort_unstable();
            rows.concat()
        });
        product(3, &blocks, f);
    }
}

/// Local circular successors: for every vertex, a permutation of its
/// neighbours (a union of successor cycles; fixed points allowed).
#[derive(Debug, Clone, Copy, Default)]
pub struct CircularSuccessor;

impl PresentationScheme for CircularSuccessor {
    fn name(&self) -> String {
        "circular-successor".into()
    }

    fn symbol(&self) -> RelSymbol {
        RelSymbol::new("S", 3)
    }

    fn declared_nu(&self) -> Option<usize> {
        Some(2)
    }

    fn notes(&self) -> String {
        "S(a,b,c): c is the successor of b in a permutation of the neighbours of a; read as a union of cycles".into()
    }

    fn check_class(&self, a: &Structure) -> Result<(), PresentationError> {
        require_graph(&self.name(), a).map(|_| ())
    }

    fn is_valid(&self, a: &Structure, table: &Table) -> bool {
        per_vertex_ternary(a, table, |nbrs, pairs| {
            let d = nbrs.len();
            if pairs.len() != d {
                return false;
            }
            let mut from = vec![false; d];
            let mut to = vec![false; d];
            pairs.iter().all(|&(b, c)| {
                let (i, j) = (nbrs.binary_search(&b).unwrap(), nbrs.binary_search(&c).unwrap());
                !std::mem::replace(&mut from[i], true) && !std::mem::replace(&mut to[j], true)
            })
        })
    }

    fn validity_sentence(&self, a: &Structure) -> Option<Formula> {
        let edge = a.graph_edge_relation()?;
        Some(with_edge(
            sentence(
                "(forall a. forall b. forall c. (S(a,b,c) -> E(a,b) & E(a,c))) \
                 & (forall a. forall b. (E(a,b) -> exists c. S(a,b,c))) \
                 & (forall a. forall b. forall c. forall d. (S(a,b,c) & S(a,b,d) -> c=d)) \
                 & (forall a. forall b. forall c. forall d. (S(a,b,d) & S(a,c,d) -> b=c))",
            ),
            edge,
        ))
    }

    fn count(&self, a: &Structure) -> Option<u128> {
        Some(degree_factorials(a))
    }

    fn for_each(&self, a: &Structure, f: &mut dyn FnMut(&Table) -> ControlFlow<()>) {
        let g = a.gaifman();
        let blocks = neighbour_blocks(a, |v, p| {
            let nbrs = g.neighbors(v);
            nbrs.iter().zip(p).flat_map(|(&b, &c)| [v, b, c]).collect()
        });
        product(3, &blocks, f);
    }
}

/// Unary predicates that contain or avoid each Gaifman component entirely.
#[derive(Debug, Clone, Copy, Default)]
pub struct ComponentColoring;

impl PresentationScheme for ComponentColoring {
    fn name(&self) -> String {
        "component-coloring".into()
    }

    fn symbol(&self) -> RelSymbol {
        RelSymbol::new("P", 1)
    }

    fn declared_nu(&self) -> Option<usize> {
        Some(1)
    }

    fn notes(&self) -> String {
        "P is a union of Gaifman components".into()
    }

    fn check_class(&self, _a: &Structure) -> Result<(), PresentationError> {
        Ok(())
    }

    fn is_valid(&self, a: &Structure, table: &Table) -> bool {
        if table.arity() != 1 || table.iter().any(|r| r[0] >= a.universe()) {
            return false;
        }
        a.components().iter().all(|comp| {
            let inside = comp.iter().filter(|&&v| table.contains(&[v])).count();
            inside == 0 || inside == comp.len()
        })
    }

    fn validity_sentence(&self, a: &Structure) -> Option<Formula> {
        let (x, y) = (Term::var("x"), Term::var("y"));
        let adj = adjacency_formula(a.signature(), &x, &y);
        let same = Formula::iff(Formula::atom("P", &["x"]), Formula::atom("P", &["y"]));
        Some(Formula::forall("x", Formula::forall("y", Formula::implies(adj, same))))
    }

    fn count(&self, a: &Structure) -> Option<u128> {
        let m = a.components().len() as u32;
        Some(if m >= 128 { u128::MAX } else { 1u128 << m })
    }

    fn for_each(&self, a: &Structure, f: &mut dyn FnMut(&Table) -> ControlFlow<()>) {
        let comps = a.components();
        let m = comps.len();
        let tables = (0u64..1 << m)
            .map(|mask| {
                let rows = (0..m)
                    .filter(|&i| mask >> i & 1 == 1)
                    .flat_map(|i| comps[i].iter().map(|&v| [v]));
                Table::from_tuples(1, rows)
            })
            .collect();
        emit_sorted(tables, f);
    }
}

/// A graph scheme applied to the Gaifman graph of an arbitrary structure.
pub struct GaifmanLift {
    inner: Box<dyn PresentationScheme>,
}

impl GaifmanLift {
    pub fn new(inner: Box<dyn PresentationScheme>) -> Self {
        GaifmanLift { inner }
    }

    fn graph(a: &Structure) -> Structure {
        a.gaifman().to_structure()
    }
}

impl PresentationScheme for GaifmanLift {
    fn name(&self) -> String {
        format!("gaifman-lift:{}", self.inner.name())
    }

    fn symbol(&self) -> RelSymbol {
        self.inner.symbol()
    }

    fn declared_nu(&self) -> Option<usize> {
        self.inner.declared_nu()
    }

    fn notes(&self) -> String {
        format!("{} on the Gaifman graph", self.inner.notes())
    }

    fn check_class(&self, _a: &Structure) -> Result<(), PresentationError> {
        Ok(())
    }

    fn is_valid(&self, a: &Structure, table: &Table) -> bool {
        self.inner.is_valid(&Self::graph(a), table)
    }

    fn validity_sentence(&self, a: &Structure) -> Option<Formula> {
        let inner = self.inner.validity_sentence(&Self::graph(a))?;
        let sig = a.signature().clone();
        Some(inner.replace_atoms("E", &mut |args| {
            Formula::and(
                Formula::not(Formula::eq(args[0].clone(), args[1].clone())),
                adjacency_formula(&sig, &args[0], &args[1]),
            )
        }))
    }

    fn count(&self, a: &Structure) -> Option<u128> {
        self.inner.count(&Self::graph(a))
    }

    fn for_each(&self, a: &Structure, f: &mut dyn FnMut(&Table) -> ControlFlow<()>) {
        self.inner.for_each(&Self::graph(a), f)
    }
}

/// Parses `text` over the signature of `a` extended by the scheme symbol.
pub fn parse_over(scheme: &dyn PresentationScheme, a: &Structure, text: &str) -> Result<Formula, PresentationError> {
    let sig = a.signature().with_relation(scheme.symbol())?;
    Ok(parse(text, &sig)?)
}
