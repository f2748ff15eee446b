//! Presentation tables as bit sets over the tuple space, and symmetry
//! reduction of subsets by automorphisms.

use crate::structures::{Element, Structure, Table};

use super::schemes::{next_permutation, permutations};

/// A set of tuples, one bit per tuple of `universe^arity`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Code {
    Small(u128),
    Large(Box<[u64]>),
}

impl Code {
    pub fn and(&self, other: &Code) -> Code {
        match (self, other) {
            (Code::Small(a), Code::Small(b)) => Code::Small(a & b),
            (Code::Large(a), Code::Large(b)) => Code::Large(a.iter().zip(b.iter()).map(|(x, y)| x & y).collect()),
            _ => panic!("codes from different frames"),
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Code::Small(a) => *a == 0,
            Code::Large(a) => a.iter().all(|&w| w == 0),
        }
    }

    fn bit(&self, i: usize) -> bool {
        match self {
            Code::Small(a) => a >> i & 1 == 1,
            Code::Large(a) => a[i / 64] >> (i % 64) & 1 == 1,
        }
    }
}

/// Tuple indexing for one universe size and arity.
#[derive(Debug, Clone)]
pub struct Frame {
    pub universe: usize,
    pub arity: usize,
    size: usize,
}

impl Frame {
    pub fn new(universe: usize, arity: usize) -> Self {
        let size = universe.checked_pow(arity as u32).expect("tuple space fits in memory");
        Frame { universe, arity, size }
    }

    fn index(&self, tuple: &[Element]) -> usize {
        tuple.iter().fold(0, |acc, &e| acc * self.universe + e)
    }

    /// The tuple with index `i`.
    pub fn decode_index(&self, i: usize) -> Vec<Element> {
        self.tuple(i)
    }

    /// `code` with the membership of tuple `i` toggled.
    pub fn flip(&self, code: &Code, i: usize) -> Code {
        let mut c = code.clone();
        match &mut c {
            Code::Small(a) => *a ^= 1 << i,
            Code::Large(a) => a[i / 64] ^= 1 << (i % 64),
        }
        c
    }

    fn tuple(&self, mut i: usize) -> Vec<Element> {
        let mut t = vec![0; self.arity];
        for slot in t.iter_mut().rev() {
            *slot = i % self.universe;
            i /= self.universe;
        }
        t
    }

    pub fn empty(&self) -> Code {
        if self.size <= 128 {
            Code::Small(0)
        } else {
            Code::Large(vec![0u64; self.size.div_ceil(64)].into_boxed_slice())
        }
    }

    fn set(&self, code: &mut Code, i: usize) {
        match code {
            Code::Small(a) => *a |= 1 << i,
            Code::Large(a) => a[i / 64] |= 1 << (i % 64),
        }
    }

    pub fn encode(&self, table: &Table) -> Code {
        let mut c = self.empty();
        for row in table.iter() {
            self.set(&mut c, self.index(row));
        }
        c
    }

    pub fn decode(&self, code: &Code) -> Table {
        let rows = (0..self.size).filter(|&i| code.bit(i)).map(|i| self.tuple(i));
        Table::from_tuples(self.arity, rows)
    }

    /// All tuples with every entry in `subset`.
    pub fn mask(&self, subset: &[bool]) -> Code {
        let mut c = self.empty();
        for i in 0..self.size {
            if self.tuple(i).iter().all(|&e| subset[e]) {
                self.set(&mut c, i);
            }
        }
        c
    }

    /// Tuples of `code` that avoid every element outside `subset`, relabeled
    /// to the positions of `origin` (sorted subset elements).
    pub fn restrict_to(&self, code: &Code, origin: &[Element]) -> Table {
        let mut index = vec![usize::MAX; self.universe];
        for (new, &old) in origin.iter().enumerate() {
            index[old] = new;
        }
        let rows = (0..self.size)
            .filter(|&i| code.bit(i))
            .map(|i| self.tuple(i))
            .filter(|t| t.iter().all(|&e| index[e] != usize::MAX))
            .map(|t| t.iter().map(|&e| index[e]).collect::<Vec<_>>());
        Table::from_tuples(self.arity, rows)
    }

    /// Encodes a table over the positions of `origin` back into this frame.
    pub fn lift(&self, table: &Table, origin: &[Element]) -> Code {
        let mut c = self.empty();
        for row in table.iter() {
            let t: Vec<Element> = row.iter().map(|&e| origin[e]).collect();
            self.set(&mut c, self.index(&t));
        }
        c
    }
}

/// Largest universe for which automorphisms are enumerated by brute force.
pub const SYMMETRY_LIMIT: usize = 7;

/// Automorphisms of `a` (as maps `v -> image`) when the universe is at most
/// [`SYMMETRY_LIMIT`]; otherwise only the identity.
pub fn automorphisms(a: &Structure) -> Vec<Vec<Element>> {
    let n = a.universe();
    let id: Vec<Element> = (0..n).collect();
    if n > SYMMETRY_LIMIT {
        return vec![id];
    }
    let preserved = |p: &[Element]| {
        a.constant_values().iter().all(|&c| p[c] == c)
            && a.tables().iter().all(|t| {
                t.iter()
                    .all(|row| t.contains(&row.iter().map(|&v| p[v]).collect::<Vec<_>>()))
            })
    };
    let mut out = Vec::new();
    let mut p = id;
    loop {
        if preserved(&p) {
            out.push(p.clone());
        }
        if !next_permutation(&mut p) {
            break;
        }
    }
    out
}

fn image(mask: u64, p: &[Element]) -> u64 {
    (0..p.len())
        .filter(|&v| mask >> v & 1 == 1)
        .fold(0, |m, v| m | 1 << p[v])
}

/// Subsets of the universe (as bit masks), one per orbit under `group`,
/// each the least mask of its orbit, in increasing order.
pub fn subset_representatives(n: usize, group: &[Vec<Element>]) -> Vec<u64> {
    (0u64..1 << n)
        .filter(|&m| group.iter().all(|p| image(m, p) >= m))
        .collect()
}

/// Ordered pairs of disjoint subsets, one per orbit under `group`.
pub fn disjoint_pair_representatives(n: usize, group: &[Vec<Element>]) -> Vec<(u64, u64)> {
    let mut out = Vec::new();
    // each element goes to B, C, or neither
    let total = 3u64.pow(n as u32);
    for code in 0..total {
        let (mut b, mut c, mut x) = (0u64, 0u64, code);
        for v in 0..n {
            match x % 3 {
                1 => b |= 1 << v,
                2 => c |= 1 << v,
                _ => {}
            }
            x /= 3;
        }
        if group.iter().all(|p| (image(b, p), image(c, p)) >= (b, c)) {
            out.push((b, c));
        }
    }
    out.sort_unstable();
    out
}

pub fn mask_elements(mask: u64, n: usize) -> Vec<Element> {
    (0..n).filter(|&v| mask >> v & 1 == 1).collect()
}

pub fn mask_flags(mask: u64, n: usize) -> Vec<bool> {
    (0..n).map(|v| mask >> v & 1 == 1).collect()
}

/// Every permutation of `0..n`, for callers needing the full symmetric group.
pub fn symmetric_group(n: usize) -> Vec<Vec<Element>> {
    permutations(&(0..n).collect::<Vec<_>>())
}
