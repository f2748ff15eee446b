//! Canonical labeling by colour refinement and individualization.
//!
//! The search tree branches on every vertex of the first non-singleton cell
//! of an equitable colouring. Each discrete leaf gives a relabeling; the key
//! is the least leaf serialization. Leaves equal to the first or best leaf
//! yield automorphisms, which prune siblings in the same orbit under the
//! pointwise stabilizer of the current prefix.

use crate::structures::{Element, Structure};

/// Result of canonizing a pointed structure.
#[derive(Debug, Clone)]
pub struct Canon {
    pub key: Vec<u8>,
    /// `labeling[v]` is the canonical position of vertex `v`.
    pub labeling: Vec<Element>,
    /// Automorphism generators discovered during the search.
    pub generators: Vec<Vec<Element>>,
}

struct Incidence {
    rel: u32,
    tuple: u32,
    pos: u32,
}

struct Search<'a> {
    s: &'a Structure,
    points: &'a [Element],
    incidence: Vec<Vec<Incidence>>,
    first: Option<(Vec<u8>, Vec<Element>)>,
    best: Option<(Vec<u8>, Vec<Element>)>,
    automorphisms: Vec<Vec<Element>>,
}

pub fn canonize(s: &Structure, points: &[Element]) -> Canon {
    let n = s.universe();
    let mut incidence: Vec<Vec<Incidence>> = (0..n).map(|_| Vec::new()).collect();
    for (ri, t) in s.tables().iter().enumerate() {
        for (ti, tup) in t.iter().enumerate() {
            for (p, &v) in tup.iter().enumerate() {
                incidence[v].push(Incidence {
                    rel: ri as u32,
                    tuple: ti as u32,
                    pos: p as u32,
                });
            }
        }
    }
    let mut search = Search {
        s,
        points,
        incidence,
        first: None,
        best: None,
        automorphisms: Vec::new(),
    };
    let initial = search.initial_colors();
    let mut prefix = Vec::new();
    search.descend(initial, &mut prefix);
    let (key, labeling) = search.best.expect("search reaches a leaf");
    Canon {
        key,
        labeling,
        generators: search.automorphisms,
    }
}

/// Dense ranks of `keys`, in sorted key order.
fn rank<K: Ord>(keys: &[K]) -> Vec<u32> {
    let mut idx: Vec<usize> = (0..keys.len()).collect();
    idx.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
    let mut out = vec![0u32; keys.len()];
    let mut r = 0u32;
    for w in 0..idx.len() {
        if w > 0 && keys[idx[w]] != keys[idx[w - 1]] {
            r += 1;
        }
        out[idx[w]] = r;
    }
    out
}

fn color_count(colors: &[u32]) -> usize {
    colors.iter().max().map_or(0, |&m| m as usize + 1)
}

impl Search<'_> {
    fn initial_colors(&self) -> Vec<u32> {
        let n = self.s.universe();
        let keys: Vec<(Vec<usize>, Vec<usize>)> = (0..n)
            .map(|v| {
                let pts = (0..self.points.len()).filter(|&i| self.points[i] == v).collect();
                let consts = (0..self.s.constant_values().len())
                    .filter(|&i| self.s.constant_values()[i] == v)
                    .collect();
                (pts, consts)
            })
            .collect();
        rank(&keys)
    }

    /// Refines to the coarsest equitable colouring below `colors`.
    fn refine(&self, mut colors: Vec<u32>) -> Vec<u32> {
        let n = colors.len();
        let mut count = color_count(&colors);
        loop {
            if count == n {
                return colors;
            }
            let keys: Vec<(u32, Vec<Vec<u32>>)> = (0..n)
                .map(|v| {
                    let mut entries: Vec<Vec<u32>> = self.incidence[v]
                        .iter()
                        .map(|inc| {
                            let tup = self.s.table(inc.rel as usize).row(inc.tuple as usize);
                            let mut e = Vec::with_capacity(2 + 2 * tup.len());
                            e.push(inc.rel);
                            e.push(inc.pos);
                            e.extend(tup.iter().map(|&w| colors[w]));
                            e.extend(tup.iter().map(|&w| tup.iter().position(|&x| x == w).unwrap() as u32));
                            e
                        })
                        .collect();
                    entries.sort_unstable();
                    (colors[v], entries)
                })
                .collect();
            let next = rank(&keys);
            let c = color_count(&next);
            colors = next;
            if c == count {
                return colors;
            }
            count = c;
        }
    }

    fn descend(&mut self, colors: Vec<u32>, prefix: &mut Vec<Element>) {
        let colors = self.refine(colors);
        let n = colors.len();
        let k = color_count(&colors);
        if k == n {
            self.leaf(colors.iter().map(|&c| c as Element).collect());
            return;
        }
        let mut sizes = vec![0usize; k];
        for &c in &colors {
            sizes[c as usize] += 1;
        }
        let target = sizes.iter().position(|&s| s > 1).unwrap() as u32;
        let cell: Vec<Element> = (0..n).filter(|&v| colors[v] == target).collect();
        let mut explored: Vec<Element> = Vec::new();
        for &w in &cell {
            if !explored.is_empty() && self.in_explored_orbit(w, &explored, prefix) {
                continue;
            }
            let keys: Vec<(u32, bool)> = (0..n).map(|v| (colors[v], v != w)).collect();
            let child = rank(&keys);
            prefix.push(w);
            self.descend(child, prefix);
            prefix.pop();
            explored.push(w);
        }
    }

    /// Whether `w` is in the orbit of an explored vertex under the known
    /// automorphisms fixing `prefix` pointwise.
    fn in_explored_orbit(&self, w: Element, explored: &[Element], prefix: &[Element]) -> bool {
        let n = self.s.universe();
        let gens: Vec<&Vec<Element>> = self
            .automorphisms
            .iter()
            .filter(|g| prefix.iter().all(|&p| g[p] == p))
            .collect();
        if gens.is_empty() {
            return false;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![w];
        seen[w] = true;
        while let Some(u) = stack.pop() {
            if explored.contains(&u) {
                return true;
            }
            for g in &gens {
                let x = g[u];
                if !seen[x] {
                    seen[x] = true;
                    stack.push(x);
                }
            }
        }
        false
    }

    fn leaf(&mut self, labeling: Vec<Element>) {
        let bytes = serialize(self.s, self.points, &labeling);
        for reference in [&self.first, &self.best].into_iter().flatten() {
            if reference.0 == bytes {
                let mut inv = vec![0; labeling.len()];
                for (v, &l) in reference.1.iter().enumerate() {
                    inv[l] = v;
                }
                let auto: Vec<Element> = labeling.iter().map(|&l| inv[l]).collect();
                if auto.iter().enumerate().any(|(i, &x)| i != x) && !self.automorphisms.contains(&auto) {
                    self.automorphisms.push(auto);
                }
                break;
            }
        }
        if self.first.is_none() {
            self.first = Some((bytes.clone(), labeling.clone()));
        }
        if self.best.as_ref().is_none_or(|b| bytes < b.0) {
            self.best = Some((bytes, labeling));
        }
    }
}

fn push_u32(out: &mut Vec<u8>, x: usize) {
    out.extend_from_slice(&(x as u32).to_be_bytes());
}

fn push_name(out: &mut Vec<u8>, name: &str) {
    push_u32(out, name.len());
    out.extend_from_slice(name.as_bytes());
}

/// Serialization of the structure relabeled by `labeling`.
fn serialize(s: &Structure, points: &[Element], labeling: &[Element]) -> Vec<u8> {
    let mut out = Vec::new();
    push_u32(&mut out, s.universe());
    push_u32(&mut out, s.tables().len());
    for (sym, t) in s.signature().relations().iter().zip(s.tables()) {
        push_name(&mut out, &sym.name);
        push_u32(&mut out, sym.arity);
        push_u32(&mut out, t.len());
        let mut rows: Vec<Vec<Element>> = t.iter().map(|r| r.iter().map(|&v| labeling[v]).collect()).collect();
        rows.sort_unstable();
        for row in rows {
            for v in row {
                push_u32(&mut out, v);
            }
        }
    }
    push_u32(&mut out, s.constant_values().len());
    for (name, &v) in s.signature().constants().iter().zip(s.constant_values()) {
        push_name(&mut out, name);
        push_u32(&mut out, labeling[v]);
    }
    push_u32(&mut out, points.len());
    for &p in points {
        push_u32(&mut out, labeling[p]);
    }
    out
}
