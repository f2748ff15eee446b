#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use hanflab::{Element, Structure};

/// Undirected edge set of a graph structure, read straight from its `E` table.
pub fn edge_set(a: &Structure) -> BTreeSet<(Element, Element)> {
    a.table_by_name("E")
        .expect("graph structure")
        .iter()
        .map(|t| (t[0].min(t[1]), t[0].max(t[1])))
        .collect()
}

pub fn permutations(n: usize) -> Vec<Vec<Element>> {
    fn rec(prefix: &mut Vec<Element>, used: &mut Vec<bool>, out: &mut Vec<Vec<Element>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for v in 0..used.len() {
            if !used[v] {
                used[v] = true;
                prefix.push(v);
                rec(prefix, used, out);
                prefix.pop();
                used[v] = false;
            }
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Isomorphism of graphs with distinguished points by trying every bijection.
pub fn brute_isomorphic(a: &Structure, pa: &[Element], b: &Structure, pb: &[Element]) -> bool {
    let n = a.universe();
    if n != b.universe() || pa.len() != pb.len() {
        return false;
    }
    let (ea, eb) = (edge_set(a), edge_set(b));
    if ea.len() != eb.len() {
        return false;
    }
    permutations(n).into_iter().any(|p| {
        pa.iter().zip(pb).all(|(&x, &y)| p[x] == y)
            && ea.iter().all(|&(x, y)| eb.contains(&(p[x].min(p[y]), p[x].max(p[y]))))
    })
}

/// The graph with vertex `v` renamed to `p[v]`.
pub fn relabel(a: &Structure, p: &[Element]) -> Structure {
    let edges: Vec<(Element, Element)> = edge_set(a).into_iter().map(|(x, y)| (p[x], p[y])).collect();
    Structure::graph(a.universe(), &edges)
}

pub fn adjacency(a: &Structure) -> Vec<Vec<Element>> {
    let mut adj = vec![Vec::new(); a.universe()];
    for (x, y) in edge_set(a) {
        adj[x].push(y);
        adj[y].push(x);
    }
    adj
}

/// Breadth-first distances from `s`; `usize::MAX` when unreachable.
pub fn bfs(a: &Structure, s: Element) -> Vec<usize> {
    let adj = adjacency(a);
    let mut dist = vec![usize::MAX; a.universe()];
    dist[s] = 0;
    let mut queue = VecDeque::from([s]);
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if dist[w] == usize::MAX {
                dist[w] = dist[v] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// Number of connected components by union-find.
pub fn union_find_components(a: &Structure) -> usize {
    let n = a.universe();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        let mut y = x;
        while parent[y] != r {
            let next = parent[y];
            parent[y] = r;
            y = next;
        }
        r
    }
    for (x, y) in edge_set(a) {
        let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
        if rx != ry {
            parent[rx] = ry;
        }
    }
    (0..n).filter(|&v| find(&mut parent, v) == v).count()
}

/// Largest subset of `candidates` whose pairwise distances exceed `2r`, by
/// trying every subset.
pub fn exhaustive_max_scatter(a: &Structure, candidates: &[Element], r: usize) -> usize {
    let dist: Vec<Vec<usize>> = (0..a.universe()).map(|v| bfs(a, v)).collect();
    let k = candidates.len();
    (0u32..1 << k)
        .filter(|m| {
            let chosen: Vec<Element> = (0..k).filter(|&i| m >> i & 1 == 1).map(|i| candidates[i]).collect();
            chosen
                .iter()
                .enumerate()
                .all(|(i, &x)| chosen[i + 1..].iter().all(|&y| dist[x][y] > 2 * r))
        })
        .map(|m| m.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

/// Every graph on `n` labelled vertices.
pub fn labelled_graphs(n: usize) -> Vec<Structure> {
    let pairs: Vec<(Element, Element)> = (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect();
    (0u64..1 << pairs.len())
        .map(|m| {
            let edges: Vec<_> = (0..pairs.len())
                .filter(|&i| m >> i & 1 == 1)
                .map(|i| pairs[i])
                .collect();
            Structure::graph(n, &edges)
        })
        .collect()
}
