//! Brute-force reference implementations, sharing no code with the library
//! beyond reading edge tables.

use std::collections::{BTreeSet, VecDeque};

use hanflab::{Element, Structure};

pub fn edge_set(a: &Structure) -> BTreeSet<(Element, Element)> {
    a.table_by_name("E")
        .expect("graph structure")
        .iter()
        .filter(|t| t[0] != t[1])
        .map(|t| (t[0].min(t[1]), t[0].max(t[1])))
        .collect()
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

pub fn connected(a: &Structure) -> bool {
    a.universe() == 0 || bfs(a, 0).iter().all(|&d| d != usize::MAX)
}

/// Number of components by union-find.
pub fn components(a: &Structure) -> usize {
    let mut parent: Vec<usize> = (0..a.universe()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (x, y) in edge_set(a) {
        let (rx, ry) = (find(&mut parent, x), find(&mut parent, y));
        if rx != ry {
            parent[rx] = ry;
        }
    }
    (0..a.universe()).filter(|&v| find(&mut parent, v) == v).count()
}

/// Calls `f` on every permutation of `0..n` in lexicographic order.
pub fn for_each_permutation(n: usize, f: &mut dyn FnMut(&[usize])) {
    let mut p: Vec<usize> = (0..n).collect();
    loop {
        f(&p);
        let Some(i) = (1..n).rev().find(|&i| p[i - 1] < p[i]) else {
            return;
        };
        let j = (i..n).rev().find(|&j| p[j] > p[i - 1]).unwrap();
        p.swap(i - 1, j);
        p[i..].reverse();
    }
}

/// Isomorphism by trying every bijection.
pub fn isomorphic(a: &Structure, b: &Structure) -> bool {
    let n = a.universe();
    let (ea, eb) = (edge_set(a), edge_set(b));
    if n != b.universe() || ea.len() != eb.len() {
        return false;
    }
    let mut found = false;
    for_each_permutation(n, &mut |p| {
        found = found || ea.iter().all(|&(x, y)| eb.contains(&(p[x].min(p[y]), p[x].max(p[y]))));
    });
    found
}

/// Canonical form of a pointed graph: the least adjacency bit string over all
/// bijections sending the distinct points to `0..k` in order.
pub fn brute_canonical_form(a: &Structure, points: &[Element]) -> (usize, usize, u64) {
    let n = a.universe();
    let adj: Vec<u64> = adjacency(a)
        .iter()
        .map(|ns| ns.iter().fold(0u64, |m, &w| m | 1 << w))
        .collect();
    let rest: Vec<Element> = (0..n).filter(|v| !points.contains(v)).collect();
    let mut best = u64::MAX;
    for_each_permutation(rest.len(), &mut |p| {
        // order[i] is the vertex placed at position i
        let order: Vec<Element> = points.iter().copied().chain(p.iter().map(|&i| rest[i])).collect();
        let mut code = 0u64;
        let mut bit = 0;
        for i in 0..n {
            for j in i + 1..n {
                if adj[order[i]] >> order[j] & 1 == 1 {
                    code |= 1 << bit;
                }
                bit += 1;
            }
        }
        best = best.min(code);
    });
    (n, points.len(), best)
}

/// The graph with vertex `v` renamed to `p[v]`.
pub fn relabel(a: &Structure, p: &[Element]) -> Structure {
    let edges: Vec<(Element, Element)> = edge_set(a).into_iter().map(|(x, y)| (p[x], p[y])).collect();
    Structure::graph(a.universe(), &edges)
}

/// Largest subset of `candidates` with pairwise distances above `2r`.
pub fn max_scatter(a: &Structure, candidates: &[Element], r: usize) -> usize {
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
