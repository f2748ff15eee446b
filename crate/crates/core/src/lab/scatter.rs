//! Scattered sets and empirical wideness.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::structures::{Element, Radius, Structure};

use super::{Corpus, LabError};

/// Largest universe handled by [`wideness_estimate`] and [`max_scatter`].
pub const WIDENESS_LIMIT: usize = 20;

/// Whether the `r`-balls around `x` and `y` are disjoint.
fn far(dist: &[Vec<Option<usize>>], x: Element, y: Element, r: Radius) -> bool {
    match (dist[x][y], r) {
        (None, _) => true,
        (Some(_), Radius::Infinite) => false,
        (Some(d), Radius::Finite(r)) => d > 2 * r,
    }
}

/// Whether `x` is `r`-scattered away from `y`.
pub fn scattered_check(a: &Structure, x: &[Element], r: Radius, y: &[Element]) -> Result<bool, LabError> {
    for &e in x.iter().chain(y) {
        a.check_element(e)?;
    }
    let dist = a.gaifman().distance_matrix();
    Ok(scattered_with(&dist, x, r, y))
}

fn scattered_with(dist: &[Vec<Option<usize>>], x: &[Element], r: Radius, y: &[Element]) -> bool {
    x.iter().enumerate().all(|(i, &u)| {
        x[i + 1..].iter().all(|&v| u != v && far(dist, u, v, r)) && y.iter().all(|&v| far(dist, u, v, r))
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GreedyScatter {
    pub set: Vec<Element>,
    /// Candidates whose `r`-balls miss those of `away_from`.
    pub eligible: usize,
    pub max_ball: usize,
    pub max_double_ball: usize,
    /// `eligible / (max_ball * max_double_ball)`, rounded up.
    pub lower_bound: usize,
    pub bound_holds: bool,
}

/// Greedy maximal `r`-scattered subset of `candidates` away from `away_from`,
/// scanning candidates in increasing element order.
pub fn greedy_scatter(
    a: &Structure,
    candidates: &[Element],
    r: Radius,
    away_from: &[Element],
) -> Result<GreedyScatter, LabError> {
    for &e in candidates.iter().chain(away_from) {
        a.check_element(e)?;
    }
    let g = a.gaifman();
    let dist = g.distance_matrix();
    let mut sorted = candidates.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let eligible: Vec<Element> = sorted
        .into_iter()
        .filter(|&x| away_from.iter().all(|&y| far(&dist, x, y, r)))
        .collect();
    let mut set: Vec<Element> = Vec::new();
    for &x in &eligible {
        if set.iter().all(|&y| far(&dist, x, y, r)) {
            set.push(x);
        }
    }
    let double = match r {
        Radius::Finite(k) => Radius::Finite(2 * k),
        Radius::Infinite => Radius::Infinite,
    };
    let n = a.universe();
    let max_ball = (0..n).map(|v| g.ball(v, r).len()).max().unwrap_or(1);
    let max_double_ball = (0..n).map(|v| g.ball(v, double).len()).max().unwrap_or(1);
    let lower_bound = eligible.len().div_ceil(max_ball * max_double_ball);
    Ok(GreedyScatter {
        bound_holds: set.len() >= lower_bound,
        set,
        eligible: eligible.len(),
        max_ball,
        max_double_ball,
        lower_bound,
    })
}

/// Conflict masks: `conflict[v]` holds every `u` whose `r`-ball meets `v`'s.
fn conflicts(dist: &[Vec<Option<usize>>], r: Radius) -> Vec<u32> {
    let n = dist.len();
    (0..n)
        .map(|v| (0..n).filter(|&u| !far(dist, u, v, r)).fold(0u32, |m, u| m | 1 << u))
        .collect()
}

/// Size of a largest `r`-scattered subset of every subset of the universe,
/// indexed by bit mask.
fn max_scatter_table(conflict: &[u32]) -> Vec<u8> {
    let n = conflict.len();
    let mut best = vec![0u8; 1 << n];
    for w in 1usize..1 << n {
        let v = w.trailing_zeros() as usize;
        let without = best[w & !(1 << v)];
        let with = 1 + best[w & !(conflict[v] as usize)];
        best[w] = without.max(with);
    }
    best
}

/// Size of a largest `r`-scattered subset of `candidates` away from `away_from`.
pub fn max_scatter(a: &Structure, candidates: &[Element], r: Radius, away_from: &[Element]) -> Result<usize, LabError> {
    let n = a.universe();
    if n > WIDENESS_LIMIT {
        return Err(LabError::TooLarge(n));
    }
    for &e in candidates.iter().chain(away_from) {
        a.check_element(e)?;
    }
    let conflict = conflicts(&a.gaifman().distance_matrix(), r);
    let blocked = away_from.iter().fold(0u32, |m, &y| m | conflict[y]);
    let w = candidates.iter().fold(0u32, |m, &x| m | 1 << x) & !blocked;
    // restricted search avoids the full table for sparse requests
    fn search(w: u32, conflict: &[u32]) -> usize {
        if w == 0 {
            return 0;
        }
        let v = w.trailing_zeros() as usize;
        search(w & !(1 << v), conflict).max(1 + search(w & !conflict[v], conflict))
    }
    Ok(search(w, &conflict))
}

/// One row of a wideness table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct WidenessRow {
    pub m: usize,
    pub zeta: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct WidenessTable {
    pub corpus: String,
    pub r: Radius,
    pub q: usize,
    pub rows: Vec<WidenessRow>,
}

fn subsets_of_size(n: usize, k: usize) -> Vec<u32> {
    (0u32..1 << n).filter(|m| m.count_ones() as usize == k).collect()
}

/// For each `m` in `1..=p`, the least `s` such that every set of at least
/// `s` elements in a corpus structure contains `m` elements that are
/// `r`-scattered away from every `q`-element set.
pub fn wideness_estimate(corpus: &Corpus, r: Radius, p: usize, q: usize) -> Result<WidenessTable, LabError> {
    // largest |W| whose guaranteed scatter size is below m, per m
    let mut worst: BTreeMap<usize, usize> = (1..=p).map(|m| (m, m - 1)).collect();
    for a in &corpus.structures {
        let n = a.universe();
        if n > WIDENESS_LIMIT {
            return Err(LabError::TooLarge(n));
        }
        let conflict = conflicts(&a.gaifman().distance_matrix(), r);
        let table = max_scatter_table(&conflict);
        let blocks: Vec<u32> = subsets_of_size(n, q.min(n))
            .into_iter()
            .map(|z| (0..n).filter(|&y| z >> y & 1 == 1).fold(0u32, |m, y| m | conflict[y]))
            .collect();
        for w in 0u32..1 << n {
            let guaranteed = blocks
                .iter()
                .map(|&b| table[(w & !b) as usize] as usize)
                .min()
                .unwrap_or(0);
            let size = w.count_ones() as usize;
            for (&m, slot) in worst.range_mut(guaranteed + 1..) {
                debug_assert!(m > guaranteed);
                if size > *slot {
                    *slot = size;
                }
            }
        }
    }
    Ok(WidenessTable {
        corpus: corpus.spec.clone(),
        r,
        q,
        rows: worst.into_iter().map(|(m, s)| WidenessRow { m, zeta: s + 1 }).collect(),
    })
}
