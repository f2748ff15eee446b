//! Ehrenfeucht–Fraïssé games on finite structures.

use rustc_hash::FxHashMap;

use crate::structures::{Element, Structure};

use super::LogicError;

/// A q-round game between two fixed structures, with a memo of decided positions.
pub struct EfGame<'a> {
    a: &'a Structure,
    b: &'a Structure,
    memo: FxHashMap<(Vec<(Element, Element)>, usize), bool>,
}

impl<'a> EfGame<'a> {
    pub fn new(a: &'a Structure, b: &'a Structure) -> Result<Self, LogicError> {
        if a.signature() != b.signature() {
            return Err(LogicError::SignatureMismatch);
        }
        Ok(EfGame {
            a,
            b,
            memo: FxHashMap::default(),
        })
    }

    /// Pairs fixed by the constants before the first round.
    pub fn initial_position(&self) -> Vec<(Element, Element)> {
        let mut pairs: Vec<_> = self
            .a
            .constant_values()
            .iter()
            .copied()
            .zip(self.b.constant_values().iter().copied())
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        pairs
    }

    /// Whether `pairs` is a partial isomorphism between the two structures.
    pub fn is_partial_isomorphism(&self, pairs: &[(Element, Element)]) -> bool {
        for (i, &(a1, b1)) in pairs.iter().enumerate() {
            for &(a2, b2) in &pairs[i + 1..] {
                if (a1 == a2) != (b1 == b2) {
                    return false;
                }
            }
        }
        let fwd = |x: Element| pairs.iter().find(|p| p.0 == x).map(|p| p.1);
        let bwd = |y: Element| pairs.iter().find(|p| p.1 == y).map(|p| p.0);
        for (ta, tb) in self.a.tables().iter().zip(self.b.tables()) {
            let mut img = Vec::with_capacity(ta.arity());
            for tup in ta.iter() {
                img.clear();
                if tup.iter().all(|&x| fwd(x).map(|y| img.push(y)).is_some()) && !tb.contains(&img) {
                    return false;
                }
            }
            for tup in tb.iter() {
                img.clear();
                if tup.iter().all(|&y| bwd(y).map(|x| img.push(x)).is_some()) && !ta.contains(&img) {
                    return false;
                }
            }
        }
        true
    }

    /// Duplicator wins the remaining `rounds` from `pairs`.
    pub fn duplicator_wins(&mut self, pairs: &[(Element, Element)], rounds: usize) -> bool {
        if !self.is_partial_isomorphism(pairs) {
            return false;
        }
        self.wins_from(pairs.to_vec(), rounds)
    }

    fn wins_from(&mut self, pairs: Vec<(Element, Element)>, rounds: usize) -> bool {
        if rounds == 0 {
            return true;
        }
        let key = (pairs, rounds);
        if let Some(&v) = self.memo.get(&key) {
            return v;
        }
        let pairs = key.0.clone();
        let result = self.spoiler_in(&pairs, rounds, true) && self.spoiler_in(&pairs, rounds, false);
        self.memo.insert(key, result);
        result
    }

    /// Every Spoiler move in one structure has a winning Duplicator reply.
    /// Re-picking an already played element is never better for Spoiler.
    fn spoiler_in(&mut self, pairs: &[(Element, Element)], rounds: usize, left: bool) -> bool {
        let (n_from, n_to) = if left {
            (self.a.universe(), self.b.universe())
        } else {
            (self.b.universe(), self.a.universe())
        };
        let used_from = |x: Element| pairs.iter().any(|p| if left { p.0 == x } else { p.1 == x });
        let used_to = |y: Element| pairs.iter().any(|p| if left { p.1 == y } else { p.0 == y });
        for x in (0..n_from).filter(|&x| !used_from(x)) {
            let mut answered = false;
            for y in (0..n_to).filter(|&y| !used_to(y)) {
                let mut next = pairs.to_vec();
                next.push(if left { (x, y) } else { (y, x) });
                next.sort_unstable();
                if self.is_partial_isomorphism(&next) && self.wins_from(next, rounds - 1) {
                    answered = true;
                    break;
                }
            }
            if !answered {
                return false;
            }
        }
        true
    }
}

/// `A ≡_q B`: Duplicator wins the `q`-round game.
pub fn ef_equivalent(a: &Structure, b: &Structure, q: usize) -> Result<bool, LogicError> {
    let mut game = EfGame::new(a, b)?;
    let start = game.initial_position();
    Ok(game.duplicator_wins(&start, q))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_is_equivalent() {
        let p = Structure::path(4);
        for q in 0..4 {
            assert!(ef_equivalent(&p, &p, q).unwrap());
        }
    }

    #[test]
    fn triangle_against_path() {
        let k3 = Structure::complete(3);
        let p3 = Structure::path(3);
        assert!(ef_equivalent(&k3, &p3, 1).unwrap());
        assert!(!ef_equivalent(&k3, &p3, 2).unwrap());
    }

    #[test]
    fn hexagon_against_two_triangles() {
        let c6 = Structure::cycle(6);
        let tt = Structure::cycle(3).disjoint_union(&Structure::cycle(3)).unwrap();
        assert!(ef_equivalent(&c6, &tt, 1).unwrap());
        assert!(ef_equivalent(&c6, &tt, 2).unwrap());
        assert!(!ef_equivalent(&c6, &tt, 3).unwrap());
    }

    #[test]
    fn sizes_are_distinguished() {
        let a = Structure::edgeless(2);
        let b = Structure::edgeless(3);
        assert!(ef_equivalent(&a, &b, 2).unwrap());
        assert!(!ef_equivalent(&a, &b, 3).unwrap());
    }
}
