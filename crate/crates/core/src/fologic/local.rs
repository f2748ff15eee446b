//! Distance formulas, relativization to neighbourhoods, and local types.

use std::collections::BTreeMap;

use crate::census::{canonical_key, NeighborhoodType};
use crate::structures::{Element, Radius, Signature, Structure};

use super::formula::{Formula, Term, RESERVED_PREFIX};
use super::LogicError;

/// Supplies fresh reserved variable names.
#[derive(Debug, Clone)]
struct Fresh {
    next: usize,
}

impl Fresh {
    fn after(formulas: &[&Formula]) -> Self {
        let next = formulas
            .iter()
            .flat_map(|f| f.variable_names())
            .filter_map(|v| v.strip_prefix(RESERVED_PREFIX).and_then(|d| d.parse::<usize>().ok()))
            .map(|n| n + 1)
            .max()
            .unwrap_or(0);
        Fresh { next }
    }

    fn take(&mut self) -> String {
        let name = format!("{RESERVED_PREFIX}{}", self.next);
        self.next += 1;
        name
    }
}

/// `adj(u,v)`: some tuple of some relation has `u` and `v` at distinct
/// coordinates. Extra coordinates are existentially quantified.
pub fn adjacency_formula(signature: &Signature, u: &Term, v: &Term) -> Formula {
    let mut fresh = Fresh::after(&[]);
    adjacency(signature, u, v, &mut fresh)
}

fn adjacency(signature: &Signature, u: &Term, v: &Term, fresh: &mut Fresh) -> Formula {
    let mut parts = Vec::new();
    for sym in signature.relations() {
        let k = sym.arity;
        for i in 0..k {
            for j in 0..k {
                if i == j {
                    continue;
                }
                let others: Vec<String> = (0..k - 2).map(|_| fresh.take()).collect();
                let mut rest = others.iter();
                let args = (0..k)
                    .map(|p| {
                        if p == i {
                            u.clone()
                        } else if p == j {
                            v.clone()
                        } else {
                            Term::var(rest.next().unwrap().clone())
                        }
                    })
                    .collect();
                let mut atom = Formula::atom_terms(sym.name.clone(), args);
                for w in others.into_iter().rev() {
                    atom = Formula::exists(w, atom);
                }
                parts.push(atom);
            }
        }
    }
    Formula::disj(parts)
}

/// `delta^r(x,y)`: Gaifman distance between `x` and `y` is at most `r`.
///
/// Built as the chain `exists z0 (z0=x & exists z1 ((adj(z0,z1) | z0=z1) & ... & zr=y))`.
pub fn distance_formula(signature: &Signature, r: usize, x: &str, y: &str) -> Formula {
    let mut fresh = Fresh::after(&[&Formula::atom("_", &[x, y])]);
    distance(signature, r, &Term::var(x), &Term::var(y), &mut fresh)
}

fn distance(signature: &Signature, r: usize, x: &Term, y: &Term, fresh: &mut Fresh) -> Formula {
    let zs: Vec<String> = (0..=r).map(|_| fresh.take()).collect();
    let z = |i: usize| Term::var(zs[i].clone());
    let mut body = Formula::eq(z(r), y.clone());
    for i in (1..=r).rev() {
        let step = Formula::or(
            adjacency(signature, &z(i - 1), &z(i), fresh),
            Formula::eq(z(i - 1), z(i)),
        );
        body = Formula::exists(zs[i].clone(), Formula::and(step, body));
    }
    Formula::exists(zs[0].clone(), Formula::and(Formula::eq(z(0), x.clone()), body))
}

/// Result of relativizing a formula to the `r`-neighbourhood of its centers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Localized {
    pub formula: Formula,
    /// Bound variables renamed to avoid capturing a center, old to new.
    pub renamed: Vec<(String, String)>,
}

/// `phi^r`: every quantifier `Qy` relativized to `delta^r(x_i, y)` for some center `x_i`.
pub fn localize(signature: &Signature, phi: &Formula, r: usize, centers: &[&str]) -> Result<Localized, LogicError> {
    if centers.is_empty() {
        return Err(LogicError::Syntax {
            position: 0,
            message: "localization needs at least one center".into(),
        });
    }
    let phi = phi.bind(signature)?;
    let mut fresh = Fresh::after(&[&phi]);
    let centers: Vec<Term> = centers.iter().map(|c| Term::var(*c)).collect();
    let mut renamed = Vec::new();
    let formula = relativize(signature, &phi, r, &centers, &mut fresh, &mut renamed);
    Ok(Localized { formula, renamed })
}

fn relativize(
    sig: &Signature,
    f: &Formula,
    r: usize,
    centers: &[Term],
    fresh: &mut Fresh,
    renamed: &mut Vec<(String, String)>,
) -> Formula {
    let rec = |g: &Formula, fresh: &mut Fresh, renamed: &mut Vec<(String, String)>| {
        relativize(sig, g, r, centers, fresh, renamed)
    };
    match f {
        Formula::True | Formula::False | Formula::Atom { .. } | Formula::Eq(..) => f.clone(),
        Formula::Not(a) => Formula::not(rec(a, fresh, renamed)),
        Formula::And(a, b) => Formula::and(rec(a, fresh, renamed), rec(b, fresh, renamed)),
        Formula::Or(a, b) => Formula::or(rec(a, fresh, renamed), rec(b, fresh, renamed)),
        Formula::Implies(a, b) => Formula::implies(rec(a, fresh, renamed), rec(b, fresh, renamed)),
        Formula::Iff(a, b) => Formula::iff(rec(a, fresh, renamed), rec(b, fresh, renamed)),
        Formula::Exists(v, body) | Formula::Forall(v, body) => {
            let (v, body) = if centers.iter().any(|c| c.name() == v) {
                let new = fresh.take();
                renamed.push((v.clone(), new.clone()));
                let body = body.substitute(v, &Term::var(new.clone()));
                (new, body)
            } else {
                (v.clone(), (**body).clone())
            };
            let body = rec(&body, fresh, renamed);
            let y = Term::var(v.clone());
            let guard = Formula::disj(
                centers
                    .iter()
                    .map(|c| distance(sig, r, c, &y, fresh))
                    .collect::<Vec<_>>(),
            );
            if matches!(f, Formula::Exists(..)) {
                Formula::exists(v, Formula::and(guard, body))
            } else {
                Formula::forall(v, Formula::implies(guard, body))
            }
        }
    }
}

/// The `r`-local type of `points`: canonical key of the induced structure on
/// the union of their `r`-balls, with the points distinguished.
pub fn local_type(a: &Structure, points: &[Element], r: Radius) -> Result<NeighborhoodType, LogicError> {
    let p = a.tuple_neighborhood(points, r)?;
    let mut t = canonical_key(&p);
    t.radius = r;
    Ok(t)
}

/// Names of the centers mapped to elements, for evaluating a localized formula.
pub fn center_assignment(centers: &[&str], points: &[Element]) -> BTreeMap<String, Element> {
    centers.iter().zip(points).map(|(c, &p)| (c.to_string(), p)).collect()
}
