//! Naive recursive model checking with short-circuiting.

use std::collections::BTreeMap;

use crate::structures::{Element, Structure, Table};

use super::formula::{Formula, Term};
use super::LogicError;

pub type Assignment = BTreeMap<String, Element>;

/// Relation membership, dense when the tuple space is small.
enum Membership<'a> {
    Dense { bits: Vec<u64>, n: usize },
    Sparse(&'a Table),
}

impl Membership<'_> {
    fn contains(&self, tuple: &[Element]) -> bool {
        match self {
            Membership::Dense { bits, n } => {
                let idx = tuple.iter().fold(0usize, |acc, &e| acc * n + e);
                bits[idx / 64] >> (idx % 64) & 1 == 1
            }
            Membership::Sparse(t) => t.contains(tuple),
        }
    }
}

const DENSE_LIMIT: usize = 1 << 22;

/// A structure prepared for repeated evaluation.
pub struct Model<'a> {
    structure: &'a Structure,
    relations: Vec<Membership<'a>>,
}

impl<'a> Model<'a> {
    pub fn new(structure: &'a Structure) -> Self {
        let n = structure.universe();
        let relations = structure
            .tables()
            .iter()
            .map(|t| {
                let space = n.checked_pow(t.arity() as u32).filter(|&s| s <= DENSE_LIMIT);
                match space {
                    Some(space) => {
                        let mut bits = vec![0u64; space.div_ceil(64).max(1)];
                        for tup in t.iter() {
                            let idx = tup.iter().fold(0usize, |acc, &e| acc * n + e);
                            bits[idx / 64] |= 1 << (idx % 64);
                        }
                        Membership::Dense { bits, n }
                    }
                    None => Membership::Sparse(t),
                }
            })
            .collect();
        Model { structure, relations }
    }

    pub fn structure(&self) -> &Structure {
        self.structure
    }

    /// Evaluates `phi` under `sigma`, which must cover its free variables.
    pub fn eval(&self, phi: &Formula, sigma: &Assignment) -> Result<bool, LogicError> {
        let free: Vec<String> = phi
            .free_variables()
            .into_iter()
            .filter(|v| sigma.contains_key(v) || self.structure.constant(v).is_none())
            .collect();
        let compiled = Compiled::new(self.structure, phi, &free)?;
        let mut values = Vec::with_capacity(free.len());
        for v in &free {
            let &e = sigma.get(v).ok_or_else(|| LogicError::UnboundVariable(v.clone()))?;
            self.structure
                .check_element(e)
                .map_err(|_| LogicError::ElementOutOfRange {
                    variable: v.clone(),
                    element: e,
                })?;
            values.push(e);
        }
        Ok(compiled.eval(self, &values))
    }
}

#[derive(Debug, Clone, Copy)]
enum Slot {
    Var(usize),
    Elem(Element),
}

#[derive(Debug, Clone)]
enum Node {
    True,
    False,
    Rel(usize, Vec<Slot>),
    Eq(Slot, Slot),
    Not(Box<Node>),
    And(Box<Node>, Box<Node>),
    Or(Box<Node>, Box<Node>),
    Implies(Box<Node>, Box<Node>),
    Iff(Box<Node>, Box<Node>),
    Exists(usize, Box<Node>),
    Forall(usize, Box<Node>),
}

/// A formula resolved against a structure's signature, with variables
/// mapped to register slots. The first slots hold the listed parameters.
#[derive(Debug, Clone)]
pub struct Compiled {
    root: Node,
    slots: usize,
    params: usize,
}

impl Compiled {
    pub fn new(structure: &Structure, phi: &Formula, params: &[String]) -> Result<Self, LogicError> {
        let mut scope: Vec<(String, usize)> = params.iter().enumerate().map(|(i, v)| (v.clone(), i)).collect();
        let mut max_slot = params.len();
        let root = compile(structure, phi, &mut scope, params.len(), &mut max_slot)?;
        Ok(Compiled {
            root,
            slots: max_slot,
            params: params.len(),
        })
    }

    pub fn eval(&self, model: &Model<'_>, params: &[Element]) -> bool {
        assert_eq!(params.len(), self.params, "parameter count");
        let mut regs = vec![0; self.slots.max(1)];
        regs[..params.len()].copy_from_slice(params);
        let mut scratch = Vec::new();
        eval_node(&self.root, model, &mut regs, &mut scratch)
    }
}

fn compile(
    s: &Structure,
    f: &Formula,
    scope: &mut Vec<(String, usize)>,
    depth: usize,
    max_slot: &mut usize,
) -> Result<Node, LogicError> {
    let slot = |t: &Term, scope: &Vec<(String, usize)>| -> Result<Slot, LogicError> {
        match t {
            Term::Var(v) => {
                if let Some((_, i)) = scope.iter().rev().find(|(n, _)| n == v) {
                    Ok(Slot::Var(*i))
                } else if let Some(c) = s.constant(v) {
                    Ok(Slot::Elem(c))
                } else {
                    Err(LogicError::UnboundVariable(v.clone()))
                }
            }
            Term::Const(c) => s
                .constant(c)
                .map(Slot::Elem)
                .ok_or_else(|| LogicError::UnknownConstant(c.clone())),
        }
    };
    Ok(match f {
        Formula::True => Node::True,
        Formula::False => Node::False,
        Formula::Atom { relation, args } => {
            let idx = s
                .signature()
                .relation_index(relation)
                .ok_or_else(|| LogicError::UnknownRelation(relation.clone()))?;
            let arity = s.signature().relations()[idx].arity;
            if arity != args.len() {
                return Err(LogicError::ArityMismatch {
                    relation: relation.clone(),
                    expected: arity,
                    found: args.len(),
                });
            }
            let slots = args.iter().map(|t| slot(t, scope)).collect::<Result<_, _>>()?;
            Node::Rel(idx, slots)
        }
        Formula::Eq(a, b) => Node::Eq(slot(a, scope)?, slot(b, scope)?),
        Formula::Not(a) => Node::Not(Box::new(compile(s, a, scope, depth, max_slot)?)),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
            let l = Box::new(compile(s, a, scope, depth, max_slot)?);
            let r = Box::new(compile(s, b, scope, depth, max_slot)?);
            match f {
                Formula::And(..) => Node::And(l, r),
                Formula::Or(..) => Node::Or(l, r),
                Formula::Implies(..) => Node::Implies(l, r),
                _ => Node::Iff(l, r),
            }
        }
        Formula::Exists(v, body) | Formula::Forall(v, body) => {
            scope.push((v.clone(), depth));
            *max_slot = (*max_slot).max(depth + 1);
            let b = compile(s, body, scope, depth + 1, max_slot);
            scope.pop();
            let b = Box::new(b?);
            if matches!(f, Formula::Exists(..)) {
                Node::Exists(depth, b)
            } else {
                Node::Forall(depth, b)
            }
        }
    })
}

fn eval_node(node: &Node, m: &Model<'_>, regs: &mut Vec<Element>, scratch: &mut Vec<Element>) -> bool {
    let get = |s: &Slot, regs: &Vec<Element>| match s {
        Slot::Var(i) => regs[*i],
        Slot::Elem(e) => *e,
    };
    match node {
        Node::True => true,
        Node::False => false,
        Node::Rel(idx, args) => {
            scratch.clear();
            scratch.extend(args.iter().map(|s| get(s, regs)));
            m.relations[*idx].contains(scratch)
        }
        Node::Eq(a, b) => get(a, regs) == get(b, regs),
        Node::Not(a) => !eval_node(a, m, regs, scratch),
        Node::And(a, b) => eval_node(a, m, regs, scratch) && eval_node(b, m, regs, scratch),
        Node::Or(a, b) => eval_node(a, m, regs, scratch) || eval_node(b, m, regs, scratch),
        Node::Implies(a, b) => !eval_node(a, m, regs, scratch) || eval_node(b, m, regs, scratch),
        Node::Iff(a, b) => eval_node(a, m, regs, scratch) == eval_node(b, m, regs, scratch),
        Node::Exists(slot, body) => {
            let n = m.structure.universe();
            (0..n).any(|e| {
                regs[*slot] = e;
                eval_node(body, m, regs, scratch)
            })
        }
        Node::Forall(slot, body) => {
            let n = m.structure.universe();
            (0..n).all(|e| {
                regs[*slot] = e;
                eval_node(body, m, regs, scratch)
            })
        }
    }
}

/// Tarskian satisfaction `A |= phi[sigma]`.
pub fn eval(a: &Structure, phi: &Formula, sigma: &Assignment) -> Result<bool, LogicError> {
    Model::new(a).eval(phi, sigma)
}

pub fn eval_sentence(a: &Structure, phi: &Formula) -> Result<bool, LogicError> {
    eval(a, phi, &Assignment::new())
}

/// Convenience for building assignments in tests and callers.
pub fn assignment<'a>(pairs: impl IntoIterator<Item = (&'a str, Element)>) -> Assignment {
    pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fologic::parse;
    use crate::structures::Signature;

    fn sentence(text: &str) -> Formula {
        parse(text, &Signature::graph()).unwrap()
    }

    #[test]
    fn cycle_has_successors() {
        assert!(eval_sentence(&Structure::cycle(3), &sentence("forall x. exists y. E(x,y)")).unwrap());
    }

    #[test]
    fn single_edge_has_no_triangle() {
        let tri = sentence("exists x. exists y. exists z. (E(x,y) & E(y,z) & E(x,z))");
        assert!(!eval_sentence(&Structure::path(2), &tri).unwrap());
        assert!(eval_sentence(&Structure::complete(3), &tri).unwrap());
    }

    #[test]
    fn path_has_no_isolated_vertex() {
        let f = sentence("exists x. forall y. !E(x,y)");
        // brute force: some vertex with no neighbour
        let p3 = Structure::path(3);
        let oracle = (0..3).any(|x| (0..3).all(|y| !p3.table(0).contains(&[x, y])));
        assert_eq!(eval_sentence(&p3, &f).unwrap(), oracle);
        assert!(!oracle);
    }

    #[test]
    fn unbound_variable_is_an_error() {
        let f = sentence("E(x,y)");
        assert!(matches!(
            eval(&Structure::path(2), &f, &assignment([("x", 0)])),
            Err(LogicError::UnboundVariable(v)) if v == "y"
        ));
        assert!(eval(&Structure::path(2), &f, &assignment([("x", 0), ("y", 1)])).unwrap());
        assert!(eval(&Structure::path(2), &f, &assignment([("x", 0), ("y", 9)])).is_err());
    }

    #[test]
    fn empty_universe_semantics() {
        let e = Structure::edgeless(0);
        assert!(!eval_sentence(&e, &sentence("exists x. x=x")).unwrap());
        assert!(eval_sentence(&e, &sentence("forall x. !x=x")).unwrap());
    }

    #[test]
    fn constants_evaluate() {
        let s = Structure::from_json(
            r#"{"signature":{"relations":[["E",2]],"constants":["c"]},"universe":3,
                "relations":{"E":[[0,1],[1,0]]},"constants":{"c":1}}"#,
        )
        .unwrap();
        let f = parse("exists x. E(c,x)", s.signature()).unwrap();
        assert!(eval_sentence(&s, &f).unwrap());
        let g = parse("E(c,c)", s.signature()).unwrap();
        assert!(!eval_sentence(&s, &g).unwrap());
    }
}
