use std::collections::BTreeSet;
use std::fmt;

use crate::structures::Signature;

use super::LogicError;

/// Prefix reserved for variables introduced by rewriting.
pub const RESERVED_PREFIX: &str = "_v";

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    Const(String),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn name(&self) -> &str {
        match self {
            Term::Var(n) | Term::Const(n) => n,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// First-order formula over a relational signature with constants.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    True,
    False,
    Atom { relation: String, args: Vec<Term> },
    Eq(Term, Term),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    Iff(Box<Formula>, Box<Formula>),
    Exists(String, Box<Formula>),
    Forall(String, Box<Formula>),
}

impl Formula {
    /// Atom whose arguments are all variables.
    pub fn atom(relation: impl Into<String>, vars: &[&str]) -> Formula {
        Formula::Atom {
            relation: relation.into(),
            args: vars.iter().map(|v| Term::var(*v)).collect(),
        }
    }

    pub fn atom_terms(relation: impl Into<String>, args: Vec<Term>) -> Formula {
        Formula::Atom {
            relation: relation.into(),
            args,
        }
    }

    pub fn eq(a: Term, b: Term) -> Formula {
        Formula::Eq(a, b)
    }

    pub fn eq_vars(a: &str, b: &str) -> Formula {
        Formula::Eq(Term::var(a), Term::var(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Formula {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula, b: Formula) -> Formula {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    pub fn exists(v: impl Into<String>, body: Formula) -> Formula {
        Formula::Exists(v.into(), Box::new(body))
    }

    pub fn forall(v: impl Into<String>, body: Formula) -> Formula {
        Formula::Forall(v.into(), Box::new(body))
    }

    /// Left-nested conjunction; `true` when empty.
    pub fn conj(parts: impl IntoIterator<Item = Formula>) -> Formula {
        parts.into_iter().reduce(Formula::and).unwrap_or(Formula::True)
    }

    /// Left-nested disjunction; `false` when empty.
    pub fn disj(parts: impl IntoIterator<Item = Formula>) -> Formula {
        parts.into_iter().reduce(Formula::or).unwrap_or(Formula::False)
    }

    /// Maximum nesting depth of quantifiers.
    pub fn quantifier_rank(&self) -> usize {
        match self {
            Formula::True | Formula::False | Formula::Atom { .. } | Formula::Eq(..) => 0,
            Formula::Not(f) => f.quantifier_rank(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.quantifier_rank().max(b.quantifier_rank())
            }
            Formula::Exists(_, f) | Formula::Forall(_, f) => 1 + f.quantifier_rank(),
        }
    }

    pub fn free_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        let mut bound = Vec::new();
        self.collect_free(&mut bound, &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        let mut term = |t: &Term, bound: &Vec<String>| {
            if let Term::Var(v) = t {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
        };
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom { args, .. } => args.iter().for_each(|t| term(t, bound)),
            Formula::Eq(a, b) => {
                term(a, bound);
                term(b, bound);
            }
            Formula::Not(f) => f.collect_free(bound, out),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.collect_free(bound, out);
                b.collect_free(bound, out);
            }
            Formula::Exists(v, f) | Formula::Forall(v, f) => {
                bound.push(v.clone());
                f.collect_free(bound, out);
                bound.pop();
            }
        }
    }

    pub fn is_sentence(&self) -> bool {
        self.free_variables().is_empty()
    }

    /// Every variable name occurring anywhere (free or bound).
    pub fn variable_names(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| match f {
            Formula::Atom { args, .. } => {
                for t in args {
                    if let Term::Var(v) = t {
                        out.insert(v.clone());
                    }
                }
            }
            Formula::Eq(a, b) => {
                for t in [a, b] {
                    if let Term::Var(v) = t {
                        out.insert(v.clone());
                    }
                }
            }
            Formula::Exists(v, _) | Formula::Forall(v, _) => {
                out.insert(v.clone());
            }
            _ => {}
        });
        out
    }

    /// Relation symbols used, with the arities they are used at.
    pub fn relations_used(&self) -> BTreeSet<(String, usize)> {
        let mut out = BTreeSet::new();
        self.visit(&mut |f| {
            if let Formula::Atom { relation, args } = f {
                out.insert((relation.clone(), args.len()));
            }
        });
        out
    }

    pub fn mentions_relation(&self, name: &str) -> bool {
        self.relations_used().iter().any(|(r, _)| r == name)
    }

    /// Pre-order traversal.
    pub fn visit(&self, f: &mut impl FnMut(&Formula)) {
        f(self);
        match self {
            Formula::Not(a) | Formula::Exists(_, a) | Formula::Forall(_, a) => a.visit(f),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) | Formula::Iff(a, b) => {
                a.visit(f);
                b.visit(f);
            }
            _ => {}
        }
    }

    /// Checks relation names and arities against `signature`, and turns free
    /// occurrences of constant names into constant terms.
    pub fn bind(&self, signature: &Signature) -> Result<Formula, LogicError> {
        let mut bound = Vec::new();
        self.bind_inner(signature, &mut bound)
    }

    fn bind_inner(&self, sig: &Signature, bound: &mut Vec<String>) -> Result<Formula, LogicError> {
        let term = |t: &Term, bound: &Vec<String>| -> Term {
            match t {
                Term::Var(v) if !bound.contains(v) && sig.constant_index(v).is_some() => Term::Const(v.clone()),
                other => other.clone(),
            }
        };
        Ok(match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Atom { relation, args } => {
                let sym = sig
                    .relation(relation)
                    .ok_or_else(|| LogicError::UnknownRelation(relation.clone()))?;
                if sym.arity != args.len() {
                    return Err(LogicError::ArityMismatch {
                        relation: relation.clone(),
                        expected: sym.arity,
                        found: args.len(),
                    });
                }
                Formula::Atom {
                    relation: relation.clone(),
                    args: args.iter().map(|t| term(t, bound)).collect(),
                }
            }
            Formula::Eq(a, b) => Formula::Eq(term(a, bound), term(b, bound)),
            Formula::Not(f) => Formula::not(f.bind_inner(sig, bound)?),
            Formula::And(a, b) => Formula::and(a.bind_inner(sig, bound)?, b.bind_inner(sig, bound)?),
            Formula::Or(a, b) => Formula::or(a.bind_inner(sig, bound)?, b.bind_inner(sig, bound)?),
            Formula::Implies(a, b) => Formula::implies(a.bind_inner(sig, bound)?, b.bind_inner(sig, bound)?),
            Formula::Iff(a, b) => Formula::iff(a.bind_inner(sig, bound)?, b.bind_inner(sig, bound)?),
            Formula::Exists(v, f) | Formula::Forall(v, f) => {
                bound.push(v.clone());
                let body = f.bind_inner(sig, bound);
                bound.pop();
                let body = body?;
                if matches!(self, Formula::Exists(..)) {
                    Formula::exists(v.clone(), body)
                } else {
                    Formula::forall(v.clone(), body)
                }
            }
        })
    }

    /// Replaces free occurrences of variable `from` with `to`. The caller
    /// guarantees `to` is not captured.
    pub fn substitute(&self, from: &str, to: &Term) -> Formula {
        let term = |t: &Term| match t {
            Term::Var(v) if v == from => to.clone(),
            other => other.clone(),
        };
        match self {
            Formula::True | Formula::False => self.clone(),
            Formula::Atom { relation, args } => Formula::Atom {
                relation: relation.clone(),
                args: args.iter().map(term).collect(),
            },
            Formula::Eq(a, b) => Formula::Eq(term(a), term(b)),
            Formula::Not(f) => Formula::not(f.substitute(from, to)),
            Formula::And(a, b) => Formula::and(a.substitute(from, to), b.substitute(from, to)),
            Formula::Or(a, b) => Formula::or(a.substitute(from, to), b.substitute(from, to)),
            Formula::Implies(a, b) => Formula::implies(a.substitute(from, to), b.substitute(from, to)),
            Formula::Iff(a, b) => Formula::iff(a.substitute(from, to), b.substitute(from, to)),
            Formula::Exists(v, f) if v == from => Formula::Exists(v.clone(), f.clone()),
            Formula::Forall(v, f) if v == from => Formula::Forall(v.clone(), f.clone()),
            Formula::Exists(v, f) => Formula::exists(v.clone(), f.substitute(from, to)),
            Formula::Forall(v, f) => Formula::forall(v.clone(), f.substitute(from, to)),
        }
    }

    /// Rewrites every atom of `relation` with the formula produced by `f`.
    pub fn replace_atoms(&self, relation: &str, f: &mut impl FnMut(&[Term]) -> Formula) -> Formula {
        match self {
            Formula::Atom { relation: r, args } if r == relation => f(args),
            Formula::True | Formula::False | Formula::Atom { .. } | Formula::Eq(..) => self.clone(),
            Formula::Not(a) => Formula::not(a.replace_atoms(relation, f)),
            Formula::And(a, b) => Formula::and(a.replace_atoms(relation, f), b.replace_atoms(relation, f)),
            Formula::Or(a, b) => Formula::or(a.replace_atoms(relation, f), b.replace_atoms(relation, f)),
            Formula::Implies(a, b) => Formula::implies(a.replace_atoms(relation, f), b.replace_atoms(relation, f)),
            Formula::Iff(a, b) => Formula::iff(a.replace_atoms(relation, f), b.replace_atoms(relation, f)),
            Formula::Exists(v, a) => Formula::exists(v.clone(), a.replace_atoms(relation, f)),
            Formula::Forall(v, a) => Formula::forall(v.clone(), a.replace_atoms(relation, f)),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Exists(..) | Formula::Forall(..) => 0,
            Formula::Iff(..) => 1,
            Formula::Implies(..) => 2,
            Formula::Or(..) => 3,
            Formula::And(..) => 4,
            Formula::Not(..) => 5,
            _ => 6,
        }
    }

    fn write_child(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        let p = self.precedence();
        if p == 0 || p < min_prec {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }

    fn write_binary(f: &mut fmt::Formatter<'_>, a: &Formula, op: &str, b: &Formula, lmin: u8, rmin: u8) -> fmt::Result {
        a.write_child(f, lmin)?;
        write!(f, " {op} ")?;
        b.write_child(f, rmin)
    }
}

/// Canonical text form; re-parses to the same tree.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Formula::True => f.write_str("true"),
            Formula::False => f.write_str("false"),
            Formula::Atom { relation, args } if relation == "<" && args.len() == 2 => {
                write!(f, "{}<{}", args[0], args[1])
            }
            Formula::Atom { relation, args } => {
                write!(f, "{relation}(")?;
                for (i, t) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{t}")?;
                }
                f.write_str(")")
            }
            Formula::Eq(a, b) => write!(f, "{a}={b}"),
            Formula::Not(a) => {
                f.write_str("!")?;
                a.write_child(f, 5)
            }
            // left-associative operators parenthesize an equal-precedence right child
            Formula::And(a, b) => Formula::write_binary(f, a, "&", b, 4, 5),
            Formula::Or(a, b) => Formula::write_binary(f, a, "|", b, 3, 4),
            Formula::Implies(a, b) => Formula::write_binary(f, a, "->", b, 3, 2),
            Formula::Iff(a, b) => Formula::write_binary(f, a, "<->", b, 1, 2),
            Formula::Exists(v, body) => write!(f, "exists {v}. {body}"),
            Formula::Forall(v, body) => write!(f, "forall {v}. {body}"),
        }
    }
}
