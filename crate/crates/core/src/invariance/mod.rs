//! Presentation-invariant sentences and the queries they define.

use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fologic::{parse_unchecked, Compiled, Formula, LogicError, Model};
use crate::presentations::{admit, expand, for_each_within, scheme_by_name, PresentationError, PresentationScheme};
use crate::structures::{Structure, Table};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvarianceError {
    #[error("sentence is not invariant on this structure")]
    NotInvariantOnInput(Box<InvarianceCounterexample>),
    #[error("structure is outside the query class {0}")]
    OutsideClass(ClassFilter),
    #[error("sentence has free variables: {0}")]
    NotASentence(String),
    #[error("invalid class filter {0:?}: expected any, graphs or maxdeg:<d>")]
    BadClass(String),
    #[error("invalid query bundle: {0}")]
    BadBundle(String),
    #[error("{0}")]
    Presentation(#[from] PresentationError),
    #[error("{0}")]
    Logic(#[from] LogicError),
}

/// Named predicates restricting the structures a query applies to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ClassFilter {
    #[default]
    Any,
    Graphs,
    MaxDegree(usize),
}

impl ClassFilter {
    pub fn accepts(&self, a: &Structure) -> bool {
        match self {
            ClassFilter::Any => true,
            ClassFilter::Graphs => a.graph_edge_relation().is_some(),
            ClassFilter::MaxDegree(d) => a.degree_profile().max_degree <= *d,
        }
    }
}

impl fmt::Display for ClassFilter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassFilter::Any => f.write_str("any"),
            ClassFilter::Graphs => f.write_str("graphs"),
            ClassFilter::MaxDegree(d) => write!(f, "maxdeg:{d}"),
        }
    }
}

impl FromStr for ClassFilter {
    type Err = InvarianceError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "any" => Ok(ClassFilter::Any),
            "graphs" => Ok(ClassFilter::Graphs),
            other => other
                .strip_prefix("maxdeg:")
                .and_then(|d| d.parse().ok())
                .map(ClassFilter::MaxDegree)
                .ok_or_else(|| InvarianceError::BadClass(other.to_string())),
        }
    }
}

/// A sentence over the base signature plus a scheme's symbol, read as the
/// query "some presentation satisfies it".
pub struct InvariantQuery {
    pub scheme: Box<dyn PresentationScheme>,
    pub sentence: Formula,
    pub class: ClassFilter,
}

impl InvariantQuery {
    pub fn new(
        scheme: Box<dyn PresentationScheme>,
        sentence: Formula,
        class: ClassFilter,
    ) -> Result<Self, InvarianceError> {
        if !sentence.is_sentence() {
            let free: Vec<String> = sentence.free_variables().into_iter().collect();
            return Err(InvarianceError::NotASentence(free.join(",")));
        }
        Ok(InvariantQuery {
            scheme,
            sentence,
            class,
        })
    }

    /// Parses a query bundle `{"scheme":..,"sentence":..,"class":..}`.
    pub fn from_bundle(text: &str) -> Result<Self, InvarianceError> {
        let b: QueryBundle = serde_json::from_str(text).map_err(|e| InvarianceError::BadBundle(e.to_string()))?;
        b.resolve()
    }

    pub fn describe(&self) -> String {
        format!("{} | {} | {}", self.scheme.name(), self.sentence, self.class)
    }
}

impl fmt::Debug for InvariantQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InvariantQuery")
            .field("scheme", &self.scheme.name())
            .field("sentence", &self.sentence.to_string())
            .field("class", &self.class)
            .finish()
    }
}

/// On-disk form of an invariant query.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueryBundle {
    pub scheme: String,
    pub sentence: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub class: Option<String>,
}

impl QueryBundle {
    pub fn resolve(&self) -> Result<InvariantQuery, InvarianceError> {
        let scheme = scheme_by_name(&self.scheme)?;
        let sentence = parse_unchecked(&self.sentence)?;
        let class = match &self.class {
            Some(c) => c.parse()?,
            None => ClassFilter::Any,
        };
        InvariantQuery::new(scheme, sentence, class)
    }
}

/// Two presentations of one structure on which a sentence disagrees.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct InvarianceCounterexample {
    pub structure: Structure,
    pub first: Structure,
    pub second: Structure,
    pub first_value: bool,
    pub second_value: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct InvarianceVerdict {
    pub scheme: String,
    pub sentence: String,
    pub invariant_on_corpus: bool,
    pub structures_checked: usize,
    pub presentations_checked: u64,
    pub counterexample: Option<InvarianceCounterexample>,
}

/// Outcome of evaluating a sentence on every presentation of one structure.
struct Agreement {
    value: bool,
    presentations: u64,
    counterexample: Option<InvarianceCounterexample>,
}

const CHUNK: usize = 1 << 12;

/// Evaluates `theta` on every presentation of `a` in enumeration order (or
/// reversed), stopping at the first value differing from the first one.
fn agreement(
    s: &dyn PresentationScheme,
    theta: &Formula,
    a: &Structure,
    budget: u64,
    reversed: bool,
) -> Result<Agreement, InvarianceError> {
    admit(s, a)?;
    let sig = a
        .signature()
        .with_relation(s.symbol())
        .map_err(PresentationError::from)?;
    let theta = theta.bind(&sig)?;
    let value_of = |t: &Table| -> Result<bool, InvarianceError> {
        let e = expand(s, a, t.clone())?;
        let c = Compiled::new(&e, &theta, &[])?;
        Ok(c.eval(&Model::new(&e), &[]))
    };
    let mut first: Option<(Table, bool)> = None;
    let mut found: Option<(Table, bool)> = None;
    let mut error: Option<InvarianceError> = None;
    let mut process = |chunk: &[Table]| -> ControlFlow<()> {
        let values: Result<Vec<bool>, InvarianceError> = chunk.par_iter().map(&value_of).collect();
        let values = match values {
            Ok(v) => v,
            Err(e) => {
                error = Some(e);
                return ControlFlow::Break(());
            }
        };
        for (t, v) in chunk.iter().zip(values) {
            match &first {
                None => first = Some((t.clone(), v)),
                Some((_, v0)) if *v0 != v => {
                    found = Some((t.clone(), v));
                    return ControlFlow::Break(());
                }
                _ => {}
            }
        }
        ControlFlow::Continue(())
    };
    let presentations;
    if reversed {
        let mut all = Vec::new();
        presentations = for_each_within(s, a, budget, &mut |t| {
            all.push(t.clone());
            ControlFlow::Continue(())
        })?;
        all.reverse();
        for chunk in all.chunks(CHUNK) {
            if process(chunk).is_break() {
                break;
            }
        }
    } else {
        let mut chunk = Vec::with_capacity(CHUNK);
        let mut stopped = false;
        presentations = for_each_within(s, a, budget, &mut |t| {
            chunk.push(t.clone());
            if chunk.len() == CHUNK {
                let flow = process(&chunk);
                chunk.clear();
                stopped = flow.is_break();
                return flow;
            }
            ControlFlow::Continue(())
        })?;
        if !stopped && !chunk.is_empty() {
            let _ = process(&chunk);
        }
    }
    if let Some(e) = error {
        return Err(e);
    }
    let (t0, v0) = first.expect("every structure in the class has a presentation");
    let counterexample = match found {
        Some((t1, v1)) => Some(InvarianceCounterexample {
            structure: a.clone(),
            first: expand(s, a, t0)?,
            second: expand(s, a, t1)?,
            first_value: v0,
            second_value: v1,
        }),
        None => None,
    };
    Ok(Agreement {
        value: v0,
        presentations,
        counterexample,
    })
}

/// Whether `theta` takes one value on all presentations of each structure.
pub fn is_invariant(
    theta: &Formula,
    s: &dyn PresentationScheme,
    corpus: &[Structure],
    budget: u64,
) -> Result<InvarianceVerdict, InvarianceError> {
    let mut verdict = InvarianceVerdict {
        scheme: s.name(),
        sentence: theta.to_string(),
        invariant_on_corpus: true,
        structures_checked: 0,
        presentations_checked: 0,
        counterexample: None,
    };
    for a in corpus {
        let ag = agreement(s, theta, a, budget, false)?;
        verdict.structures_checked += 1;
        verdict.presentations_checked += ag.presentations;
        if ag.counterexample.is_some() {
            verdict.invariant_on_corpus = false;
            verdict.counterexample = ag.counterexample;
            break;
        }
    }
    Ok(verdict)
}

/// How [`eval_invariant_with`] treats the presentations of its input.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EvalMode {
    /// Evaluate on every presentation and require agreement.
    #[default]
    Certified,
    /// As certified, walking the enumeration backwards.
    Reversed,
    /// Evaluate on the first presentation only. Unsound if the sentence is
    /// not invariant on the input.
    UnsafeFirstOnly,
}

pub fn eval_invariant_with(
    q: &InvariantQuery,
    a: &Structure,
    budget: u64,
    mode: EvalMode,
) -> Result<bool, InvarianceError> {
    if !q.class.accepts(a) {
        return Err(InvarianceError::OutsideClass(q.class));
    }
    match mode {
        EvalMode::UnsafeFirstOnly => {
            let s = q.scheme.as_ref();
            let mut first = None;
            for_each_within(s, a, budget, &mut |t| {
                first = Some(t.clone());
                ControlFlow::Break(())
            })?;
            let e = expand(s, a, first.expect("every structure in the class has a presentation"))?;
            let sig = e.signature().clone();
            let theta = q.sentence.bind(&sig)?;
            Ok(Compiled::new(&e, &theta, &[])?.eval(&Model::new(&e), &[]))
        }
        _ => {
            let ag = agreement(q.scheme.as_ref(), &q.sentence, a, budget, mode == EvalMode::Reversed)?;
            match ag.counterexample {
                Some(c) => Err(InvarianceError::NotInvariantOnInput(Box::new(c))),
                None => Ok(ag.value),
            }
        }
    }
}

/// The query's value on `a`, certified across all presentations.
pub fn eval_invariant(q: &InvariantQuery, a: &Structure, budget: u64) -> Result<bool, InvarianceError> {
    eval_invariant_with(q, a, budget, EvalMode::Certified)
}

pub fn queries_agree(q: &InvariantQuery, a: &Structure, b: &Structure, budget: u64) -> Result<bool, InvarianceError> {
    Ok(eval_invariant(q, a, budget)? == eval_invariant(q, b, budget)?)
}

/// Connectivity through traversals: every vertex is first or has an earlier neighbour.
pub const SIGMA_CONN: &str = "forall x. ((forall y. (x=y | x<y)) | exists y. (y<x & E(y,x)))";

/// The least element is adjacent to the greatest.
pub const MIN_ADJACENT_MAX: &str = "exists x. exists y. ((forall z. (z=x | x<z)) & (forall z. (z=y | z<y)) & E(x,y))";
