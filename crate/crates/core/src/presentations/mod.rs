//! Presentation schemes: expansions of a structure by one extra relation,
//! their validity tests and sentences, exhaustive enumeration, and
//! corpus-bounded checkers for the tameness properties.

pub mod check;
pub mod code;
pub mod schemes;

use std::ops::ControlFlow;

use thiserror::Error;

use crate::fologic::{Formula, LogicError};
use crate::structures::{RelSymbol, Signature, Structure, StructureError, Table};

pub use check::{
    check_degree_bound, check_disjoint_amalgamation, check_elementary, check_elementary_with, check_localization,
    check_neighborhood_bound, AmalgamationReport, CheckOptions, DegreeBoundReport, ElementaryReport,
    LocalizationReport, NeighborhoodBoundReport,
};
pub use schemes::{CircularSuccessor, ComponentColoring, GaifmanLift, Linear, LocalOrder, Traversal};

/// Default cap on presentations enumerated for one structure.
pub const DEFAULT_BUDGET: u64 = 1_000_000;

/// Environment variable overriding [`DEFAULT_BUDGET`].
pub const BUDGET_ENV: &str = "HANFLAB_BUDGET";

/// The enumeration budget: `HANFLAB_BUDGET` if set and valid, else the default.
pub fn default_budget() -> u64 {
    std::env::var(BUDGET_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_BUDGET)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresentationError {
    #[error("unknown presentation scheme {0:?}")]
    UnknownScheme(String),
    #[error("structure is outside the class of scheme {scheme}: {reason}")]
    OutsideClass { scheme: String, reason: String },
    #[error("presentation symbol {0} already occurs in the signature")]
    SymbolClash(String),
    #[error("scheme {scheme} has more than {budget} presentations of this structure")]
    BudgetExceeded { scheme: String, budget: u64 },
    #[error("expansion does not reduce to the given structure")]
    ReductMismatch,
    #[error("scheme {0} has no validity sentence")]
    NoSentence(String),
    #[error("structure with {size} elements is too large for {check}")]
    TooLarge { check: String, size: usize },
    #[error("{0}")]
    Structure(#[from] StructureError),
    #[error("{0}")]
    Logic(#[from] LogicError),
}

/// A presentation scheme over some class of structures.
pub trait PresentationScheme: Send + Sync {
    fn name(&self) -> String;

    /// The relation symbol added by presentations.
    fn symbol(&self) -> RelSymbol;

    /// Declared neighbourhood expansion factor, if the scheme claims one.
    fn declared_nu(&self) -> Option<usize>;

    fn notes(&self) -> String;

    /// Ok when `a` belongs to the scheme's class.
    fn check_class(&self, a: &Structure) -> Result<(), PresentationError>;

    /// Whether `table` (over the presentation symbol) presents `a`.
    /// `a` is assumed to be in the class.
    fn is_valid(&self, a: &Structure, table: &Table) -> bool;

    /// The sentence over the signature of `a` plus the presentation symbol
    /// that defines validity.
    fn validity_sentence(&self, a: &Structure) -> Option<Formula>;

    /// Number of presentations of `a` when cheaply computable.
    fn count(&self, a: &Structure) -> Option<u128>;

    /// Streams every presentation of `a` in increasing order of its table.
    /// The callback can stop the stream early.
    fn for_each(&self, a: &Structure, f: &mut dyn FnMut(&Table) -> ControlFlow<()>);
}

/// Looks a scheme up by its registry name.
pub fn scheme_by_name(name: &str) -> Result<Box<dyn PresentationScheme>, PresentationError> {
    if let Some(inner) = name.strip_prefix("gaifman-lift:") {
        return Ok(Box::new(GaifmanLift::new(scheme_by_name(inner)?)));
    }
    Ok(match name {
        "linear" => Box::new(Linear),
        "traversal" => Box::new(Traversal),
        "local-order" => Box::new(LocalOrder),
        "circular-successor" => Box::new(CircularSuccessor),
        "component-coloring" => Box::new(ComponentColoring),
        other => return Err(PresentationError::UnknownScheme(other.to_string())),
    })
}

/// Registry names of the built-in schemes.
pub const SCHEME_NAMES: [&str; 5] = [
    "linear",
    "traversal",
    "local-order",
    "circular-successor",
    "component-coloring",
];

/// Class membership plus a check that the presentation symbol is fresh.
pub fn admit(s: &dyn PresentationScheme, a: &Structure) -> Result<(), PresentationError> {
    s.check_class(a)?;
    let sym = s.symbol();
    if a.signature().has_symbol(&sym.name) {
        return Err(PresentationError::SymbolClash(sym.name));
    }
    Ok(())
}

/// Streams presentations, failing if there are more than `budget`.
pub fn for_each_within(
    s: &dyn PresentationScheme,
    a: &Structure,
    budget: u64,
    f: &mut dyn FnMut(&Table) -> ControlFlow<()>,
) -> Result<u64, PresentationError> {
    admit(s, a)?;
    let over = || PresentationError::BudgetExceeded {
        scheme: s.name(),
        budget,
    };
    if let Some(c) = s.count(a) {
        if c > budget as u128 {
            return Err(over());
        }
    }
    let mut seen = 0u64;
    let mut exceeded = false;
    s.for_each(a, &mut |t| {
        seen += 1;
        if seen > budget {
            exceeded = true;
            return ControlFlow::Break(());
        }
        f(t)
    });
    if exceeded {
        Err(over())
    } else {
        Ok(seen)
    }
}

/// All presentation tables of `a`, in enumeration order.
pub fn enumerate_tables(
    s: &dyn PresentationScheme,
    a: &Structure,
    budget: u64,
) -> Result<Vec<Table>, PresentationError> {
    let mut out = Vec::new();
    for_each_within(s, a, budget, &mut |t| {
        out.push(t.clone());
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// All presentations of `a` as expansions, in enumeration order.
pub fn enumerate(s: &dyn PresentationScheme, a: &Structure, budget: u64) -> Result<Vec<Structure>, PresentationError> {
    enumerate_tables(s, a, budget)?
        .into_iter()
        .map(|t| expand(s, a, t))
        .collect()
}

/// The expansion of `a` by `table` over the scheme's symbol.
pub fn expand(s: &dyn PresentationScheme, a: &Structure, table: Table) -> Result<Structure, PresentationError> {
    Ok(a.expand(s.symbol(), table)?)
}

/// Splits an expansion into its table, checking that its reduct is `a`.
pub fn presentation_table(
    s: &dyn PresentationScheme,
    expansion: &Structure,
    a: &Structure,
) -> Result<Table, PresentationError> {
    let sym = s.symbol();
    let table = expansion
        .table_by_name(&sym.name)
        .filter(|t| t.arity() == sym.arity)
        .ok_or(PresentationError::ReductMismatch)?
        .clone();
    if &expansion.reduct_without(&sym.name)? != a {
        return Err(PresentationError::ReductMismatch);
    }
    Ok(table)
}

/// Whether `expansion` is a presentation of `a` under `s`.
pub fn validate_presentation(
    s: &dyn PresentationScheme,
    expansion: &Structure,
    a: &Structure,
) -> Result<bool, PresentationError> {
    admit(s, a)?;
    let table = presentation_table(s, expansion, a)?;
    Ok(s.is_valid(a, &table))
}

/// Signature of presentations of `a`.
pub fn expanded_signature(s: &dyn PresentationScheme, a: &Structure) -> Result<Signature, PresentationError> {
    Ok(a.signature().with_relation(s.symbol())?)
}
