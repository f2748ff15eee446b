//! First-order logic: syntax, parsing, evaluation, localization and
//! Ehrenfeucht–Fraïssé games.

pub mod ef;
pub mod eval;
pub mod formula;
pub mod local;
pub mod parser;

use thiserror::Error;

pub use ef::{ef_equivalent, EfGame};
pub use eval::{assignment, eval, eval_sentence, Assignment, Compiled, Model};
pub use formula::{Formula, Term, RESERVED_PREFIX};
pub use local::{adjacency_formula, distance_formula, local_type, localize, Localized};
pub use parser::{parse, parse_unchecked, parse_with, ParseOptions};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LogicError {
    #[error("syntax error at position {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("identifier {name} at position {position} uses the reserved prefix _v")]
    ReservedIdentifier { position: usize, name: String },
    #[error("unknown relation {0}")]
    UnknownRelation(String),
    #[error("unknown constant {0}")]
    UnknownConstant(String),
    #[error("relation {relation} has arity {expected} but is applied to {found} terms")]
    ArityMismatch {
        relation: String,
        expected: usize,
        found: usize,
    },
    #[error("free variable {0} is not assigned")]
    UnboundVariable(String),
    #[error("variable {variable} is assigned element {element}, out of range")]
    ElementOutOfRange { variable: String, element: usize },
    #[error("signatures differ")]
    SignatureMismatch,
    #[error("{0}")]
    Structure(#[from] crate::structures::StructureError),
}
