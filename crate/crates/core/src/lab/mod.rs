//! Desk-scale experiments: corpora, empirical locality, EF demos, scattered
//! sets and wideness.

pub mod corpus;
pub mod locality;
pub mod scatter;

use thiserror::Error;

use crate::census::CensusError;
use crate::fologic::LogicError;
use crate::invariance::InvarianceError;
use crate::structures::StructureError;

pub use corpus::{all_graphs, generate_corpus, Corpus, CorpusSpec, RNG_NAME};
pub use locality::{
    audit_report, cycle_pair, ef_indistinguishability_demo, hanf_radius_default, locality_search,
    minimal_locality_parameters, LocalityParameters, LocalityReport, Query, Violation, BATTERY,
};
pub use scatter::{
    greedy_scatter, max_scatter, scattered_check, wideness_estimate, GreedyScatter, WidenessRow, WidenessTable,
    WIDENESS_LIMIT,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LabError {
    #[error("invalid corpus spec {0}")]
    BadSpec(String),
    #[error("infeasible corpus spec: {0}")]
    Infeasible(String),
    #[error("{0}")]
    Io(String),
    #[error("invalid structure file {0}")]
    BadStructure(String),
    #[error("corpus structures have different signatures")]
    MixedSignatures,
    #[error("structure with {0} elements is too large for exhaustive scatter search")]
    TooLarge(usize),
    #[error("{0}")]
    Structure(#[from] StructureError),
    #[error("{0}")]
    Logic(#[from] LogicError),
    #[error("{0}")]
    Census(#[from] CensusError),
    #[error("{0}")]
    Invariance(#[from] InvarianceError),
}
