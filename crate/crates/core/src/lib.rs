//! Finite model theory workbench: structures, first-order logic, neighbourhood
//! censuses, presentation schemes and locality experiments.

pub mod census;
pub mod fologic;
pub mod invariance;
pub mod lab;
pub mod presentations;
pub mod structures;

pub use census::{
    census, equipollent, hanf_equivalent, hanf_full, isomorphic, CensusReport, HanfVerdict, NeighborhoodType, Threshold,
};
pub use fologic::{Formula, LogicError, Term};
pub use invariance::{ClassFilter, InvarianceError, InvarianceVerdict, InvariantQuery};
pub use lab::{Corpus, CorpusSpec, LabError, LocalityReport, Query};
pub use presentations::{scheme_by_name, PresentationError, PresentationScheme};
pub use structures::{
    Element, GaifmanGraph, PointedStructure, Radius, RelSymbol, Signature, Structure, StructureError, Table,
};
