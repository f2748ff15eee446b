use std::path::Path;

use hanflab::census::CensusError;
use hanflab::invariance::InvarianceError;
use hanflab::lab::LabError;
use hanflab::presentations::PresentationError;
use hanflab::structures::{StructureError, ValidationErrors};
use hanflab::LogicError;
use serde::Serialize;
use serde_json::Value;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Result of a command: a JSON payload, an optional verdict and a text rendering.
pub struct Outcome {
    pub result: Value,
    pub verdict: Option<bool>,
    pub text: String,
}

impl Outcome {
    pub fn new(result: impl Serialize, verdict: Option<bool>, text: impl Into<String>) -> Self {
        Outcome {
            result: serde_json::to_value(result).expect("reports serialize"),
            verdict,
            text: text.into(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            Some(false) => 1,
            _ => 0,
        }
    }
}

#[derive(Debug)]
pub struct CliError {
    pub code: &'static str,
    pub message: String,
    /// Exit status; 1 for counterexamples reported as errors, otherwise 2.
    pub exit: i32,
    pub detail: Option<Value>,
}

impl CliError {
    pub fn usage(message: impl Into<String>) -> Self {
        CliError::new("usage", message)
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::new("io", format!("{}: {e}", path.display()))
    }

    pub fn new(code: &'static str, message: impl Into<String>) -> Self {
        CliError {
            code,
            message: message.into(),
            exit: 2,
            detail: None,
        }
    }
}

fn structure_code(e: &StructureError) -> &'static str {
    match e {
        StructureError::Malformed(_) => "malformed_structure",
        StructureError::SignatureMismatch => "signature_mismatch",
        StructureError::PointOutOfRange { .. } => "element_out_of_range",
        StructureError::ConstantCollision => "constant_collision",
        StructureError::SymbolClash(_) => "symbol_clash",
        _ => "invalid_structure",
    }
}

impl From<StructureError> for CliError {
    fn from(e: StructureError) -> Self {
        CliError::new(structure_code(&e), e.to_string())
    }
}

impl From<ValidationErrors> for CliError {
    fn from(e: ValidationErrors) -> Self {
        let code = e.0.first().map_or("invalid_structure", structure_code);
        CliError::new(code, e.to_string())
    }
}

impl From<LogicError> for CliError {
    fn from(e: LogicError) -> Self {
        let code = match &e {
            LogicError::Syntax { .. } => "formula_syntax",
            LogicError::ReservedIdentifier { .. } => "reserved_identifier",
            LogicError::UnknownRelation(_) => "unknown_relation",
            LogicError::UnknownConstant(_) => "unknown_constant",
            LogicError::ArityMismatch { .. } => "arity_mismatch",
            LogicError::UnboundVariable(_) => "unbound_variable",
            LogicError::ElementOutOfRange { .. } => "element_out_of_range",
            LogicError::SignatureMismatch => "signature_mismatch",
            LogicError::Structure(s) => return s.clone().into(),
        };
        CliError::new(code, e.to_string())
    }
}

impl From<CensusError> for CliError {
    fn from(e: CensusError) -> Self {
        match e {
            CensusError::SignatureMismatch => CliError::new("signature_mismatch", e.to_string()),
            CensusError::Structure(s) => s.into(),
        }
    }
}

impl From<PresentationError> for CliError {
    fn from(e: PresentationError) -> Self {
        let code = match &e {
            PresentationError::UnknownScheme(_) => "unknown_scheme",
            PresentationError::OutsideClass { .. } => "outside_class",
            PresentationError::SymbolClash(_) => "symbol_clash",
            PresentationError::BudgetExceeded { .. } => "budget_exceeded",
            PresentationError::ReductMismatch => "reduct_mismatch",
            PresentationError::NoSentence(_) => "no_sentence",
            PresentationError::TooLarge { .. } => "too_large",
            PresentationError::Structure(s) => return s.clone().into(),
            PresentationError::Logic(l) => return l.clone().into(),
        };
        CliError::new(code, e.to_string())
    }
}

impl From<InvarianceError> for CliError {
    fn from(e: InvarianceError) -> Self {
        match e {
            InvarianceError::NotInvariantOnInput(c) => CliError {
                code: "not_invariant",
                message: "sentence is not invariant on this structure".into(),
                exit: 1,
                detail: serde_json::to_value(&c).ok(),
            },
            InvarianceError::OutsideClass(_) => CliError::new("outside_class", e.to_string()),
            InvarianceError::NotASentence(_) => CliError::new("not_a_sentence", e.to_string()),
            InvarianceError::BadClass(_) => CliError::new("bad_class", e.to_string()),
            InvarianceError::BadBundle(_) => CliError::new("bad_bundle", e.to_string()),
            InvarianceError::Presentation(p) => p.into(),
            InvarianceError::Logic(l) => l.into(),
        }
    }
}

impl From<LabError> for CliError {
    fn from(e: LabError) -> Self {
        match e {
            LabError::BadSpec(_) => CliError::new("bad_corpus_spec", e.to_string()),
            LabError::Infeasible(_) => CliError::new("infeasible_corpus", e.to_string()),
            LabError::Io(_) => CliError::new("io", e.to_string()),
            LabError::BadStructure(_) => CliError::new("invalid_structure", e.to_string()),
            LabError::MixedSignatures => CliError::new("signature_mismatch", e.to_string()),
            LabError::TooLarge(_) => CliError::new("too_large", e.to_string()),
            LabError::Structure(s) => s.into(),
            LabError::Logic(l) => l.into(),
            LabError::Census(c) => c.into(),
            LabError::Invariance(i) => i.into(),
        }
    }
}

#[derive(Serialize)]
struct ErrorBody<'a> {
    code: &'a str,
    message: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    detail: Option<&'a Value>,
}

#[derive(Serialize)]
struct Envelope<'a> {
    command: &'a str,
    version: &'a str,
    #[serde(skip_serializing_if = "Option::is_none")]
    result: Option<&'a Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<ErrorBody<'a>>,
}

/// The JSON document for a command outcome, newline terminated.
pub fn envelope(command: &str, outcome: &Result<Outcome, CliError>) -> String {
    let env = match outcome {
        Ok(o) => Envelope {
            command,
            version: VERSION,
            result: Some(&o.result),
            error: None,
        },
        Err(e) => Envelope {
            command,
            version: VERSION,
            result: None,
            error: Some(ErrorBody {
                code: e.code,
                message: &e.message,
                detail: e.detail.as_ref(),
            }),
        },
    };
    let mut s = serde_json::to_string(&env).expect("envelopes serialize");
    s.push('\n');
    s
}
