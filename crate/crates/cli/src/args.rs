use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "hanflab",
    version,
    about = "Finite structures, first-order locality and presentation-invariant queries"
)]
pub struct Cli {
    /// Emit a single JSON document instead of text.
    #[arg(long, global = true)]
    pub json: bool,

    /// Worker threads for parallel stages.
    #[arg(long, global = true, value_name = "N")]
    pub workers: Option<usize>,

    /// Cap on presentations enumerated per structure.
    #[arg(long, global = true, value_name = "N")]
    pub budget: Option<u64>,

    /// Seed overriding the one in a random corpus spec.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,

    /// Also write the JSON document to this file.
    #[arg(long, global = true, value_name = "FILE")]
    pub output: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Structure files: validation, Gaifman graphs, censuses.
    #[command(subcommand)]
    Structure(StructureCmd),
    /// First-order formulas.
    #[command(subcommand)]
    Fo(FoCmd),
    /// Ehrenfeucht-Fraisse games.
    #[command(subcommand)]
    Ef(EfCmd),
    /// Hanf equivalence.
    #[command(subcommand)]
    Hanf(HanfCmd),
    /// Presentation schemes.
    #[command(subcommand)]
    Present(PresentCmd),
    /// Presentation-invariant sentences.
    #[command(subcommand)]
    Invariance(InvarianceCmd),
    /// Locality experiments, scattered sets, corpora.
    #[command(subcommand)]
    Lab(LabCmd),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Structure(c) => match c {
                StructureCmd::Validate { .. } => "structure validate",
                StructureCmd::Gaifman { .. } => "structure gaifman",
                StructureCmd::Census { .. } => "structure census",
            },
            Command::Fo(c) => match c {
                FoCmd::Parse { .. } => "fo parse",
                FoCmd::Eval { .. } => "fo eval",
                FoCmd::Rank { .. } => "fo rank",
                FoCmd::Localize { .. } => "fo localize",
            },
            Command::Ef(c) => match c {
                EfCmd::Compare { .. } => "ef compare",
                EfCmd::Demo { .. } => "ef demo",
            },
            Command::Hanf(HanfCmd::Compare { .. }) => "hanf compare",
            Command::Present(c) => match c {
                PresentCmd::Enumerate { .. } => "present enumerate",
                PresentCmd::Validate { .. } => "present validate",
                PresentCmd::Check { .. } => "present check",
            },
            Command::Invariance(c) => match c {
                InvarianceCmd::Check { .. } => "invariance check",
                InvarianceCmd::Eval { .. } => "invariance eval",
            },
            Command::Lab(c) => match c {
                LabCmd::Locality { .. } => "lab locality",
                LabCmd::Minimal { .. } => "lab minimal",
                LabCmd::Scatter { .. } => "lab scatter",
                LabCmd::Wideness { .. } => "lab wideness",
                LabCmd::Gen { .. } => "lab gen",
            },
        }
    }
}

#[derive(Debug, Args)]
pub struct FormulaArgs {
    /// Formula text.
    #[arg(long, conflicts_with = "formula_file")]
    pub formula: Option<String>,
    /// File holding the formula text.
    #[arg(long, value_name = "FILE")]
    pub formula_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    #[command(flatten)]
    pub formula: FormulaArgs,
    /// Presentation scheme; makes the formula an invariant query.
    #[arg(long)]
    pub scheme: Option<String>,
    /// Class filter of an invariant query: any, graphs or maxdeg:<d>.
    #[arg(long)]
    pub class: Option<String>,
    /// JSON query bundle {"scheme", "sentence", "class"}.
    #[arg(long, value_name = "FILE", conflicts_with_all = ["scheme", "formula", "formula_file"])]
    pub query_file: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum StructureCmd {
    /// Check a structure file against its signature.
    Validate {
        file: PathBuf,
    },
    /// Gaifman graph edges, degrees and components.
    Gaifman {
        file: PathBuf,
    },
    /// Pointed r-neighbourhood types with multiplicities.
    Census {
        file: PathBuf,
        #[arg(long, default_value = "1")]
        r: String,
    },
}

#[derive(Debug, Subcommand)]
pub enum FoCmd {
    /// Parse and print a formula with its free variables.
    Parse {
        #[command(flatten)]
        formula: FormulaArgs,
        /// Check symbols against this structure's signature.
        #[arg(long, value_name = "FILE")]
        structure: Option<PathBuf>,
    },
    /// Evaluate a formula on a structure.
    Eval {
        file: PathBuf,
        #[command(flatten)]
        formula: FormulaArgs,
        /// Values of free variables, e.g. x=0,y=2.
        #[arg(long, value_name = "BINDINGS")]
        assign: Option<String>,
    },
    /// Quantifier rank.
    Rank {
        #[command(flatten)]
        formula: FormulaArgs,
    },
    /// Relativize quantifiers to the r-ball around the centers.
    Localize {
        #[command(flatten)]
        formula: FormulaArgs,
        #[arg(long)]
        r: usize,
        /// Center variables, comma separated.
        #[arg(long, default_value = "x")]
        centers: String,
        /// Signature source; defaults to graphs.
        #[arg(long, value_name = "FILE")]
        structure: Option<PathBuf>,
    },
}

#[derive(Debug, Subcommand)]
pub enum EfCmd {
    /// Decide the q-round game on two structures.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        q: usize,
    },
    /// Least m with C_2m and two copies of C_m equivalent up to rank q.
    Demo {
        #[arg(long)]
        q: usize,
        #[arg(long, default_value_t = 3)]
        m_min: usize,
        #[arg(long, default_value_t = 8)]
        m_max: usize,
    },
}

#[derive(Debug, Subcommand)]
pub enum HanfCmd {
    /// Hanf (r,t)-equivalence of two structures.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, default_value = "1")]
        r: String,
        #[arg(long, default_value = "omega")]
        t: String,
        /// Compare at every radius with threshold omega.
        #[arg(long, conflicts_with_all = ["r", "t"])]
        full: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CheckKind {
    Elementary,
    Nbbound,
    Degbound,
    Localization,
    Amalgamation,
}

#[derive(Debug, Subcommand)]
pub enum PresentCmd {
    /// List every presentation of a structure.
    Enumerate {
        file: PathBuf,
        #[arg(long)]
        scheme: String,
    },
    /// Check that an expansion is a presentation of a structure.
    Validate {
        structure: PathBuf,
        expansion: PathBuf,
        #[arg(long)]
        scheme: String,
    },
    /// Test a scheme property on a corpus.
    Check {
        #[arg(value_enum)]
        kind: CheckKind,
        #[arg(long)]
        scheme: String,
        #[arg(long)]
        corpus: String,
        /// Neighbourhood factor; defaults to the scheme's declared value.
        #[arg(long)]
        nu: Option<usize>,
        /// Sentence to compare with, for elementary checks.
        #[command(flatten)]
        formula: FormulaArgs,
    },
}

#[derive(Debug, Subcommand)]
pub enum InvarianceCmd {
    /// Test a sentence for invariance on a corpus.
    Check {
        #[arg(long)]
        scheme: String,
        #[command(flatten)]
        formula: FormulaArgs,
        #[arg(long)]
        corpus: String,
    },
    /// Evaluate an invariant query, certified across presentations.
    Eval {
        file: PathBuf,
        #[command(flatten)]
        query: QueryArgs,
        /// Skip certification and use the first presentation only.
        #[arg(long = "unsafe", conflicts_with = "reversed")]
        unsafe_first: bool,
        /// Certify walking the enumeration backwards.
        #[arg(long)]
        reversed: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum LabCmd {
    /// Hanf-equivalent pairs of a corpus on which a query differs.
    Locality {
        #[command(flatten)]
        query: QueryArgs,
        #[arg(long)]
        corpus: String,
        #[arg(long, default_value = "1")]
        r: String,
        #[arg(long, default_value = "omega")]
        t: String,
    },
    /// Least (r,t) with no locality violation on a corpus.
    Minimal {
        #[command(flatten)]
        query: QueryArgs,
        #[arg(long)]
        corpus: String,
        #[arg(long, default_value_t = 3)]
        r_max: usize,
        #[arg(long, default_value_t = 3)]
        t_max: usize,
    },
    /// Greedy and exact r-scattered subsets.
    Scatter {
        file: PathBuf,
        #[arg(long, default_value = "1")]
        r: String,
        /// Candidate elements; defaults to the whole universe.
        #[arg(long, value_name = "ELEMENTS")]
        candidates: Option<String>,
        #[arg(long, value_name = "ELEMENTS")]
        away: Option<String>,
        /// Test whether this set is scattered instead of searching.
        #[arg(long, value_name = "ELEMENTS")]
        check: Option<String>,
    },
    /// Observed width growth factor on a corpus.
    Wideness {
        #[arg(long)]
        corpus: String,
        #[arg(long, default_value = "1")]
        r: String,
        /// Largest m in the table.
        #[arg(long, default_value_t = 5)]
        p: usize,
        #[arg(long, default_value_t = 0)]
        q: usize,
    },
    /// Generate a corpus.
    Gen {
        #[arg(long)]
        corpus: String,
    },
}
