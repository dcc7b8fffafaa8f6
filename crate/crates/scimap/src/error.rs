//! Crate-wide error type and exit-code mapping.

use std::path::PathBuf;

/// Everything that can go wrong across the toolchain.
///
/// Variants are grouped by origin: input parsing, matrix/graph validation,
/// algorithm preconditions, and output writing. [`Error::exit_code`] maps
/// each group onto the CLI exit-code contract (1 usage, 2 data, 3 internal).
#[derive(Debug, thiserror::Error)]
pub enum Error {
    // ---- usage ----
    #[error("{0}")]
    Usage(String),

    // ---- input and file errors ----
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },
    #[error("not a RIS stream: no TY tag found")]
    NotRis,
    #[error("RIS record {record} has no ER terminator")]
    UnterminatedRecord { record: usize },

    // ---- matrix validation ----
    #[error("edge references unknown journal id {id} (registry has {n} journals)")]
    UnknownJournal { id: u64, n: usize },
    #[error("unknown journal '{0}'")]
    UnknownTitle(String),
    #[error("duplicate edge ({citing}, {cited})")]
    DuplicateEdge { citing: u32, cited: u32 },
    #[error("edge ({citing}, {cited}) has count {count}; counts must be >= 1")]
    BadCount {
        citing: u32,
        cited: u32,
        count: u64,
    },
    #[error("similarity entry ({i}, {j}) is invalid: {msg}")]
    BadSimilarityEntry { i: u32, j: u32, msg: String },

    // ---- algorithm preconditions ----
    #[error("similarity pair budget exceeded: more than {budget} pairs would be emitted; raise --max-pairs or threshold the input")]
    PairBudget { budget: usize },
    #[error("network is empty (no nodes or no edges)")]
    EmptyNetwork,
    #[error("partition does not cover node {node}")]
    PartitionMissingNode { node: u32 },
    #[error("layout input is not connected; restrict to the largest component first")]
    Disconnected,
    #[error("layout needs at least 2 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("degenerate layout: all points coincide, map diagonal undefined")]
    DegenerateLayout,
    #[error("seed journal has no {direction} citations; ego network undefined")]
    ZeroSeedTotal { direction: &'static str },
    #[error("ego network contains only the seed; nothing to map")]
    SeedOnlyEgo,
    #[error("diversity undefined: no document matched a base-map journal")]
    ZeroMatched,
    #[error("cannot compare diversity reports from different base maps")]
    MixedBaseMaps,
    #[error("cannot compare diversity reports computed under different diagonal rules")]
    MixedDiagonalRules,
    #[error("stage {stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    // ---- internal invariant violations ----
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// CLI exit code: 0 is success, 1 usage error, 2 data error, 3 internal.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 1,
            Error::Internal(_) => 3,
            Error::Stage { source, .. } => source.exit_code(),
            _ => 2,
        }
    }

    /// Attach a pipeline stage name to an error bubbling out of a stage.
    pub fn in_stage(self, stage: &'static str) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Error {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
