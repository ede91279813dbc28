use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Malformed {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("duplicate node id `{0}`")]
    DuplicateNode(String),

    #[error("unknown node id `{0}`")]
    UnknownNode(String),

    #[error("{path}:{line}: ownership percentage {value} outside [0, 100]")]
    PctOutOfRange { path: PathBuf, line: u64, value: f64 },

    #[error("substantial-link threshold must lie in (0, 100], got {0}")]
    InvalidThreshold(f64),

    #[error("graph has no nodes")]
    EmptyGraph,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("power-law fit needs at least {needed} samples ≥ x_min, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("all samples are equal; likelihood is degenerate")]
    DegenerateSamples,

    #[error("power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("affiliate `{0}` has no links inside its subtree")]
    IsolatedAffiliate(String),

    #[error("degenerate subtree: {0} sums to zero")]
    DegenerateSubtree(&'static str),

    #[error("partition does not match graph: {0}")]
    PartitionMismatch(String),

    #[error("regression design is singular: {0}")]
    SingularDesign(String),

    #[error("infeasible degree sequence: {0}")]
    InfeasibleDegrees(String),

    #[error("template `{template}` contradicts direct evaluation: {detail}")]
    TemplateContradiction { template: String, detail: String },

    #[error("graph cache {path}: {message}")]
    Cache { path: PathBuf, message: String },

    #[error("integrity check failed for {path}: expected {expected}, found {found}")]
    Integrity {
        path: PathBuf,
        expected: String,
        found: String,
    },

    #[error("missing input file {0}")]
    MissingInput(PathBuf),

    #[error("stage `{stage}` failed: {source}")]
    Stage {
        stage: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
