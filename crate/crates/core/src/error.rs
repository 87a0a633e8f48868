use std::path::PathBuf;

/// Errors produced anywhere in the detection pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("{path}: bad magic bytes (expected {expected:?})")]
    BadMagic { path: PathBuf, expected: &'static str },

    #[error("{path}: unsupported format version {version}")]
    UnsupportedVersion { path: PathBuf, version: u32 },

    #[error("{path}: truncated file (header promises {expected} bytes of data, found {actual})")]
    TruncatedFile {
        path: PathBuf,
        expected: u64,
        actual: u64,
    },

    #[error("non-finite value at row {row}, column {col}")]
    NonFiniteValue { row: usize, col: usize },

    #[error("matrix has no rows or no columns")]
    EmptyMatrix,

    #[error("label vector is empty")]
    EmptyVector,

    #[error("length mismatch: expected {expected}, found {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("csv parse error at line {line}: {message}")]
    Csv { line: usize, message: String },

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("dimension mismatch: expected {expected}, found {actual}")]
    DimMismatch { expected: usize, actual: usize },

    #[error("zero-norm vector{}", .row.map(|r| format!(" at row {r}")).unwrap_or_default())]
    ZeroNorm { row: Option<usize> },

    #[error("too few samples: need at least {needed}, found {found}")]
    TooFewSamples { needed: usize, found: usize },

    #[error("degenerate data: total variance {0:e} is below the numerical floor")]
    DegenerateData(f64),

    #[error("graph needs at least {needed} nodes, found {found}")]
    TooFewNodes { needed: usize, found: usize },

    #[error("k = {k} is too large (maximum {max})")]
    KTooLarge { k: usize, max: usize },

    #[error("graph has no edges")]
    EmptyGraph,

    #[error("node {0} has edges but no cluster assignment")]
    UnassignedNode(usize),

    #[error("index {index} out of range for {len} rows")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("anchor and positive index are the same row ({0})")]
    SamePair(usize),

    #[error("every node is isolated after graph construction")]
    AllNodesIsolated,

    #[error("calibration holdout is empty")]
    EmptyHoldout,

    #[error("score list is empty")]
    EmptyInput,

    #[error("non-finite score at position {0}")]
    NonFiniteScore(usize),

    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("model has no threshold; calibrate it first")]
    Uncalibrated,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
