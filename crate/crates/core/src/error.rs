use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("node {0} is not an interior node")]
    NotInterior(usize),

    #[error("node {0} is too close to the grid edge for this stencil")]
    NearEdge(usize),

    #[error("empty node mask: {0}")]
    EmptyMask(&'static str),

    #[error("non-finite value at node {node} in field `{label}`")]
    NonFinite { label: String, node: usize },

    #[error("argument t = {0} must be nonnegative")]
    NegativeT(f64),

    #[error("argument t = {0} must be strictly positive")]
    NonPositiveT(f64),

    #[error("vanishing gradient at node {0} (|Dw| below the regularization floor)")]
    VanishingGradient(usize),

    #[error("degenerate polygon: {0}")]
    DegeneratePolygon(&'static str),

    #[error("shrunken domain is empty: r_eps = {r_eps} exceeds the inradius")]
    EmptyShrunkenDomain { r_eps: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("no admissible barrier parameter: {0}")]
    NoAdmissibleParameter(String),

    #[error("scenario hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("config error at line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv format error at line {line}: {msg}")]
    Csv { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
