use thiserror::Error;

use crate::eigen_iteration::IterationRecord;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid domain: {0}")]
    InvalidDomain(String),

    #[error("invalid density: {0}")]
    InvalidDensity(String),

    #[error("{what}: expected {expected} values, got {got}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("{what}: non-finite value at node {node}")]
    NonFinite { what: &'static str, node: usize },

    #[error("field is positive at node {node} (value {value:e}); expected a nonpositive function")]
    PositiveField { node: usize, value: f64 },

    #[error("field has nonzero boundary trace ({value:e})")]
    NonzeroTrace { value: f64 },

    #[error("field is not plurisubharmonic: Monge-Ampere density {value:e} at node {node}")]
    NotPlurisubharmonic { node: usize, value: f64 },

    #[error("field vanishes identically (sup norm {sup:e}); Rayleigh quotient undefined")]
    ZeroField { sup: f64 },

    #[error("negative Monge-Ampere data {value:e} at node {node}")]
    NegativeData { node: usize, value: f64 },

    #[error("fields live on different domains")]
    DomainMismatch,

    #[error("operation requires {0}")]
    UnsupportedMode(&'static str),

    #[error("linear solve did not reach tolerance after {iterations} refinement steps (relative residual {residual:e})")]
    LinearSolve { iterations: usize, residual: f64 },

    #[error("singular pivot {pivot:e} at row {row} in banded factorization")]
    SingularPivot { row: usize, pivot: f64 },

    #[error(
        "monotone product increased at step {k}: m_{{k}} = {previous:.17e}, m_{{k+1}} = {next:.17e}"
    )]
    MonotoneProductViolated {
        k: usize,
        previous: f64,
        next: f64,
        history: Vec<IterationRecord>,
    },

    #[error("iterate {k} is degenerate (sup norm {sup:e})")]
    DegenerateIterate { k: usize, sup: f64 },

    #[error("shooting bracket [{lo}, {hi}] has no sign change of the boundary mismatch")]
    BracketNoSignChange { lo: f64, hi: f64 },

    #[error("shooting mismatch is not monotone on the bracket near lambda = {lambda}")]
    NonMonotoneMismatch { lambda: f64 },

    #[error("no oracle for this configuration: {0}")]
    UnsupportedOracle(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("config key `{key}`: {message}")]
    Config { key: String, message: String },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: String, message: String },
}
