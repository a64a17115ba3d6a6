use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("SubmodularityViolation: penalty differences increase at i = {index} (size {size})")]
    SubmodularityViolation { size: usize, index: usize },

    #[error("NegativePenalty: w_{index} = {value} for hyperedge size {size}")]
    NegativePenalty { size: usize, index: usize, value: f64 },

    #[error("invalid splitting function: {0}")]
    InvalidSplitting(String),

    #[error("invalid hyperedge {edge}: {reason}")]
    InvalidHyperedge { edge: usize, reason: String },

    #[error("invalid hyperedge weight {value} on hyperedge {edge}")]
    InvalidEdgeWeight { edge: usize, value: f64 },

    #[error("positive node weight required (node {node} has weight {value})")]
    NonPositiveNodeWeight { node: usize, value: f64 },

    #[error("node weight vector has length {got}, expected {expected}")]
    WeightLength { expected: usize, got: usize },

    #[error("IsolatedNode: node {0} belongs to no hyperedge")]
    IsolatedNode(usize),

    #[error("EmptySide: both S and its complement must be nonempty")]
    EmptySide,

    #[error("node {node} out of range for {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },

    #[error("hypergraph has no hyperedges")]
    NoHyperedges,

    #[error("UnbalancedSides: pi(R) = {pi_r} exceeds pi(R complement) = {pi_rest}")]
    UnbalancedSides { pi_r: f64, pi_rest: f64 },

    #[error("NotSaturating: flow value {value} below pi(R) = {target}")]
    NotSaturating { value: f64, target: f64 },

    #[error("ConservationViolation: imbalance {imbalance} at node {node}")]
    ConservationViolation { node: usize, imbalance: f64 },

    #[error("MissingDecomposition: certificate was built without retained flow paths")]
    MissingDecomposition,

    #[error("InternalBoundExceeded: {0}")]
    InternalBoundExceeded(String),

    #[error("EigenNoConvergence: residual {residual} after {applications} matrix applications")]
    EigenNoConvergence { residual: f64, applications: usize },

    #[error("TooLarge: {what} = {size} exceeds the oracle cap {cap}")]
    TooLarge { what: &'static str, size: usize, cap: usize },

    #[error("ZeroPenalty: w_{index} = 0 for hyperedge {edge}, clique distortion is unbounded")]
    ZeroPenalty { edge: usize, index: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}
