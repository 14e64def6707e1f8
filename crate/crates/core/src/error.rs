use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: expected two tokens, found {found}")]
    Parse { line: usize, found: usize },

    #[error("line {line}: self-loop on {label} with self-loop dropping disabled")]
    SelfLoop { line: usize, label: String },

    #[error("line {line}: duplicate edge {u} {v} with deduplication disabled")]
    DuplicateEdge { line: usize, u: String, v: String },

    #[error("edge list contains no edges")]
    EmptyGraph,

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("clique order {requested} outside supported range 2..={cap}")]
    OrderCap { requested: usize, cap: usize },

    #[error("estimated work {estimate} exceeds budget {budget}; raise the budget or lower the order")]
    Budget { estimate: u128, budget: u128 },

    #[error("count overflow while accumulating clique counts of order {order}")]
    Overflow { order: usize },

    #[error("brute-force oracle refuses graphs with n = {n} > {limit}")]
    OracleTooLarge { n: usize, limit: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("node {node}: kappa {kappa} exceeds sqrt(kappa_2) for kappa_2 = {kappa2}")]
    BoundViolation { node: usize, kappa2: f64, kappa: f64 },

    #[error("every one of the {0} null-model samples failed to converge")]
    NoConvergedSamples(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
