use thiserror::Error;

/// Errors produced by table construction, certificate checks and the solvers.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("input width ceiling exceeded: p+q+r = {got} > {ceiling}")]
    SizeCeiling { got: u32, ceiling: u32 },

    #[error("output width s = {0} out of range (1..=32)")]
    BadOutputWidth(u32),

    #[error("table length {got} does not match 2^(p+q+r) = {want}")]
    TableLength { got: usize, want: usize },

    #[error("table entry {value} at index {index} does not fit in {bits} bits")]
    TableEntryRange { index: usize, value: u64, bits: u32 },

    #[error("input ({x}, {y}, {z}) out of range for widths ({p}, {q}, {r})")]
    InputWidth { x: u64, y: u64, z: u64, p: u32, q: u32, r: u32 },

    #[error("certificate shape mismatch: {0}")]
    CertificateShape(String),

    #[error("{0}")]
    BadFamily(String),

    #[error("agreement requires a predicate (s = 1), got s = {0}")]
    NotPredicate(u32),

    #[error("search budget exhausted after {nodes} nodes")]
    BudgetExhausted { nodes: u64 },

    #[error("epsilon must satisfy 0 <= eps < 1/2, got {0}")]
    EpsilonRange(String),

    #[error("polynomial shape mismatch: {0}")]
    PolyShape(String),

    #[error("malformed protocol message: {0}")]
    ProtocolMessage(String),

    #[error("automaton rule malformed: {0}")]
    BadRule(String),

    #[error("circuit shape mismatch: {0}")]
    CircuitShape(String),

    #[error("extraction geometry degenerate: {0}")]
    ExtractionGeometry(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
