use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u32, u32),

    #[error("{n} does not divide {m}")]
    NotDivisible { n: u32, m: u32 },

    #[error("matrix has determinant {det}, expected 1")]
    NotUnimodular { det: i128 },

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("invalid generator set: {0}")]
    InvalidGenerators(String),

    #[error("invalid action: {0}")]
    InvalidAction(String),

    #[error("symbol sets differ")]
    SymbolMismatch,

    #[error("size mismatch: expected {expected}, found {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("{what} exceeds budget {budget}")]
    BudgetExceeded { what: String, budget: u64 },

    #[error("ground set of size {size} exceeds the exhaustive threshold {threshold}")]
    ThresholdExceeded { size: usize, threshold: usize },

    #[error("generator image does not generate SL_{d}(Z/{n}Z)")]
    NotTransitive { d: usize, n: u32 },

    #[error("empty sample")]
    EmptySample,

    #[error("group order {0} is odd")]
    OddOrder(usize),

    #[error("power iteration did not converge in {iterations} steps (eigenvalue in [{lo}, {hi}])")]
    NotConverged { iterations: usize, lo: f64, hi: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
