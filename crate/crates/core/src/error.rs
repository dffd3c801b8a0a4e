use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("ring spec mismatch: {0}")]
    SpecMismatch(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("element is not a unit")]
    NotUnit,
    #[error("precision exceeded: {0}")]
    PrecisionExceeded(String),
    #[error("no solution (stuck at column {column})")]
    NoSolution { column: usize },
    #[error("no unit coefficient up to x-degree {0}")]
    NoUnitCoefficient(usize),
    #[error("Weierstrass iteration did not converge after {0} steps")]
    NonConvergence(usize),
    #[error("formal group law solve failed at degree {0}")]
    SolveFailure(usize),
    #[error("input not nilpotent within truncation {0}")]
    NonNilpotent(usize),
    #[error("congruence failure: {0}")]
    CongruenceFailure(String),
    #[error("factorization mismatch: {0}")]
    FactorizationMismatch(String),
    #[error("lower powers dependent at degree {0}")]
    DependenceTooEarly(usize),
    #[error("not etale: {0}")]
    NotEtale(String),
    #[error("not divisible: {0}")]
    NonDivisible(String),
    #[error("group closure exceeds bound {0}")]
    ClosureTooLarge(usize),
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("witness not found within budget {0}")]
    WitnessNotFound(u32),
    #[error("mismatch: {0}")]
    Mismatch(String),
}
