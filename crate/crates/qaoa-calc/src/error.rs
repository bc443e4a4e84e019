use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right} qubits")]
    DimensionMismatch { left: usize, right: usize },
    #[error("index {index} out of range for {n} variables")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("repeated index {0} in mixed difference; use repeated_partial_difference")]
    RepeatedIndex(usize),
    #[error("bitstring length {got} does not match {expected} variables")]
    LengthMismatch { expected: usize, got: usize },
    #[error("{what} exceeds size limit: {got} > {limit}")]
    SizeLimit { what: &'static str, limit: usize, got: usize },
    #[error("term budget exceeded: {terms} terms after {steps} of {total} commutators (budget {budget})")]
    TermBudget { budget: usize, terms: usize, steps: usize, total: usize },
    #[error("term budget exceeded for term {term}: {terms} terms at layer {layer} (budget {budget})")]
    TermBudgetAt { term: usize, layer: usize, budget: usize, terms: usize },
    #[error("string {0:#b} is infeasible for this neighborhood")]
    Infeasible(u64),
    #[error("operator is not diagonal")]
    NotDiagonal,
    #[error("operator is not Hermitian")]
    NotHermitian,
    #[error("cost Hamiltonian is not quadratic (locality {0})")]
    NotQubo(usize),
    #[error("cost function is constant")]
    ConstantCost,
    #[error("singular Pade system for orders ({m}, {n})")]
    SingularPade { m: usize, n: usize },
    #[error("sampler precondition violated: {quantity} = {value} exceeds {bound}")]
    SamplerBound { quantity: &'static str, value: f64, bound: f64 },
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
