use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty slope (0,0) is not allowed here")]
    EmptySlope,
    #[error("({0},{1}) is not a primitive pair")]
    NotPrimitive(i64, i64),
    #[error("matrix has determinant {0}, expected +1 or -1")]
    NotUnimodular(i64),
    #[error("unknown generator `{0}`")]
    UnknownGenerator(String),
    #[error("matrices are not conjugate (trace^2 {0} vs {1})")]
    NotConjugate(String, String),
    #[error("no representation exists for ({0},{1},{2})")]
    NoSolution(u32, u32, u32),
    #[error("inconsistent construction: {0}")]
    Inconsistent(String),
    #[error("bending parameter must be nonzero")]
    ZeroParameter,
    #[error("trace is constant along the family; no pole certificate")]
    ConstantTrace,
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("search envelope exceeded: {0}")]
    Envelope(String),
    #[error("arity mismatch: {0} vs {1}")]
    ArityMismatch(usize, usize),
    #[error("unknown manifold `{0}`")]
    UnknownManifold(String),
    #[error("unknown lemma `{0}`")]
    UnknownLemma(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
