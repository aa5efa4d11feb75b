use thiserror::Error;

use crate::tensor::Triple;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("axis dimensions must be positive, got {0:?}")]
    InvalidDims([usize; 3]),
    #[error("term {triple} is out of range for dims {dims:?}")]
    IndexOutOfRange { triple: Triple, dims: [usize; 3] },
    #[error("term {0} listed more than once")]
    DuplicateTriple(Triple),
    #[error("term {0} has a zero coefficient")]
    ZeroCoefficient(Triple),
    #[error("label list for axis {axis} has {got} entries, expected {expected}")]
    LabelLength {
        axis: char,
        got: usize,
        expected: usize,
    },
    #[error("support budget exceeded: {required} terms required, budget is {budget}")]
    BudgetExceeded { required: u128, budget: u128 },
    #[error("partition does not assign support term {0}")]
    MissingTriple(Triple),
    #[error("{0} is not in the support of the tensor")]
    TripleNotInSupport(Triple),
    #[error("claimed tensor is not a sub-tensor of the source: {0}")]
    NotSubtensor(String),
    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),
    #[error("invalid group: {0}")]
    InvalidGroup(String),
    #[error("unknown group `{0}`")]
    UnknownGroup(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("hypothesis not satisfied: {0}")]
    HypothesisViolated(String),
    #[error("hypothesis could not be decided at the working precision: {0}")]
    Undecided(String),
    #[error("invalid witness: {0}")]
    InvalidWitness(String),
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
