use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("not associative: (b{0}*b{1})*b{2} != b{0}*(b{1}*b{2})")]
    NotAssociative(usize, usize, usize),

    #[error("unit check failed at basis element {0}")]
    BadUnit(usize),

    #[error("operands belong to different algebras")]
    AlgebraMismatch,

    #[error("bimodule axiom {law} fails on basis triple ({a}, {b}, {c})")]
    BimoduleViolation { law: &'static str, a: usize, b: usize, c: usize },

    #[error("invalid extension: {0}")]
    InvalidExtension(String),

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("degree {degree} is outside the domain of {map}")]
    UndefinedDegree { map: String, degree: usize },

    #[error("support violation: {0}")]
    Support(String),

    #[error("size budget exceeded: {what} needs {needed} columns, budget is {budget}")]
    Budget { what: String, needed: u128, budget: u128 },

    #[error("not a chain map at degree {degree}: witness basis tuple {witness:?}")]
    NotChainMap { degree: usize, witness: Vec<usize> },

    #[error("not a cycle: {0}")]
    NotCycle(String),

    #[error("not a cocycle: {0}")]
    NotCocycle(String),

    #[error("invalid splitting: {0}")]
    InvalidSplitting(String),

    #[error("internal invariant broken: {0}")]
    Internal(String),
}
