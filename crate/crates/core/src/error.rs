use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not square")]
    NotSquare,
    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },
    #[error("diagonal entry {index} is odd")]
    OddDiagonal { index: usize },
    #[error("leading principal minor of size {size} is not positive")]
    NotPositiveDefinite { size: usize },
    #[error("cannot parse form: {0}")]
    Parse(String),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("enumeration would visit about {estimate} vectors, above the budget of {budget}")]
    ResourceLimit { estimate: u64, budget: u64 },
    #[error("expected rank {expected}, got {found}")]
    WrongRank { expected: usize, found: usize },
    #[error("discriminant {0} is not fundamental")]
    NonFundamentalDiscriminant(i128),
    #[error("tail term dominates: B = {b:e} <= u*C2 = {uc2:e}")]
    TailDominates { b: f64, uc2: f64 },
    #[error("level {0} is below the range of the bound")]
    SmallLevel(u64),
    #[error("invalid character discriminant {disc} for level {level}")]
    InvalidCharacter { disc: i128, level: u64 },
    #[error("{0} is not squarefree")]
    NotSquarefree(u64),
    #[error("argument must be positive, got {0}")]
    NonPositiveArgument(f64),
    #[error("no split local cover found")]
    NoCoverFound,
    #[error("no nicely embedded regular ternary found")]
    NoRegularEmbedding,
    #[error("residue queue exceeded its budget after {processed} classes")]
    QueueBudgetExceeded { processed: u64 },
    #[error("no method certifies this form: {0}")]
    Unresolvable(String),
    #[error("time budget exceeded; certified through {certified_through}")]
    BudgetExceeded { certified_through: u64 },
    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
