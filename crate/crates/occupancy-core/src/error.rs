use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("square ({col},{row}) out of range for resolution {n}")]
    SquareOutOfRange { col: u32, row: u32, n: u32 },

    #[error("duplicate square ({col},{row})")]
    DuplicateSquare { col: u32, row: u32 },

    #[error("grid set is empty")]
    EmptySet,

    #[error("resolution mismatch: {left} vs {right}")]
    ResolutionMismatch { left: u32, right: u32 },

    #[error("line coefficient out of the exactly-representable range")]
    CoefficientRange,

    #[error("vertical line abscissa {x0} outside [0,1]")]
    AbscissaRange { x0: String },

    #[error("{0} is not a perfect square")]
    NotPerfectSquare(u32),

    #[error("{what}: {m} does not divide {n}")]
    Divisibility { what: &'static str, m: u64, n: u64 },

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("not an integer permutation: {0}")]
    NotAPermutation(String),

    #[error("enumeration budget exceeded: need {required}, budget {budget}")]
    BudgetExceeded { required: u128, budget: u128 },

    #[error("guard violated: {0}")]
    Guard(String),

    #[error("invariant violation: {0}")]
    InvariantViolation(String),

    #[error("size mismatch: expected a {expected}-subset, got {got} elements")]
    SizeMismatch { expected: usize, got: usize },

    #[error("element {element} out of range for ground set of size {m}")]
    ElementOutOfRange { element: u32, m: usize },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
