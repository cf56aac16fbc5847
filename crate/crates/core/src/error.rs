use alloc::string::String;

use thiserror::Error;

/// Errors raised by the algebraic core.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not an odd prime below 65536")]
    InvalidPrime(u32),
    #[error("zero has no square class")]
    ZeroSquareClass,
    #[error("not invertible")]
    NotInvertible,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("case label {case} does not fit rank {k}")]
    CaseMismatch { k: usize, case: &'static str },
    #[error("structure matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("structure matrix has a nonzero entry in its last row or column")]
    NonzeroLastRowCol,
    #[error("no scaling exists: {0} is not a square")]
    NoScaling(u32),
    #[error("requires p > n (p = {p}, n = {n})")]
    RequiresPGreaterThanN { p: u32, n: usize },
    #[error("not a principal unit: constant term must be 1")]
    NotPrincipalUnit,
    #[error("A^3 != 0; use chain_descent_datum")]
    CubeNonzero,
    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),
    #[error("enumeration needs {needed} elements but the budget is {budget}; use stabilizer mode")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("{0} overflows 128-bit integers")]
    Overflow(String),
    #[error("unsupported dimension n = {0}")]
    UnsupportedDimension(usize),
    #[error("internal check failed: {0}")]
    Internal(String),
}

pub type Result<T> = core::result::Result<T, Error>;
