use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal residual {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("invalid budget k = {k} for ground set of size {ground}")]
    InvalidBudget { k: usize, ground: usize },

    #[error("ground set of size {ground} exceeds the limit {limit} for this operation")]
    TooLarge { ground: usize, limit: usize },

    #[error("invalid subset mask {mask:#x} for ground set of size {ground}")]
    InvalidSubset { mask: u64, ground: usize },

    #[error("set function is not monotone: f_S(a) = {marginal:e} for S = {set:#x}, a = {element}")]
    NotMonotone {
        set: u64,
        element: usize,
        marginal: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("zero denominator: g_S(a) = {g_marginal:e} while f_S(a) = {f_marginal:e} at S = {set:#x}, a = {element}")]
    ZeroDenominator {
        set: u64,
        element: usize,
        f_marginal: f64,
        g_marginal: f64,
    },

    #[error("every singleton value is degenerate; total curvature is undefined")]
    AllSingletonsDegenerate,

    #[error(
        "degenerate greedy-curvature denominator at step {step}, element {element}: {value:e}"
    )]
    DenominatorDegenerate {
        step: usize,
        element: usize,
        value: f64,
    },

    #[error("no candidate surrogate is feasible at delta = {delta}")]
    NoFeasibleSurrogate { delta: f64 },

    #[error("unbounded: {0}")]
    Unbounded(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
