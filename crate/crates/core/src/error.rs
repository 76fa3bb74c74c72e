//! Error type shared by all modules of the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("entry matrix is {rows}x{cols}, expected square of side {side} for dims {dims:?}")]
    ShapeMismatch {
        rows: usize,
        cols: usize,
        side: usize,
        dims: Vec<usize>,
    },

    #[error("subsystem index {index} out of range for {count} subsystems")]
    SubsystemOutOfRange { index: usize, count: usize },

    #[error("operator dims {left:?} incompatible with dims {right:?}")]
    DimensionMismatch { left: Vec<usize>, right: Vec<usize> },

    #[error("matrix is not Hermitian: residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    NotHermitian { residual: f64, tol: f64 },

    #[error("matrix is not unitary: residual {residual:.3e} exceeds tolerance {tol:.3e}")]
    NotUnitary { residual: f64, tol: f64 },

    #[error("matrix is not positive semidefinite: eigenvalue {value:.6e} below -{tol:.3e}")]
    NotPositive { value: f64, tol: f64 },

    #[error("trace {trace:.12e} is not 1 within {tol:.3e}")]
    NotUnitTrace { trace: f64, tol: f64 },

    #[error("requested matrix side {side} exceeds the dense size limit {limit}")]
    SizeLimit { side: usize, limit: usize },

    #[error("no built-in unitary for shield dimension {d} (built-in generator covers powers of two); supply one explicitly")]
    NoBuiltinUnitary { d: usize },

    #[error("tensor product of an empty operator list")]
    EmptyTensorList,

    #[error("eigenvalue iteration failed to converge")]
    NoConvergence,

    #[error("triangle inequality violated: {lhs} = {lhs_value:.6} exceeds {rhs} = {rhs_value:.6}")]
    TriangleViolation {
        lhs: &'static str,
        lhs_value: f64,
        rhs: &'static str,
        rhs_value: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
