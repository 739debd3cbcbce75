//! Error type shared across the toolkit. Every rejected input names the
//! invariant that failed.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("not Hermitian: asymmetry {asymmetry:.3e} exceeds tolerance")]
    NotHermitian { asymmetry: f64 },

    #[error("not positive semidefinite: minimum eigenvalue {min_eigenvalue:.3e}")]
    NotPsd { min_eigenvalue: f64 },

    #[error("trace is {trace:.17}, expected 1 within tolerance")]
    TraceNotOne { trace: f64 },

    #[error("not unitary: residual {residual:.3e}")]
    NotUnitary { residual: f64 },

    #[error("columns/rows not orthonormal: residual {residual:.3e}")]
    NotOrthonormal { residual: f64 },

    #[error("non-finite entry encountered")]
    NonFinite,

    #[error("zero vector cannot be normalized")]
    ZeroVector,

    #[error("invalid probability distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("invalid projective measurement: {0}")]
    InvalidProjective(String),

    #[error("unknown state family: {0}")]
    UnknownFamily(String),

    #[error("parameter out of range: {0}")]
    ParamRange(String),

    #[error("rank {rank} out of range 1..={max}")]
    RankOutOfRange { rank: usize, max: usize },

    #[error("dilated dimension {total} exceeds cap {cap}; reduce outcomes or subsystem dimensions")]
    DimensionCap { total: usize, cap: usize },

    #[error("unitary completion failed: {0}")]
    CompletionFailed(String),

    #[error("eigensolver did not converge: {0}")]
    Convergence(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}
