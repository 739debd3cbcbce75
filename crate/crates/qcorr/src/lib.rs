//! Numerical toolkit for classical and quantum correlations in bipartite
//! quantum states.
//!
//! The crate computes the quantum mutual information I(A:B), the optimized
//! classical-correlation measure J(A:B), and the quantum discord
//! D = I − J, and it builds explicit Neumark and Stinespring dilations to
//! verify, step by step, that J(A:B) ≤ min{S(ρ_A), S(ρ_B)} via strong
//! subadditivity of the von Neumann entropy.
//!
//! The dense-matrix kernel ([`mat`], [`eig`], [`unitary`]) is generic over
//! the real scalar through [`scalar::Scalar`]; the concrete aliases below
//! pin `f64`, which is what the documented tolerances refer to.

pub mod correlations;
pub mod dilation;
pub mod eig;
pub mod error;
pub mod mat;
pub mod measurement;
pub mod optimize;
pub mod report;
pub mod rng;
pub mod scalar;
pub mod simplex;
pub mod state;
pub mod unitary;

pub mod cli;

pub use error::Error;
pub use mat::DimSplit;

/// Concrete f64 matrix used by all the physics layers.
pub type Mat = mat::ComplexMatrix<f64>;
/// Complex scalar matching [`Mat`].
pub type C64 = num_complex::Complex<f64>;

pub type Result<T> = std::result::Result<T, Error>;
