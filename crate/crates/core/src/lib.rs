//! # fisher-roof
//!
//! Variance, quantum Fisher information and their roof constructions.
//!
//! The crate computes, for a density matrix `ρ` and an observable `A`:
//!
//! - the variance `(ΔA)² = Tr(A²ρ) − Tr(Aρ)²` and the quantum Fisher information
//!   `F_Q = 2 Σ (λ_i − λ_j)² / (λ_i + λ_j) |A_ij|²` ([`metrology`]);
//! - the generalized variances and Fisher informations generated by operator means,
//!   with the normalization that makes them agree with `(ΔA)²` and `4(ΔA)²` on pure states;
//! - pure-state decompositions attaining the concave roof of the variance (which is the
//!   variance itself) and, for rank-2 states with zero-diagonal observables, the convex
//!   roof (which is `F_Q / 4`) ([`roofs`]);
//! - semidefinite lower bounds on the convex roof from PPT symmetric states and PPT
//!   symmetric extensions, with a built-in interior-point solver ([`sdp`]);
//! - seeded random ensembles and the relative-difference statistics between `F_Q` and
//!   those bounds ([`experiments`]).
//!
//! Dense linear algebra, tensor products, partial traces/transposes and the symmetric
//! subspace basis live in [`hermitian`].

#![forbid(unsafe_code)]

pub mod error;
pub mod experiments;
pub mod hermitian;
pub mod metrology;
pub mod roofs;
pub mod sdp;
pub mod tolerance;

pub use error::{Error, Result};
pub use hermitian::{
    ComplexSquareMatrix, DensityMatrix, EigenDecomposition, HermitianOperator,
    MultipartiteLayout, StateVector,
};
pub use metrology::{MeanFunction, MeanCatalog};
pub use roofs::PureDecomposition;
pub use tolerance::{Tolerances, TOLERANCES};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
/// Dense complex matrix.
pub type CMatrix = nalgebra::DMatrix<C64>;
/// Dense complex column vector.
pub type CVector = nalgebra::DVector<C64>;
