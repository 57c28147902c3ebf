//! Dense Hermitian linear algebra and multi-qudit operations.

mod eigen;
mod embedding;
mod io;
mod matrix;
mod symmetric;
mod tensor;

pub use eigen::{conjugate_to_eigenbasis, eigendecompose, min_eigenvalue, EigenDecomposition};
pub use embedding::complex_to_real_embedding;
pub use io::{matrix_from_json, matrix_to_json, MatrixFile};
pub use matrix::{
    hermiticity_deviation, trace_product, ComplexSquareMatrix, DensityMatrix, HermitianOperator,
    StateVector,
};
pub use symmetric::{symmetric_basis, symmetric_dim, SymmetricSubspace};
pub use tensor::{partial_trace, partial_transpose, reduced_state, tensor, MultipartiteLayout};

pub(crate) use eigen::{psd_sqrt, roundoff_floor};
pub(crate) use matrix::{hermitian_part, max_abs};
