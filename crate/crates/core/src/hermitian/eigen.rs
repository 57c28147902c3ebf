use nalgebra::SymmetricEigen;

use crate::error::{Error, Result};
use crate::CMatrix;

use super::matrix::{ComplexSquareMatrix, HermitianOperator, StateVector};

/// Eigenvalues sorted descending, with matching orthonormal eigenvectors.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<StateVector>,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Eigenvectors as the columns of a unitary matrix.
    pub fn vectors_matrix(&self) -> CMatrix {
        let n = self.dim();
        CMatrix::from_fn(n, n, |i, j| self.eigenvectors[j][i])
    }

    /// `Σ λ_i v_i v_i†`.
    pub fn reconstruct(&self) -> CMatrix {
        let v = self.vectors_matrix();
        let mut scaled = v.clone();
        for (j, &lambda) in self.eigenvalues.iter().enumerate() {
            scaled.column_mut(j).scale_mut(lambda);
        }
        scaled * v.adjoint()
    }

    /// Number of eigenvalues above `threshold · λ_max`.
    pub fn rank(&self, relative_threshold: f64) -> usize {
        let largest = self
            .eigenvalues
            .iter()
            .fold(0.0_f64, |acc, l| acc.max(l.abs()));
        if largest == 0.0 {
            return 0;
        }
        self.eigenvalues
            .iter()
            .filter(|&&l| l > relative_threshold * largest)
            .count()
    }
}

/// Diagonalizes a Hermitian operator. Ties keep the solver's output order.
pub fn eigendecompose(h: &HermitianOperator) -> EigenDecomposition {
    eigendecompose_unchecked(h)
}

pub(crate) fn eigendecompose_unchecked(h: &CMatrix) -> EigenDecomposition {
    let n = h.nrows();
    let eig = SymmetricEigen::new(h.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let eigenvalues = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let eigenvectors = order
        .iter()
        .map(|&k| {
            let col = eig.eigenvectors.column(k).into_owned();
            StateVector::normalized(col).expect("eigenvectors are non-zero")
        })
        .collect();
    EigenDecomposition {
        eigenvalues,
        eigenvectors,
    }
}

/// Matrix of `A` in the eigenbasis: `B_ij = ⟨v_i|A|v_j⟩`.
pub fn conjugate_to_eigenbasis(
    a: &HermitianOperator,
    eig: &EigenDecomposition,
) -> Result<ComplexSquareMatrix> {
    if a.dim() != eig.dim() {
        return Err(Error::DimensionMismatch {
            expected: eig.dim(),
            found: a.dim(),
        });
    }
    let v = eig.vectors_matrix();
    ComplexSquareMatrix::new(v.adjoint() * a.as_square().as_matrix() * v)
}

/// Size of eigenvalue errors from the dense solver, `16 n ε max|λ|`; anything at or
/// below it is indistinguishable from zero.
pub(crate) fn roundoff_floor(eigenvalues: &[f64]) -> f64 {
    let top = eigenvalues.iter().fold(0.0_f64, |m, l| m.max(l.abs()));
    16.0 * eigenvalues.len() as f64 * f64::EPSILON * top
}

/// `H^{1/2}` of a positive semidefinite matrix, clipping negative eigenvalues to zero.
pub(crate) fn psd_sqrt(h: &CMatrix) -> CMatrix {
    let eig = eigendecompose_unchecked(h);
    let v = eig.vectors_matrix();
    // Eigenvalues at the solver's roundoff level are zeros; their square roots would
    // not be (√1e-17 ≈ 3e-9).
    let floor = roundoff_floor(&eig.eigenvalues);
    let mut scaled = v.clone();
    for (j, &lambda) in eig.eigenvalues.iter().enumerate() {
        let lambda = if lambda <= floor { 0.0 } else { lambda };
        scaled.column_mut(j).scale_mut(lambda.sqrt());
    }
    scaled * v.adjoint()
}

/// Smallest eigenvalue of a Hermitian matrix (only the lower triangle is read).
pub fn min_eigenvalue(h: &CMatrix) -> f64 {
    SymmetricEigen::new(h.clone())
        .eigenvalues
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}
