use std::ops::Deref;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::tolerance::TOLERANCES;
use crate::{CMatrix, CVector, C64};

use super::eigen::eigendecompose;

/// A dense `dim × dim` complex matrix, `dim ≥ 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexSquareMatrix(CMatrix);

impl ComplexSquareMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let (rows, cols) = matrix.shape();
        if rows != cols || rows == 0 {
            return Err(Error::NotSquare { rows, cols });
        }
        Ok(Self(matrix))
    }

    /// Builds from entries in row-major order.
    pub fn from_row_major(dim: usize, entries: &[C64]) -> Result<Self> {
        if dim == 0 {
            return Err(Error::NotSquare { rows: 0, cols: 0 });
        }
        if entries.len() != dim * dim {
            return Err(Error::EntryCount {
                dim,
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Ok(Self(DMatrix::from_row_slice(dim, dim, entries)))
    }

    pub fn identity(dim: usize) -> Self {
        Self(CMatrix::identity(dim, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn to_row_major(&self) -> Vec<C64> {
        let n = self.dim();
        let mut out = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }
}

impl Deref for ComplexSquareMatrix {
    type Target = CMatrix;

    fn deref(&self) -> &CMatrix {
        &self.0
    }
}

/// Largest `|X_ij − conj(X_ji)|`.
pub fn hermiticity_deviation(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0_f64;
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

pub(crate) fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

/// `(M + M†) / 2`.
pub(crate) fn hermitian_part(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// A Hermitian operator `A = A†` (the observable).
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator(ComplexSquareMatrix);

impl HermitianOperator {
    /// Validates Hermiticity within `1e-12 · (1 + max|X_ij|)`. The stored matrix is
    /// exactly Hermitian (the anti-Hermitian remainder is dropped).
    pub fn new(matrix: CMatrix) -> Result<Self> {
        let m = ComplexSquareMatrix::new(matrix)?;
        let deviation = hermiticity_deviation(&m);
        if deviation > TOLERANCES.hermiticity * (1.0 + max_abs(&m)) {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(Self(ComplexSquareMatrix(hermitian_part(&m))))
    }

    pub fn from_square(m: ComplexSquareMatrix) -> Result<Self> {
        Self::new(m.into_matrix())
    }

    /// Takes the Hermitian part of an arbitrary square matrix.
    pub fn hermitize(matrix: CMatrix) -> Result<Self> {
        let m = ComplexSquareMatrix::new(matrix)?;
        Ok(Self(ComplexSquareMatrix(hermitian_part(&m))))
    }

    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        let entries: Vec<C64> = entries.iter().map(|&x| C64::new(x, 0.0)).collect();
        Self::from_square(ComplexSquareMatrix::from_row_major(dim, &entries)?)
    }

    pub fn identity(dim: usize) -> Self {
        Self(ComplexSquareMatrix::identity(dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(ComplexSquareMatrix(CMatrix::zeros(dim, dim)))
    }

    pub fn pauli_x() -> Self {
        Self::from_real(2, &[0.0, 1.0, 1.0, 0.0]).expect("static matrix")
    }

    pub fn pauli_y() -> Self {
        let i = C64::i();
        let m = CMatrix::from_row_slice(2, 2, &[C64::new(0.0, 0.0), -i, i, C64::new(0.0, 0.0)]);
        Self::new(m).expect("static matrix")
    }

    pub fn pauli_z() -> Self {
        Self::from_real(2, &[1.0, 0.0, 0.0, -1.0]).expect("static matrix")
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn as_square(&self) -> &ComplexSquareMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0.into_matrix()
    }
}

impl Deref for HermitianOperator {
    type Target = CMatrix;

    fn deref(&self) -> &CMatrix {
        &self.0
    }
}

/// A density matrix: Hermitian, unit trace, positive semidefinite within tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix(HermitianOperator);

impl DensityMatrix {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        Self::from_operator(HermitianOperator::new(matrix)?)
    }

    pub fn from_operator(op: HermitianOperator) -> Result<Self> {
        let trace = op.trace().re;
        if (trace - 1.0).abs() > TOLERANCES.trace {
            return Err(Error::Trace { trace });
        }
        let smallest = eigendecompose(&op)
            .eigenvalues
            .last()
            .copied()
            .unwrap_or(0.0);
        if smallest < -TOLERANCES.positivity {
            return Err(Error::NotPositive {
                eigenvalue: smallest,
            });
        }
        Ok(Self(op))
    }

    /// Real diagonal density matrix.
    pub fn diagonal(probabilities: &[f64]) -> Result<Self> {
        let n = probabilities.len();
        let mut m = CMatrix::zeros(n, n);
        for (i, &p) in probabilities.iter().enumerate() {
            m[(i, i)] = C64::new(p, 0.0);
        }
        Self::new(m)
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let m = CMatrix::identity(dim, dim).scale(1.0 / dim as f64);
        Self(HermitianOperator(ComplexSquareMatrix(m)))
    }

    pub fn pure(psi: &StateVector) -> Self {
        Self(HermitianOperator(ComplexSquareMatrix(psi.projector())))
    }

    /// Builds `Σ w_k |ψ_k⟩⟨ψ_k|`, assuming the weights form a probability vector.
    pub(crate) fn from_ensemble_unchecked(weights: &[f64], states: &[StateVector]) -> Self {
        let dim = states[0].dim();
        let mut m = CMatrix::zeros(dim, dim);
        for (w, s) in weights.iter().zip(states) {
            m += s.projector().scale(*w);
        }
        Self(HermitianOperator(ComplexSquareMatrix(hermitian_part(&m))))
    }

    /// Wraps a matrix already known to be a valid state up to round-off.
    pub(crate) fn from_matrix_unchecked(m: CMatrix) -> Self {
        Self(HermitianOperator(ComplexSquareMatrix(hermitian_part(&m))))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn as_operator(&self) -> &HermitianOperator {
        &self.0
    }

    /// `Tr(A ρ)`.
    pub fn expectation(&self, a: &HermitianOperator) -> f64 {
        trace_product(self, a)
    }

    /// `Tr(ρ²)`.
    pub fn purity(&self) -> f64 {
        trace_product(self, self)
    }
}

impl Deref for DensityMatrix {
    type Target = CMatrix;

    fn deref(&self) -> &CMatrix {
        &self.0
    }
}

/// `Re Tr(X Y)` without forming the product.
pub fn trace_product(x: &CMatrix, y: &CMatrix) -> f64 {
    let n = x.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for k in 0..n {
            acc += (x[(i, k)] * y[(k, i)]).re;
        }
    }
    acc
}

/// A normalized pure state.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector(CVector);

impl StateVector {
    /// Validates `|‖ψ‖² − 1| ≤ 1e-12`.
    pub fn new(amplitudes: CVector) -> Result<Self> {
        let norm_sqr = amplitudes.norm_squared();
        if amplitudes.is_empty() || (norm_sqr - 1.0).abs() > TOLERANCES.normalization {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self(amplitudes))
    }

    /// Rescales to unit norm. Fails on the zero vector.
    pub fn normalized(amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if amplitudes.is_empty() || norm == 0.0 || !norm.is_finite() {
            return Err(Error::NotNormalized {
                norm_sqr: norm * norm,
            });
        }
        Ok(Self(amplitudes.unscale(norm)))
    }

    pub fn from_slice(amplitudes: &[C64]) -> Result<Self> {
        Self::new(DVector::from_column_slice(amplitudes))
    }

    pub fn basis(dim: usize, index: usize) -> Self {
        let mut v = CVector::zeros(dim);
        v[index] = C64::new(1.0, 0.0);
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.0
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> CMatrix {
        &self.0 * self.0.adjoint()
    }

    /// `⟨ψ|A|ψ⟩`.
    pub fn expectation(&self, a: &CMatrix) -> f64 {
        self.0.dotc(&(a * &self.0)).re
    }

    /// `⟨ψ|A|φ⟩`.
    pub fn matrix_element(&self, a: &CMatrix, other: &StateVector) -> C64 {
        self.0.dotc(&(a * &other.0))
    }

    /// `⟨ψ|A²|ψ⟩ − ⟨ψ|A|ψ⟩²`.
    pub fn variance(&self, a: &CMatrix) -> f64 {
        let av = a * &self.0;
        let mean = self.0.dotc(&av).re;
        (av.norm_squared() - mean * mean).max(0.0)
    }
}

impl Deref for StateVector {
    type Target = CVector;

    fn deref(&self) -> &CVector {
        &self.0
    }
}
