//! Occupation-number basis of the symmetric subspace of `N` qudits.
//!
//! Each basis vector is the normalized sum over the distinct orderings of one
//! multiset of `N` symbols from `{0, …, d−1}`; for qubits this is the usual
//! Dicke basis. Vectors are ordered by their sorted symbol tuples, lexicographically.

use std::collections::HashMap;

use nalgebra::DMatrix;

use crate::{CMatrix, CVector, C64};

use super::matrix::StateVector;
use super::tensor::MultipartiteLayout;

/// `C(N + d − 1, N)`.
pub fn symmetric_dim(parties: usize, local_dim: usize) -> usize {
    binomial(parties + local_dim - 1, parties)
}

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    let k = k.min(n - k.min(n));
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// The symmetric subspace together with its isometry into the full space.
#[derive(Debug, Clone)]
pub struct SymmetricSubspace {
    layout: MultipartiteLayout,
    /// Sorted symbol tuple of each basis vector.
    occupations: Vec<Vec<usize>>,
    /// `d^N × dim` real matrix whose columns are the basis vectors.
    isometry: DMatrix<f64>,
}

impl SymmetricSubspace {
    pub fn new(layout: MultipartiteLayout) -> Self {
        let mut occupations = Vec::new();
        let mut current = vec![0usize; layout.parties];
        collect_multisets(layout.local_dim, 0, 0, &mut current, &mut occupations);
        let lookup: HashMap<&[usize], usize> = occupations
            .iter()
            .enumerate()
            .map(|(k, occ)| (occ.as_slice(), k))
            .collect();

        let total = layout.total_dim();
        let mut members: Vec<Vec<usize>> = vec![Vec::new(); occupations.len()];
        for full in 0..total {
            let mut digits = layout.digits(full);
            digits.sort_unstable();
            members[lookup[digits.as_slice()]].push(full);
        }
        let mut isometry = DMatrix::zeros(total, occupations.len());
        for (k, group) in members.iter().enumerate() {
            let amp = 1.0 / (group.len() as f64).sqrt();
            for &full in group {
                isometry[(full, k)] = amp;
            }
        }
        Self {
            layout,
            occupations,
            isometry,
        }
    }

    pub fn layout(&self) -> MultipartiteLayout {
        self.layout
    }

    pub fn dim(&self) -> usize {
        self.occupations.len()
    }

    pub fn occupations(&self) -> &[Vec<usize>] {
        &self.occupations
    }

    pub fn isometry(&self) -> &DMatrix<f64> {
        &self.isometry
    }

    /// The isometry as a complex matrix.
    pub fn isometry_complex(&self) -> CMatrix {
        self.isometry.map(|x| C64::new(x, 0.0))
    }

    pub fn basis(&self) -> Vec<StateVector> {
        (0..self.dim())
            .map(|k| {
                let col: CVector = self.isometry.column(k).map(|x| C64::new(x, 0.0));
                StateVector::normalized(col).expect("basis columns are non-zero")
            })
            .collect()
    }

    /// `S X S†`: a matrix on the symmetric subspace lifted to the full space.
    pub fn lift(&self, x: &CMatrix) -> CMatrix {
        let s = self.isometry_complex();
        &s * x * s.adjoint()
    }

    /// `S† Y S`: compression of a full-space operator.
    pub fn compress(&self, y: &CMatrix) -> CMatrix {
        let s = self.isometry_complex();
        s.adjoint() * y * &s
    }
}

fn collect_multisets(
    d: usize,
    position: usize,
    start: usize,
    current: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if position == current.len() {
        out.push(current.clone());
        return;
    }
    for symbol in start..d {
        current[position] = symbol;
        collect_multisets(d, position + 1, symbol, current, out);
    }
}

/// Orthonormal basis of the symmetric subspace, `C(N+d−1, N)` vectors.
pub fn symmetric_basis(layout: MultipartiteLayout) -> Vec<StateVector> {
    SymmetricSubspace::new(layout).basis()
}
