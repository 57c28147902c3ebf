//! JSON matrix files: `{"dim": n, "entries": [[re, im], ...]}`, row-major.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::{CMatrix, C64};

use super::matrix::ComplexSquareMatrix;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub dim: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixFile {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let n = m.nrows();
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                let z = m[(i, j)];
                entries.push([z.re, z.im]);
            }
        }
        Self { dim: n, entries }
    }

    pub fn to_matrix(&self) -> Result<ComplexSquareMatrix> {
        let entries: Vec<C64> = self.entries.iter().map(|[re, im]| C64::new(*re, *im)).collect();
        ComplexSquareMatrix::from_row_major(self.dim, &entries)
    }
}

pub fn matrix_from_json(text: &str) -> Result<ComplexSquareMatrix> {
    serde_json::from_str::<MatrixFile>(text)?.to_matrix()
}

pub fn matrix_to_json(m: &CMatrix) -> String {
    serde_json::to_string(&MatrixFile::from_matrix(m)).expect("matrix serialization")
}
