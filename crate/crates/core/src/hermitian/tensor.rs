//! Tensor products, partial traces and partial transposes on `N` qudits.
//!
//! Party `0` is the leftmost tensor factor (most significant digit of the
//! computational-basis index).

use crate::error::{Error, Result};
use crate::CMatrix;

use super::matrix::ComplexSquareMatrix;

/// `N` parties of local dimension `d`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
pub struct MultipartiteLayout {
    pub parties: usize,
    pub local_dim: usize,
}

impl MultipartiteLayout {
    pub fn new(parties: usize, local_dim: usize) -> Self {
        assert!(parties >= 1 && local_dim >= 1, "layout needs N >= 1 and d >= 1");
        Self { parties, local_dim }
    }

    /// `d^N`.
    pub fn total_dim(&self) -> usize {
        self.local_dim.pow(self.parties as u32)
    }

    pub(crate) fn digits(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.parties];
        for slot in out.iter_mut().rev() {
            *slot = index % self.local_dim;
            index /= self.local_dim;
        }
        out
    }

    pub(crate) fn index(&self, digits: &[usize]) -> usize {
        digits.iter().fold(0, |acc, &k| acc * self.local_dim + k)
    }

    fn check_subset(&self, parties: &[usize]) -> Result<Vec<bool>> {
        let mut mask = vec![false; self.parties];
        for &p in parties {
            if p >= self.parties || mask[p] {
                return Err(Error::InvalidParties {
                    parties: parties.to_vec(),
                    count: self.parties,
                });
            }
            mask[p] = true;
        }
        Ok(mask)
    }

    fn check_matrix(&self, x: &CMatrix) -> Result<()> {
        if x.nrows() != self.total_dim() || x.ncols() != self.total_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.total_dim(),
                found: x.nrows(),
            });
        }
        Ok(())
    }
}

/// Kronecker product `X ⊗ Y`.
pub fn tensor(x: &CMatrix, y: &CMatrix) -> ComplexSquareMatrix {
    ComplexSquareMatrix::new(x.kronecker(y)).expect("kronecker of square matrices is square")
}

/// Traces out the listed parties; the remaining parties keep their order.
pub fn partial_trace(
    x: &CMatrix,
    layout: MultipartiteLayout,
    traced: &[usize],
) -> Result<ComplexSquareMatrix> {
    layout.check_matrix(x)?;
    let mask = layout.check_subset(traced)?;
    let d = layout.local_dim;
    let kept_dim = d.pow(mask.iter().filter(|m| !**m).count() as u32);
    let traced_dim = d.pow(traced.len() as u32);

    // Group full indices by their traced digits, in kept-index order.
    let mut groups = vec![vec![0usize; kept_dim]; traced_dim];
    for full in 0..layout.total_dim() {
        let digits = layout.digits(full);
        let (mut kept, mut tr) = (0, 0);
        for (p, &k) in digits.iter().enumerate() {
            if mask[p] {
                tr = tr * d + k;
            } else {
                kept = kept * d + k;
            }
        }
        groups[tr][kept] = full;
    }

    let mut out = CMatrix::zeros(kept_dim, kept_dim);
    for group in &groups {
        for (a, &i) in group.iter().enumerate() {
            for (b, &j) in group.iter().enumerate() {
                out[(a, b)] += x[(i, j)];
            }
        }
    }
    ComplexSquareMatrix::new(out)
}

/// Keeps the listed parties and traces out the rest.
pub fn reduced_state(
    x: &CMatrix,
    layout: MultipartiteLayout,
    keep: &[usize],
) -> Result<ComplexSquareMatrix> {
    let mask = layout.check_subset(keep)?;
    let traced: Vec<usize> = (0..layout.parties).filter(|&p| !mask[p]).collect();
    partial_trace(x, layout, &traced)
}

/// Transposes the listed parties.
pub fn partial_transpose(
    x: &CMatrix,
    layout: MultipartiteLayout,
    parties: &[usize],
) -> Result<ComplexSquareMatrix> {
    layout.check_matrix(x)?;
    let mask = layout.check_subset(parties)?;
    let n = layout.total_dim();
    let digits: Vec<Vec<usize>> = (0..n).map(|i| layout.digits(i)).collect();
    let mut out = CMatrix::zeros(n, n);
    let mut di = vec![0; layout.parties];
    let mut dj = vec![0; layout.parties];
    for i in 0..n {
        for j in 0..n {
            for p in 0..layout.parties {
                if mask[p] {
                    di[p] = digits[j][p];
                    dj[p] = digits[i][p];
                } else {
                    di[p] = digits[i][p];
                    dj[p] = digits[j][p];
                }
            }
            out[(layout.index(&di), layout.index(&dj))] = x[(i, j)];
        }
    }
    ComplexSquareMatrix::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::eigen::min_eigenvalue;
    use crate::hermitian::matrix::{max_abs, HermitianOperator};
    use crate::C64;

    fn bell_projector() -> CMatrix {
        let h = 0.5;
        let mut m = CMatrix::zeros(4, 4);
        for &(i, j) in &[(0, 0), (0, 3), (3, 0), (3, 3)] {
            m[(i, j)] = C64::new(h, 0.0);
        }
        m
    }

    fn qubit(a: f64, b: f64, re: f64, im: f64) -> CMatrix {
        CMatrix::from_row_slice(
            2,
            2,
            &[C64::new(a, 0.0), C64::new(re, -im), C64::new(re, im), C64::new(b, 0.0)],
        )
    }

    #[test]
    fn tensor_examples() {
        let i2 = CMatrix::identity(2, 2);
        assert_eq!(tensor(&i2, &i2).as_matrix(), &CMatrix::identity(4, 4));
        let z = HermitianOperator::pauli_z();
        let zz = tensor(&z, &z);
        let diag: Vec<f64> = (0..4).map(|i| zz[(i, i)].re).collect();
        assert_eq!(diag, vec![1.0, -1.0, -1.0, 1.0]);

        // (σx⊗1 − 1⊗σx)² = 2(I − σx⊗σx), expanded by hand.
        let x = HermitianOperator::pauli_x();
        let diff = tensor(&x, &i2).into_matrix() - tensor(&i2, &x).into_matrix();
        let lhs = &diff * &diff;
        let rhs = (CMatrix::identity(4, 4) - tensor(&x, &x).into_matrix()).scale(2.0);
        assert!(max_abs(&(lhs - rhs)) < 1e-14);
    }

    #[test]
    fn partial_trace_examples() {
        let layout = MultipartiteLayout::new(2, 2);
        let rho = qubit(0.7, 0.3, 0.1, 0.2);
        let sigma = qubit(1.5, 0.5, -0.3, 0.0);
        let prod = tensor(&rho, &sigma);
        let reduced = partial_trace(&prod, layout, &[1]).unwrap();
        assert!(max_abs(&(reduced.as_matrix() - rho.scale(2.0))) < 1e-14);
        let other = partial_trace(&prod, layout, &[0]).unwrap();
        assert!(max_abs(&(other.as_matrix() - &sigma)) < 1e-14);

        let bell = partial_trace(&bell_projector(), layout, &[0]).unwrap();
        assert!(max_abs(&(bell.as_matrix() - CMatrix::identity(2, 2).scale(0.5))) < 1e-15);

        let same = partial_trace(&prod, layout, &[]).unwrap();
        assert_eq!(same.as_matrix(), prod.as_matrix());
        let kept = reduced_state(&prod, layout, &[0]).unwrap();
        assert_eq!(kept, reduced);
    }

    #[test]
    fn invalid_subsets() {
        let layout = MultipartiteLayout::new(2, 2);
        let x = CMatrix::identity(4, 4);
        assert!(matches!(
            partial_trace(&x, layout, &[2]),
            Err(Error::InvalidParties { .. })
        ));
        assert!(matches!(
            partial_transpose(&x, layout, &[0, 0]),
            Err(Error::InvalidParties { .. })
        ));
        assert!(matches!(
            partial_trace(&CMatrix::identity(3, 3), layout, &[0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn partial_transpose_examples() {
        let layout = MultipartiteLayout::new(2, 2);
        let pt = partial_transpose(&bell_projector(), layout, &[0]).unwrap();
        assert!((min_eigenvalue(&pt) + 0.5).abs() < 1e-14);

        let rho = qubit(0.7, 0.3, 0.1, 0.2);
        let sigma = qubit(0.4, 0.6, 0.0, -0.3);
        let prod = tensor(&rho, &sigma);
        let pt = partial_transpose(&prod, layout, &[0]).unwrap();
        assert!(max_abs(&(pt.as_matrix() - tensor(&rho.transpose(), &sigma).as_matrix())) < 1e-15);

        let twice = partial_transpose(&pt, layout, &[0]).unwrap();
        assert_eq!(twice.as_matrix(), prod.as_matrix());
        let full = partial_transpose(&prod, layout, &[0, 1]).unwrap();
        assert_eq!(full.as_matrix(), &prod.transpose());
    }
}
