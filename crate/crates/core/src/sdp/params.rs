//! Real coordinates of `D × D` Hermitian matrices.
//!
//! Coordinate order: the `D` diagonal entries, then for each `a < b` (row-major over the
//! upper triangle) the real part and the imaginary part of `X_ab`. The corresponding
//! basis is `E_aa`, `E_ab + E_ba` and `i E_ab − i E_ba`, so `X = Σ y_i B_i`.

use crate::{CMatrix, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisElement {
    Diagonal(usize),
    Real(usize, usize),
    Imaginary(usize, usize),
}

impl BasisElement {
    pub fn matrix(&self, dim: usize) -> CMatrix {
        let mut m = CMatrix::zeros(dim, dim);
        match *self {
            BasisElement::Diagonal(a) => m[(a, a)] = C64::new(1.0, 0.0),
            BasisElement::Real(a, b) => {
                m[(a, b)] = C64::new(1.0, 0.0);
                m[(b, a)] = C64::new(1.0, 0.0);
            }
            BasisElement::Imaginary(a, b) => {
                m[(a, b)] = C64::new(0.0, 1.0);
                m[(b, a)] = C64::new(0.0, -1.0);
            }
        }
        m
    }
}

/// `D²`.
pub fn param_count(dim: usize) -> usize {
    dim * dim
}

pub fn basis(dim: usize) -> Vec<BasisElement> {
    let mut out: Vec<BasisElement> = (0..dim).map(BasisElement::Diagonal).collect();
    for a in 0..dim {
        for b in a + 1..dim {
            out.push(BasisElement::Real(a, b));
            out.push(BasisElement::Imaginary(a, b));
        }
    }
    out
}

pub fn hermitian_from_params(dim: usize, y: &[f64]) -> CMatrix {
    assert_eq!(y.len(), param_count(dim), "parameter count");
    let mut m = CMatrix::zeros(dim, dim);
    for a in 0..dim {
        m[(a, a)] = C64::new(y[a], 0.0);
    }
    let mut k = dim;
    for a in 0..dim {
        for b in a + 1..dim {
            let z = C64::new(y[k], y[k + 1]);
            m[(a, b)] = z;
            m[(b, a)] = z.conj();
            k += 2;
        }
    }
    m
}

/// Coordinates of the Hermitian part of `x`.
pub fn params_from_hermitian(x: &CMatrix) -> Vec<f64> {
    let dim = x.nrows();
    let mut y: Vec<f64> = (0..dim).map(|a| x[(a, a)].re).collect();
    for a in 0..dim {
        for b in a + 1..dim {
            let z = 0.5 * (x[(a, b)] + x[(b, a)].conj());
            y.push(z.re);
            y.push(z.im);
        }
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::trace_product;

    #[test]
    fn round_trip_and_basis_expansion() {
        let y: Vec<f64> = (0..9).map(|k| k as f64 * 0.37 - 1.0).collect();
        let x = hermitian_from_params(3, &y);
        assert_eq!(params_from_hermitian(&x), y);
        let mut sum = CMatrix::zeros(3, 3);
        for (yi, b) in y.iter().zip(basis(3)) {
            sum += b.matrix(3).scale(*yi);
        }
        assert_eq!(sum, x);
    }

    #[test]
    fn basis_is_orthogonal() {
        let b = basis(3);
        for (i, bi) in b.iter().enumerate() {
            for (j, bj) in b.iter().enumerate() {
                let ip = trace_product(&bi.matrix(3), &bj.matrix(3));
                let expected = match (i == j, bi) {
                    (false, _) => 0.0,
                    (true, BasisElement::Diagonal(_)) => 1.0,
                    (true, _) => 2.0,
                };
                assert_eq!(ip, expected);
            }
        }
    }
}
