use nalgebra::DMatrix;

use super::matrix::HermitianOperator;

/// `[[Re H, −Im H], [Im H, Re H]]`: a real symmetric matrix with the spectrum
/// of `H`, each eigenvalue doubled.
pub fn complex_to_real_embedding(h: &HermitianOperator) -> DMatrix<f64> {
    let n = h.dim();
    let mut out = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            out[(i, j)] = z.re;
            out[(i + n, j + n)] = z.re;
            out[(i, j + n)] = -z.im;
            out[(i + n, j)] = z.im;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::SymmetricEigen;

    fn sorted_eigenvalues(m: DMatrix<f64>) -> Vec<f64> {
        let mut v: Vec<f64> = SymmetricEigen::new(m).eigenvalues.iter().copied().collect();
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn real_input_is_block_diagonal() {
        let h = HermitianOperator::from_real(2, &[1.0, 2.0, 2.0, -3.0]).unwrap();
        let e = complex_to_real_embedding(&h);
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(e[(i, j)], h[(i, j)].re);
                assert_eq!(e[(i + 2, j + 2)], h[(i, j)].re);
                assert_eq!(e[(i, j + 2)], 0.0);
                assert_eq!(e[(i + 2, j)], 0.0);
            }
        }
    }

    #[test]
    fn pauli_y_spectrum_doubles() {
        let e = complex_to_real_embedding(&HermitianOperator::pauli_y());
        assert!((&e - e.transpose()).amax() == 0.0);
        let ev = sorted_eigenvalues(e);
        for (got, want) in ev.iter().zip([-1.0, -1.0, 1.0, 1.0]) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn identity_maps_to_identity() {
        let e = complex_to_real_embedding(&HermitianOperator::identity(3));
        assert_eq!(e, DMatrix::identity(6, 6));
    }
}
