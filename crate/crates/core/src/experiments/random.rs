use rand::Rng;
use rand_distr::StandardNormal;

use crate::hermitian::{eigendecompose, DensityMatrix, HermitianOperator, StateVector};
use crate::{CMatrix, CVector, C64};

/// Complex number with independent standard-normal real and imaginary parts.
pub fn complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Matrix of i.i.d. [`complex_normal`] entries, filled row by row.
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> CMatrix {
    let mut m = CMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = complex_normal(rng);
        }
    }
    m
}

/// `(M + M†) / 2` for a [`ginibre`] matrix `M`.
pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> HermitianOperator {
    let m = ginibre(d, d, rng);
    HermitianOperator::hermitize(m).expect("square by construction")
}

/// `GG† / Tr(GG†)` with a `d × d` Ginibre `G`.
pub fn random_density<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DensityMatrix {
    random_density_of_rank(d, d, rng)
}

/// `GG† / Tr(GG†)` with a `d × rank` Ginibre `G`; the rank is `rank` almost surely.
pub fn random_density_of_rank<R: Rng + ?Sized>(d: usize, rank: usize, rng: &mut R) -> DensityMatrix {
    let g = ginibre(d, rank, rng);
    let gg = &g * g.adjoint();
    let trace = gg.trace().re;
    DensityMatrix::from_matrix_unchecked(gg.unscale(trace))
}

pub fn random_pure_state<R: Rng + ?Sized>(d: usize, rng: &mut R) -> StateVector {
    let v = CVector::from_iterator(d, (0..d).map(|_| complex_normal(rng)));
    StateVector::normalized(v).expect("a Gaussian vector is non-zero")
}

/// [`random_hermitian`] with its diagonal removed in the eigenbasis of `ρ`.
pub fn random_zero_diagonal_observable<R: Rng + ?Sized>(
    rho: &DensityMatrix,
    rng: &mut R,
) -> HermitianOperator {
    let a = random_hermitian(rho.dim(), rng);
    let v = eigendecompose(rho.as_operator()).vectors_matrix();
    let mut in_basis = v.adjoint() * &*a * &v;
    for i in 0..rho.dim() {
        in_basis[(i, i)] = C64::new(0.0, 0.0);
    }
    HermitianOperator::hermitize(&v * in_basis * v.adjoint()).expect("square by construction")
}
