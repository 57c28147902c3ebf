//! Variance, quantum Fisher information and the mean-generated families.
//!
//! All quantities except the plain variance are evaluated in the eigenbasis of
//! `ρ`: with eigenvalues `λ_i` and `A_ij = ⟨v_i|A|v_j⟩`,
//!
//! - raw generalized variance: `Σ m(λ_i, λ_j) |A_ij|² − (Σ λ_i A_ii)²`
//! - raw generalized Fisher information: `Σ (λ_i − λ_j)² / m(λ_i, λ_j) |A_ij|²`
//!
//! Normalized versions divide the variance by `2 m(1,0)` and multiply the Fisher
//! information by `2 m(1,0)`, so that on pure states they equal `(ΔA)²` and `4(ΔA)²`.

mod means;

pub use means::{MeanCatalog, MeanFunction};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermitian::{
    conjugate_to_eigenbasis, eigendecompose, psd_sqrt, roundoff_floor, trace_product, DensityMatrix,
    HermitianOperator,
};
use crate::roofs::PureDecomposition;
use crate::tolerance::TOLERANCES;
use crate::CMatrix;

fn check_dims(rho: &DensityMatrix, a: &HermitianOperator) -> Result<()> {
    if rho.dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: a.dim(),
        });
    }
    Ok(())
}

/// Eigenvalues of `ρ` (zeroed at or below the roundoff floor) and `A` in the eigenbasis of `ρ`.
struct Spectral {
    lambdas: Vec<f64>,
    a: CMatrix,
}

impl Spectral {
    fn new(rho: &DensityMatrix, a: &HermitianOperator) -> Result<Self> {
        check_dims(rho, a)?;
        let eig = eigendecompose(rho.as_operator());
        let a = conjugate_to_eigenbasis(a, &eig)?.into_matrix();
        let floor = roundoff_floor(&eig.eigenvalues);
        let lambdas = eig.eigenvalues.iter().map(|&l| if l <= floor { 0.0 } else { l }).collect();
        Ok(Self { lambdas, a })
    }

    fn weight(&self, i: usize, j: usize) -> f64 {
        self.a[(i, j)].norm_sqr()
    }
}

/// `Tr(A²ρ) − Tr(Aρ)²`.
pub fn variance(rho: &DensityMatrix, a: &HermitianOperator) -> Result<f64> {
    check_dims(rho, a)?;
    let a2 = &**a * &**a;
    let mean = trace_product(a, rho);
    Ok((trace_product(&a2, rho) - mean * mean).max(0.0))
}

/// `2 Σ (λ_i − λ_j)² / (λ_i + λ_j) |A_ij|²`, skipping pairs with `λ_i + λ_j ≤ 1e-12`.
pub fn qfi_bc(rho: &DensityMatrix, a: &HermitianOperator) -> Result<f64> {
    let s = Spectral::new(rho, a)?;
    let n = s.lambdas.len();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            let (li, lj) = (s.lambdas[i], s.lambdas[j]);
            let denom = li + lj;
            if denom <= TOLERANCES.qfi_denominator {
                continue;
            }
            total += 2.0 * (li - lj).powi(2) / denom * s.weight(i, j);
        }
    }
    Ok(total)
}

/// Wigner–Yanase skew information `Tr(A²ρ) − Tr(A ρ^{1/2} A ρ^{1/2})`.
pub fn skew_information(rho: &DensityMatrix, a: &HermitianOperator) -> Result<f64> {
    check_dims(rho, a)?;
    let sqrt_rho = psd_sqrt(rho);
    let a2 = &**a * &**a;
    let left = &**a * &sqrt_rho;
    Ok((trace_product(&a2, rho) - trace_product(&left, &left)).max(0.0))
}

/// Generalized variance generated by `mean`; `normalized` divides by `2 m(1,0)`.
pub fn generalized_variance(
    rho: &DensityMatrix,
    a: &HermitianOperator,
    mean: &MeanFunction,
    normalized: bool,
) -> Result<f64> {
    if normalized && mean.at_one_zero() <= 0.0 {
        return Err(Error::DegenerateNormalization {
            mean: mean.name().to_string(),
        });
    }
    let s = Spectral::new(rho, a)?;
    let n = s.lambdas.len();
    let mut quadratic = 0.0;
    let mut first = 0.0;
    for i in 0..n {
        first += s.lambdas[i] * s.a[(i, i)].re;
        for j in 0..n {
            quadratic += mean.eval(s.lambdas[i], s.lambdas[j]) * s.weight(i, j);
        }
    }
    let raw = quadratic - first * first;
    Ok(if normalized {
        raw / (2.0 * mean.at_one_zero())
    } else {
        raw
    })
}

/// Generalized Fisher information generated by `mean`; `normalized` multiplies by
/// `2 m(1,0)`.
///
/// Terms with `λ_i = λ_j` vanish. A term with `λ_i ≠ λ_j` and `m(λ_i, λ_j) = 0` is
/// infinite, so the raw value can be `+∞` for rank-deficient states. When
/// `m(1,0) = 0` the normalized value is defined as zero.
pub fn generalized_qfi(
    rho: &DensityMatrix,
    a: &HermitianOperator,
    mean: &MeanFunction,
    normalized: bool,
) -> Result<f64> {
    let s = Spectral::new(rho, a)?;
    if normalized && mean.at_one_zero() == 0.0 {
        return Ok(0.0);
    }
    let n = s.lambdas.len();
    let mut total = 0.0;
    for i in 0..n {
        for j in 0..n {
            let (li, lj) = (s.lambdas[i], s.lambdas[j]);
            let diff = (li - lj).powi(2);
            let w = s.weight(i, j);
            if diff == 0.0 || w == 0.0 || li + lj <= TOLERANCES.qfi_denominator {
                continue;
            }
            let m = mean.eval(li, lj);
            total += if m > 0.0 { diff / m * w } else { f64::INFINITY };
        }
    }
    Ok(if normalized {
        2.0 * mean.at_one_zero() * total
    } else {
        total
    })
}

/// Variance plus linear entropy: `Tr(A²ρ) − Tr(Aρ)² + 1 − Tr(ρ²)`.
pub fn quadratic_variance(rho: &DensityMatrix, a: &HermitianOperator) -> Result<f64> {
    Ok(variance(rho, a)? + 1.0 - rho.purity())
}

/// Split of the variance of a mixture into its within-subensemble ("quantum") and
/// between-subensemble ("classical") parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceSplit {
    pub quantum_part: f64,
    pub classical_part: f64,
}

impl VarianceSplit {
    pub fn total(&self) -> f64 {
        self.quantum_part + self.classical_part
    }
}

pub fn variance_split(decomp: &PureDecomposition, a: &HermitianOperator) -> Result<VarianceSplit> {
    if decomp.dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: decomp.dim(),
            found: a.dim(),
        });
    }
    let means: Vec<f64> = decomp.states().iter().map(|s| s.expectation(a)).collect();
    let overall: f64 = decomp.weights().iter().zip(&means).map(|(p, m)| p * m).sum();
    let mut split = VarianceSplit {
        quantum_part: 0.0,
        classical_part: 0.0,
    };
    for ((p, s), m) in decomp.weights().iter().zip(decomp.states()).zip(&means) {
        split.quantum_part += p * s.variance(a);
        split.classical_part += p * (m - overall).powi(2);
    }
    Ok(split)
}
