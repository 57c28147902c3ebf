//! Pure-state decompositions that attain the concave roof of the variance (the
//! variance itself) and, for rank-2 states with zero-diagonal observables, the
//! convex roof (`F_Q / 4`).

mod construct;

pub use construct::{
    concave_roof_decomposition, equalizing_phase, lemma2_split, random_decomposition,
    rank2_equal_expectation_split, theorem2_decomposition, RankSplit,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermitian::{max_abs, DensityMatrix, HermitianOperator, StateVector};
use crate::metrology::{qfi_bc, variance};
use crate::tolerance::TOLERANCES;
use crate::{CVector, C64};

/// Weights `p_k` and pure states `|Ψ_k⟩` with `ρ = Σ p_k |Ψ_k⟩⟨Ψ_k|`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureDecomposition {
    weights: Vec<f64>,
    states: Vec<StateVector>,
}

impl PureDecomposition {
    /// Checks positive weights summing to one (within `1e-10`) and a common dimension.
    pub fn new(weights: Vec<f64>, states: Vec<StateVector>) -> Result<Self> {
        if weights.is_empty() || weights.len() != states.len() {
            return Err(Error::InvalidDecomposition(format!(
                "{} weights for {} states",
                weights.len(),
                states.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| **w <= 0.0 || !w.is_finite()) {
            return Err(Error::InvalidDecomposition(format!("weight {w} is not positive")));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > TOLERANCES.trace {
            return Err(Error::InvalidDecomposition(format!("weights sum to {sum}")));
        }
        let dim = states[0].dim();
        if let Some(s) = states.iter().find(|s| s.dim() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: s.dim(),
            });
        }
        Ok(Self { weights, states })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn states(&self) -> &[StateVector] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    /// `Σ p_k |Ψ_k⟩⟨Ψ_k|`.
    pub fn density_matrix(&self) -> DensityMatrix {
        DensityMatrix::from_ensemble_unchecked(&self.weights, &self.states)
    }

    /// Largest entry of `|Σ p_k |Ψ_k⟩⟨Ψ_k| − ρ|`.
    pub fn reassembly_residual(&self, rho: &DensityMatrix) -> Result<f64> {
        if rho.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: rho.dim(),
                found: self.dim(),
            });
        }
        Ok(max_abs(&(&*self.density_matrix() - &**rho)))
    }

    pub fn to_file(&self) -> DecompositionFile {
        DecompositionFile {
            weights: self.weights.clone(),
            states: self
                .states
                .iter()
                .map(|s| s.iter().map(|z| [z.re, z.im]).collect())
                .collect(),
        }
    }

    pub fn from_file(file: &DecompositionFile) -> Result<Self> {
        let states = file
            .states
            .iter()
            .map(|amps| {
                StateVector::new(CVector::from_iterator(
                    amps.len(),
                    amps.iter().map(|[re, im]| C64::new(*re, *im)),
                ))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(file.weights.clone(), states)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_file())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(&serde_json::from_str(text)?)
    }
}

/// On-disk form: `{"weights": [...], "states": [[[re, im], ...], ...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecompositionFile {
    pub weights: Vec<f64>,
    pub states: Vec<Vec<[f64; 2]>>,
}

/// `Σ p_k (ΔA)²_{Ψ_k}`.
pub fn mixture_variance(decomp: &PureDecomposition, a: &HermitianOperator) -> Result<f64> {
    if decomp.dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: decomp.dim(),
            found: a.dim(),
        });
    }
    Ok(decomp
        .weights
        .iter()
        .zip(&decomp.states)
        .map(|(p, s)| p * s.variance(a))
        .sum())
}

/// Checks of a decomposition against a state and an observable.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub terms: usize,
    pub reassembly_residual: f64,
    pub mixture_variance: f64,
    pub variance: f64,
    pub qfi_over_4: f64,
    /// Largest `|⟨Ψ_k|A|Ψ_k⟩ − Tr(Aρ)|`.
    pub expectation_spread: f64,
    /// Reassembly within `1e-9` and `F_Q/4 − 1e-9 ≤ Σ p_k (ΔA)² ≤ (ΔA)² + 1e-9`.
    pub valid: bool,
}

pub fn verify_decomposition(
    decomp: &PureDecomposition,
    rho: &DensityMatrix,
    a: &HermitianOperator,
) -> Result<DecompositionReport> {
    let reassembly_residual = decomp.reassembly_residual(rho)?;
    let mixture_variance = mixture_variance(decomp, a)?;
    let variance = variance(rho, a)?;
    let qfi_over_4 = qfi_bc(rho, a)? / 4.0;
    let mean = rho.expectation(a);
    let expectation_spread = decomp
        .states
        .iter()
        .map(|s| (s.expectation(a) - mean).abs())
        .fold(0.0, f64::max);
    let tol = TOLERANCES.decomposition;
    let valid = reassembly_residual <= tol
        && mixture_variance <= variance + tol
        && mixture_variance >= qfi_over_4 - tol;
    Ok(DecompositionReport {
        terms: decomp.len(),
        reassembly_residual,
        mixture_variance,
        variance,
        qfi_over_4,
        expectation_spread,
        valid,
    })
}
