use std::f64::consts::{FRAC_PI_2, PI};

use nalgebra::{DMatrix, SVD};
use rand::Rng;

use crate::error::{Error, Result};
use crate::experiments::ginibre;
use crate::hermitian::{eigendecompose, DensityMatrix, HermitianOperator, StateVector};
use crate::tolerance::TOLERANCES;
use crate::{CMatrix, CVector, C64};

use super::PureDecomposition;

/// `ρ = Σ w_k v_k v_k†` with orthonormal `v_k` and positive weights: the support of a
/// state in its eigenbasis.
#[derive(Debug, Clone)]
struct Support {
    weights: Vec<f64>,
    vectors: Vec<CVector>,
}

impl Support {
    fn of(rho: &DensityMatrix) -> Self {
        let eig = eigendecompose(rho.as_operator());
        let rank = eig.rank(TOLERANCES.rank);
        let weights = eig.eigenvalues[..rank].to_vec();
        let vectors = eig.eigenvectors[..rank]
            .iter()
            .map(|v| v.amplitudes().clone())
            .collect();
        Self::normalized(weights, vectors)
    }

    /// Drops weights at or below the rank threshold and rescales to unit trace.
    fn normalized(weights: Vec<f64>, vectors: Vec<CVector>) -> Self {
        let largest = weights.iter().copied().fold(0.0, f64::max);
        let (weights, vectors): (Vec<f64>, Vec<CVector>) = weights
            .into_iter()
            .zip(vectors)
            .filter(|(w, _)| *w > TOLERANCES.rank * largest)
            .unzip();
        let total: f64 = weights.iter().sum();
        Self {
            weights: weights.iter().map(|w| w / total).collect(),
            vectors,
        }
    }

    fn rank(&self) -> usize {
        self.weights.len()
    }

    fn density(&self) -> DensityMatrix {
        let dim = self.vectors[0].len();
        let mut m = CMatrix::zeros(dim, dim);
        for (w, v) in self.weights.iter().zip(&self.vectors) {
            m += (v * v.adjoint()).scale(*w);
        }
        DensityMatrix::from_matrix_unchecked(m)
    }
}

/// `φ₁ = π/2 − arg⟨Ψ₁|A|Ψ₂⟩`, which makes `e^{iφ₁}⟨Ψ₁|A|Ψ₂⟩` purely imaginary. Zero when
/// the matrix element vanishes.
pub fn equalizing_phase(psi1: &StateVector, psi2: &StateVector, a: &HermitianOperator) -> f64 {
    phase_for(psi1.matrix_element(a, psi2))
}

fn phase_for(element: C64) -> f64 {
    if element == C64::new(0.0, 0.0) {
        0.0
    } else {
        FRAC_PI_2 - element.arg()
    }
}

/// The two states `√p Ψ₁ + √(1−p) e^{iφ} Ψ₂` for `φ = φ₁, φ₁ + π`.
fn equal_expectation_pair(p: f64, psi1: &CVector, psi2: &CVector, a: &CMatrix) -> [StateVector; 2] {
    let element = psi1.dotc(&(a * psi2));
    let phi = phase_for(element);
    let make = |phi: f64| {
        let v = psi1.scale(p.sqrt()) + psi2 * C64::from_polar((1.0 - p).sqrt(), phi);
        StateVector::normalized(v).expect("orthonormal combination is non-zero")
    };
    [make(phi), make(phi + PI)]
}

/// Splits a rank-2 state into two equally weighted pure states whose expectations of
/// `A` both equal `Tr(Aρ)`.
pub fn rank2_equal_expectation_split(
    rho: &DensityMatrix,
    a: &HermitianOperator,
) -> Result<PureDecomposition> {
    check_dims(rho, a)?;
    let support = Support::of(rho);
    if support.rank() != 2 {
        return Err(Error::Rank {
            expected: "exactly 2",
            found: support.rank(),
        });
    }
    let states = equal_expectation_pair(
        support.weights[0],
        &support.vectors[0],
        &support.vectors[1],
        a,
    );
    PureDecomposition::new(vec![0.5, 0.5], states.to_vec())
}

/// `ρ₀ = p ρ₋ + (1 − p) ρ₊` with both parts of lower rank and the same expectation of `A`.
#[derive(Debug, Clone)]
pub struct RankSplit {
    pub p: f64,
    pub rho_minus: DensityMatrix,
    pub rho_plus: DensityMatrix,
}

fn check_dims(rho: &DensityMatrix, a: &HermitianOperator) -> Result<()> {
    if rho.dim() != a.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            found: a.dim(),
        });
    }
    Ok(())
}

/// Null-space direction of `[a; 1]`: a unit `Δλ` with `Σ Δλ_k = 0` and `Σ a_k Δλ_k = 0`.
///
/// `M = [a; 1]` has at most two non-zero singular values, so for three or more entries
/// its third right singular vector is always a null vector. The sign is fixed so that
/// the first non-negligible component is positive.
fn null_direction(a: &[f64]) -> Vec<f64> {
    let r = a.len();
    debug_assert!(r >= 3);
    // Zero rows pad M to a square matrix so the SVD returns all r right singular vectors.
    let m = DMatrix::from_fn(r, r, |i, j| match i {
        0 => a[j],
        1 => 1.0,
        _ => 0.0,
    });
    let svd = SVD::new(m, false, true);
    let v_t = svd.v_t.expect("requested");
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&x, &y| svd.singular_values[y].total_cmp(&svd.singular_values[x]));
    let mut dl: Vec<f64> = v_t.row(order[2]).iter().copied().collect();
    let norm = dl.iter().map(|x| x * x).sum::<f64>().sqrt();
    let sign = dl
        .iter()
        .find(|x| x.abs() > 1e-12)
        .map_or(1.0, |x| x.signum());
    for x in &mut dl {
        *x *= sign / norm;
    }
    dl
}

/// `λ + cΔλ` with the limiting index set exactly to zero.
fn shifted(lambda: &[f64], dl: &[f64], c: f64, limiting: usize) -> Vec<f64> {
    let mut out: Vec<f64> = lambda.iter().zip(dl).map(|(l, d)| l + c * d).collect();
    out[limiting] = 0.0;
    out
}

/// One rank-reduction step on a support of rank ≥ 3.
fn split_support(support: &Support, a: &CMatrix) -> (f64, Support, Support) {
    let diag: Vec<f64> = support
        .vectors
        .iter()
        .map(|v| v.dotc(&(a * v)).re)
        .collect();
    let dl = null_direction(&diag);
    let lambda = &support.weights;

    // c₊ = min_k λ_k / Θ(−Δλ_k) and c₋ = −min_k λ_k / Θ(Δλ_k); x/0 counts as +∞.
    let (mut c_plus, mut k_plus) = (f64::INFINITY, usize::MAX);
    let (mut c_minus, mut k_minus) = (f64::INFINITY, usize::MAX);
    for (k, (&l, &d)) in lambda.iter().zip(&dl).enumerate() {
        if d < 0.0 && l / -d < c_plus {
            c_plus = l / -d;
            k_plus = k;
        }
        if d > 0.0 && l / d < c_minus {
            c_minus = l / d;
            k_minus = k;
        }
    }
    assert!(
        c_plus.is_finite() && c_minus.is_finite(),
        "null direction must have components of both signs"
    );
    let c_minus = -c_minus;
    let p = c_plus / (c_plus - c_minus);
    let minus = Support::normalized(
        shifted(lambda, &dl, c_minus, k_minus),
        support.vectors.clone(),
    );
    let plus = Support::normalized(
        shifted(lambda, &dl, c_plus, k_plus),
        support.vectors.clone(),
    );
    (p, minus, plus)
}

/// Splits a state of rank ≥ 3 into two lower-rank states with the same expectation of `A`.
pub fn lemma2_split(rho: &DensityMatrix, a: &HermitianOperator) -> Result<RankSplit> {
    check_dims(rho, a)?;
    let support = Support::of(rho);
    if support.rank() < 3 {
        return Err(Error::Rank {
            expected: "at least 3",
            found: support.rank(),
        });
    }
    let (p, minus, plus) = split_support(&support, a);
    Ok(RankSplit {
        p,
        rho_minus: minus.density(),
        rho_plus: plus.density(),
    })
}

fn collect_leaves(
    support: &Support,
    weight: f64,
    a: &CMatrix,
    weights: &mut Vec<f64>,
    states: &mut Vec<StateVector>,
) {
    match support.rank() {
        1 => {
            weights.push(weight);
            states.push(
                StateVector::normalized(support.vectors[0].clone()).expect("unit eigenvector"),
            );
        }
        2 => {
            let pair = equal_expectation_pair(
                support.weights[0],
                &support.vectors[0],
                &support.vectors[1],
                a,
            );
            for s in pair {
                weights.push(0.5 * weight);
                states.push(s);
            }
        }
        _ => {
            let (p, minus, plus) = split_support(support, a);
            collect_leaves(&minus, weight * p, a, weights, states);
            collect_leaves(&plus, weight * (1.0 - p), a, weights, states);
        }
    }
}

/// Decomposition whose states all have expectation `Tr(Aρ)`, so that the average of
/// their variances equals the variance of `ρ`.
///
/// Rank-≥3 parts are split recursively (minus branch first); rank-2 parts become two
/// equally weighted states; pure parts are kept.
pub fn concave_roof_decomposition(
    rho: &DensityMatrix,
    a: &HermitianOperator,
) -> Result<PureDecomposition> {
    check_dims(rho, a)?;
    let support = Support::of(rho);
    let mut weights = Vec::new();
    let mut states = Vec::new();
    collect_leaves(&support, 1.0, a, &mut weights, &mut states);
    let total: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= total;
    }
    PureDecomposition::new(weights, states)
}

/// Two equally weighted states `√q φ₁ ± √(1−q) φ₂` built from the eigenvectors of a
/// rank-2 state, with the phase of `φ₂` chosen so that `⟨φ₁|A|φ₂⟩ ≥ 0`.
///
/// Requires `⟨φ₁|A|φ₁⟩ = ⟨φ₂|A|φ₂⟩ = 0`; then four times the average variance of the two
/// states equals the quantum Fisher information.
pub fn theorem2_decomposition(
    rho: &DensityMatrix,
    a: &HermitianOperator,
) -> Result<PureDecomposition> {
    check_dims(rho, a)?;
    let support = Support::of(rho);
    if support.rank() != 2 {
        return Err(Error::Rank {
            expected: "exactly 2",
            found: support.rank(),
        });
    }
    let (phi1, phi2) = (&support.vectors[0], &support.vectors[1]);
    for v in [phi1, phi2] {
        let value = v.dotc(&(&**a * v)).re;
        if value.abs() > TOLERANCES.zero_diagonal {
            return Err(Error::NonZeroDiagonal { value });
        }
    }
    let element = phi1.dotc(&(&**a * phi2));
    let phi2 = if element.norm() > 0.0 {
        phi2 * C64::from_polar(1.0, -element.arg())
    } else {
        phi2.clone()
    };
    let q = support.weights[0];
    let (u, w) = (phi1.scale(q.sqrt()), phi2.scale((1.0 - q).sqrt()));
    let states = [&u + &w, &u - &w]
        .into_iter()
        .map(|v| StateVector::normalized(v).expect("orthonormal combination is non-zero"))
        .collect();
    PureDecomposition::new(vec![0.5, 0.5], states)
}

/// Random `count`-term decomposition `ψ̃_j = W U_j`, where `W = [√λ_k v_k]` and `U` is a
/// Haar-random `rank × count` co-isometry (`UU† = I`).
pub fn random_decomposition<R: Rng + ?Sized>(
    rho: &DensityMatrix,
    count: usize,
    rng: &mut R,
) -> Result<PureDecomposition> {
    let support = Support::of(rho);
    let rank = support.rank();
    if count < rank {
        return Err(Error::TooFewTerms { rank, count });
    }
    let dim = rho.dim();
    let w = CMatrix::from_fn(dim, rank, |i, k| {
        support.vectors[k][i] * support.weights[k].sqrt()
    });

    // QR of a Ginibre matrix, with the phases of R moved into Q, is Haar distributed.
    let qr = ginibre(count, rank, rng).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for k in 0..rank {
        let diag = r[(k, k)];
        if diag.norm() > 0.0 {
            let phase = diag / diag.norm();
            for z in q.column_mut(k).iter_mut() {
                *z *= phase;
            }
        }
    }
    let u = q.adjoint();
    let mut weights = Vec::with_capacity(count);
    let mut states = Vec::with_capacity(count);
    for j in 0..count {
        let psi = &w * u.column(j);
        let p = psi.norm_squared();
        if p > 0.0 {
            weights.push(p);
            states.push(StateVector::normalized(psi)?);
        }
    }
    let total: f64 = weights.iter().sum();
    for p in &mut weights {
        *p /= total;
    }
    PureDecomposition::new(weights, states)
}
