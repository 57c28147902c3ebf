//! The two relaxations of the convex roof over symmetric separable states: PPT states
//! on the symmetric subspace of two qudits, and PPT symmetric extensions to `N` qudits.
//!
//! Both are instances of one template. The variable is the Hermitian matrix `ρ_s` on the
//! symmetric subspace of `N` qudits (coordinates from [`super::params`]), lifted to
//! `ρ₀ = S ρ_s S†`. Constraints: `ρ_s ⪰ 0`; `ρ₀^{T_{1..M}} ⪰ 0` for `M = 1..⌊N/2⌋`;
//! `Tr_{2..N} ρ₀ = ρ` (which fixes the trace). Objective: `2 Tr(C ρ₁₂)` with
//! `C = (A⊗1 − 1⊗A)²` and `ρ₁₂ = Tr_{3..N} ρ₀`.
//!
//! `ρ₀` is invariant under permutations of the first `M` and of the last `N − M`
//! parties, and so is its partial transpose on the first `M`; each PT block is therefore
//! compressed to `Sym^M ⊗ Sym^{N−M}` without changing the constraint.

use std::collections::BTreeMap;
use std::sync::Arc;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::hermitian::{
    eigendecompose, tensor, trace_product, DensityMatrix, HermitianOperator, MultipartiteLayout,
    SymmetricSubspace,
};
use crate::tolerance::TOLERANCES;
use crate::{CMatrix, CVector, C64};

use super::params::{basis, hermitian_from_params};
use super::problem::{ConicProblem, Image, PsdBlock, SparseMatrix};
use super::solver::{ConicSolver, InteriorPoint, SdpSolution};

/// Largest `d^N` accepted by the builders.
pub const SIZE_LIMIT: usize = 256;

/// `(A⊗1 − 1⊗A)²`.
pub fn cost_operator(a: &HermitianOperator) -> HermitianOperator {
    let id = CMatrix::identity(a.dim(), a.dim());
    let diff = tensor(a, &id).into_matrix() - tensor(&id, a).into_matrix();
    HermitianOperator::hermitize(&diff * &diff).expect("square")
}

/// Nonzero amplitudes of each symmetric basis vector, and for every computational
/// basis index the basis vector it belongs to with its amplitude.
struct Orbits {
    columns: Vec<Vec<(usize, f64)>>,
    rows: Vec<(usize, f64)>,
}

impl Orbits {
    fn new(sym: &SymmetricSubspace) -> Self {
        let iso = sym.isometry();
        let mut columns = vec![Vec::new(); iso.ncols()];
        let mut rows = vec![(0, 0.0); iso.nrows()];
        for c in 0..iso.ncols() {
            for r in 0..iso.nrows() {
                let v = iso[(r, c)];
                if v != 0.0 {
                    columns[c].push((r, v));
                    rows[r] = (c, v);
                }
            }
        }
        Self { columns, rows }
    }
}

/// Problem data shared by every `(ρ, A)` for a given `(N, d)`.
#[derive(Debug, Clone)]
pub struct ExtensionTemplate {
    layout: MultipartiteLayout,
    symmetric_dim: usize,
    blocks: Arc<Vec<PsdBlock>>,
    equalities: Arc<DMatrix<f64>>,
    /// Two-party marginal of each coordinate basis element, lifted to `N` parties.
    pair_marginals: Vec<CMatrix>,
}

fn image_structure(dim: usize) -> Vec<(usize, usize, C64)> {
    // (a, b, coefficient) in coordinate order; generator (a, b) is E_ab.
    let mut out: Vec<(usize, usize, C64)> = (0..dim).map(|a| (a, a, C64::new(0.5, 0.0))).collect();
    for a in 0..dim {
        for b in a + 1..dim {
            out.push((a, b, C64::new(1.0, 0.0)));
            out.push((a, b, C64::new(0.0, 1.0)));
        }
    }
    out
}

impl ExtensionTemplate {
    /// Template for `N ≥ 2` parties of dimension `d ≥ 1`, subject to `d^N ≤ 256`.
    pub fn new(parties: usize, local_dim: usize) -> Result<Self> {
        if parties < 2 {
            return Err(Error::ExtensionSize(parties));
        }
        if local_dim == 0 {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        let size = local_dim
            .checked_pow(parties as u32)
            .filter(|&s| s <= SIZE_LIMIT)
            .ok_or(Error::SizeGuard {
                size: local_dim.saturating_pow(parties as u32),
                limit: SIZE_LIMIT,
            })?;
        let layout = MultipartiteLayout::new(parties, local_dim);
        let sym = SymmetricSubspace::new(layout);
        let orbits = Orbits::new(&sym);
        let dim = sym.dim();
        let structure = image_structure(dim);
        let generator_pairs: Vec<(usize, usize)> = structure
            .iter()
            .filter(|(_, _, c)| c.im == 0.0)
            .map(|&(a, b, _)| (a, b))
            .collect();
        let generator_index = |a: usize, b: usize| -> usize {
            if a == b {
                a
            } else {
                generator_pairs
                    .iter()
                    .position(|&p| p == (a, b))
                    .expect("pair present")
            }
        };
        let images: Vec<Image> = structure
            .iter()
            .map(|&(a, b, c)| Image {
                generator: generator_index(a, b),
                coefficient: c,
            })
            .collect();

        let mut blocks = vec![PsdBlock::hermitian_variable("symmetric", dim)];
        for m in 1..=parties / 2 {
            blocks.push(Self::transpose_block(layout, &orbits, m, &generator_pairs, &images)?);
        }

        // Two-party marginals of s_a s_bᵀ.
        let d = local_dim;
        let rest = size / (d * d);
        let pair_of = |(a, b): (usize, usize)| {
            let mut m = CMatrix::zeros(d * d, d * d);
            for &(x, va) in &orbits.columns[a] {
                for &(x2, vb) in &orbits.columns[b] {
                    if x % rest == x2 % rest {
                        m[(x / rest, x2 / rest)] += C64::new(va * vb, 0.0);
                    }
                }
            }
            m
        };
        let generator_marginals: Vec<CMatrix> = generator_pairs.iter().map(|&p| pair_of(p)).collect();
        let pair_marginals: Vec<CMatrix> = images
            .iter()
            .map(|im| {
                let g = &generator_marginals[im.generator];
                g * im.coefficient + g.adjoint() * im.coefficient.conj()
            })
            .collect();

        let one_party = MultipartiteLayout::new(2, d);
        let local_basis = basis(d);
        let mut equalities = DMatrix::zeros(local_basis.len(), images.len());
        for (i, m12) in pair_marginals.iter().enumerate() {
            let m1 = crate::hermitian::partial_trace(m12, one_party, &[1])?;
            for (k, g) in local_basis.iter().enumerate() {
                equalities[(k, i)] = trace_product(&g.matrix(d), &m1);
            }
        }

        Ok(Self {
            layout,
            symmetric_dim: dim,
            blocks: Arc::new(blocks),
            equalities: Arc::new(equalities),
            pair_marginals,
        })
    }

    /// `V† (S E_ab S†)^{T_{1..M}} V` with `V = S_M ⊗ S_{N−M}`, for each generator pair.
    fn transpose_block(
        layout: MultipartiteLayout,
        orbits: &Orbits,
        m: usize,
        generator_pairs: &[(usize, usize)],
        images: &[Image],
    ) -> Result<PsdBlock> {
        let d = layout.local_dim;
        let n = layout.parties;
        let left = SymmetricSubspace::new(MultipartiteLayout::new(m, d));
        let right = SymmetricSubspace::new(MultipartiteLayout::new(n - m, d));
        let (left_orbits, right_orbits) = (Orbits::new(&left), Orbits::new(&right));
        let right_size = d.pow((n - m) as u32);
        let right_dim = right.dim();
        let compressed = |u: usize, v: usize| -> (usize, f64) {
            let (cu, au) = left_orbits.rows[u];
            let (cv, av) = right_orbits.rows[v];
            (cu * right_dim + cv, au * av)
        };
        let block_dim = left.dim() * right_dim;
        let mut generators = Vec::with_capacity(generator_pairs.len());
        for &(a, b) in generator_pairs {
            let mut acc: BTreeMap<(usize, usize), f64> = BTreeMap::new();
            for &(x, va) in &orbits.columns[a] {
                let (u, v) = (x / right_size, x % right_size);
                for &(x2, vb) in &orbits.columns[b] {
                    let (u2, v2) = (x2 / right_size, x2 % right_size);
                    // (x, x2) moves to ((u2, v), (u, v2)) under the partial transpose.
                    let (row, ar) = compressed(u2, v);
                    let (col, ac) = compressed(u, v2);
                    *acc.entry((row, col)).or_insert(0.0) += va * vb * ar * ac;
                }
            }
            let entries = acc
                .into_iter()
                .filter(|(_, v)| v.abs() > 1e-15)
                .map(|((r, c), v)| (r, c, C64::new(v, 0.0)))
                .collect();
            generators.push(SparseMatrix::new(block_dim, entries)?);
        }
        PsdBlock::new(format!("pt{m}"), block_dim, generators, images.to_vec())
    }

    pub fn layout(&self) -> MultipartiteLayout {
        self.layout
    }

    pub fn symmetric_dim(&self) -> usize {
        self.symmetric_dim
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.dim()).collect()
    }

    /// Objective and right-hand side for a particular state and observable.
    pub fn instantiate(&self, rho: &DensityMatrix, a: &HermitianOperator) -> Result<ConicProblem> {
        let d = self.layout.local_dim;
        for found in [rho.dim(), a.dim()] {
            if found != d {
                return Err(Error::DimensionMismatch { expected: d, found });
            }
        }
        self.instantiate_raw(rho, &cost_operator(a))
    }

    fn instantiate_raw(&self, rho: &CMatrix, cost: &CMatrix) -> Result<ConicProblem> {
        let d = self.layout.local_dim;
        let objective = self
            .pair_marginals
            .iter()
            .map(|m| 2.0 * trace_product(cost, m))
            .collect();
        let rhs = basis(d)
            .iter()
            .map(|g| trace_product(&g.matrix(d), rho))
            .collect();
        ConicProblem::new(objective, self.blocks.clone(), self.equalities.clone(), rhs)
    }
}

/// PPT symmetric two-qudit program.
pub fn build_sppt_problem(rho: &DensityMatrix, a: &HermitianOperator) -> Result<ConicProblem> {
    ExtensionTemplate::new(2, rho.dim())?.instantiate(rho, a)
}

/// PPT symmetric extension to `N ≥ 3` qudits.
pub fn build_se_problem(
    rho: &DensityMatrix,
    a: &HermitianOperator,
    parties: usize,
) -> Result<ConicProblem> {
    if parties < 3 {
        return Err(Error::ExtensionSize(parties));
    }
    ExtensionTemplate::new(parties, rho.dim())?.instantiate(rho, a)
}

/// A lower bound on four times the convex roof of the variance, with its certificate.
///
/// When `ρ` is rank-deficient every feasible `ρ₀` lives on `(supp ρ)^{⊗N}`, and the
/// program is solved there instead: `support` holds the `d × r` isometry onto the
/// range of `ρ`, and `witness` refers to the compressed program in dimension `r`.
#[derive(Debug, Clone)]
pub struct BoundResult {
    pub value: f64,
    pub extension_size: usize,
    pub local_dim: usize,
    pub support: Option<CMatrix>,
    pub witness: SdpSolution,
}

impl BoundResult {
    /// `ρ_s`, the optimal state on the symmetric subspace of `N` qudits of dimension
    /// `local_dim`.
    pub fn symmetric_state(&self) -> CMatrix {
        let n = self.extension_size;
        let solved_dim = self.support.as_ref().map_or(self.local_dim, |v| v.ncols());
        let reduced = SymmetricSubspace::new(MultipartiteLayout::new(n, solved_dim));
        let rho_s = hermitian_from_params(reduced.dim(), &self.witness.y);
        let Some(v) = &self.support else {
            return rho_s;
        };
        let mut vn = v.clone();
        for _ in 1..n {
            vn = vn.kronecker(v);
        }
        let full = SymmetricSubspace::new(MultipartiteLayout::new(n, self.local_dim));
        full.compress(&(&vn * reduced.lift(&rho_s) * vn.adjoint()))
    }

    /// `W = Σ_k w_k G_k`, the multiplier of `Tr_{2..N} ρ₀ = ρ`; the dual objective is
    /// `Tr(Wρ)`. Embedded with `support` when the program was compressed.
    pub fn dual_observable(&self) -> CMatrix {
        match &self.support {
            None => hermitian_from_params(self.local_dim, &self.witness.multipliers),
            Some(v) => v * hermitian_from_params(v.ncols(), &self.witness.multipliers) * v.adjoint(),
        }
    }
}

/// Isometry onto the range of `ρ` if `ρ` is rank-deficient.
fn deficient_support(rho: &DensityMatrix) -> Option<CMatrix> {
    let eig = eigendecompose(rho.as_operator());
    let rank = eig.rank(TOLERANCES.rank);
    (rank < rho.dim()).then(|| {
        let columns: Vec<CVector> = eig.eigenvectors[..rank].iter().map(|s| s.amplitudes().clone()).collect();
        CMatrix::from_columns(&columns)
    })
}

/// Solves a template instance with a given solver; rank-deficient states are solved on
/// their support (see [`BoundResult`]).
pub fn bound_with(
    solver: &dyn ConicSolver,
    template: &ExtensionTemplate,
    rho: &DensityMatrix,
    a: &HermitianOperator,
    tolerance: f64,
) -> Result<BoundResult> {
    let problem = template.instantiate(rho, a)?;
    let parties = template.layout().parties;
    let support = deficient_support(rho);
    let witness = match &support {
        None => solver.solve(&problem, tolerance)?,
        Some(v) => {
            let reduced = ExtensionTemplate::new(parties, v.ncols())?;
            let rho_r = v.adjoint() * &**rho * v;
            let vv = v.kronecker(v);
            let cost = vv.adjoint() * cost_operator(a).into_matrix() * &vv;
            solver.solve(&reduced.instantiate_raw(&rho_r, &cost)?, tolerance)?
        }
    };
    Ok(BoundResult {
        value: witness.objective,
        extension_size: parties,
        local_dim: template.layout().local_dim,
        support,
        witness,
    })
}

pub fn bound_sppt(rho: &DensityMatrix, a: &HermitianOperator, tolerance: f64) -> Result<BoundResult> {
    let template = ExtensionTemplate::new(2, rho.dim())?;
    bound_with(&InteriorPoint::default(), &template, rho, a, tolerance)
}

pub fn bound_se(
    rho: &DensityMatrix,
    a: &HermitianOperator,
    parties: usize,
    tolerance: f64,
) -> Result<BoundResult> {
    if parties < 3 {
        return Err(Error::ExtensionSize(parties));
    }
    let template = ExtensionTemplate::new(parties, rho.dim())?;
    bound_with(&InteriorPoint::default(), &template, rho, a, tolerance)
}
