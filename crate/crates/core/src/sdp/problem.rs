use std::sync::Arc;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{CMatrix, C64};

/// Sparse complex matrix stored as `(row, col, value)` triplets, grouped by row and by
/// column for the rank-one products in the Schur complement.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseMatrix {
    dim: usize,
    entries: Vec<(usize, usize, C64)>,
    by_row: Vec<(usize, Vec<(usize, C64)>)>,
    by_col: Vec<(usize, Vec<(usize, C64)>)>,
}

impl SparseMatrix {
    pub fn new(dim: usize, mut entries: Vec<(usize, usize, C64)>) -> Result<Self> {
        if let Some(&(r, c, _)) = entries.iter().find(|(r, c, _)| *r >= dim || *c >= dim) {
            return Err(Error::MalformedProblem(format!(
                "entry ({r}, {c}) outside a {dim}x{dim} matrix"
            )));
        }
        entries.retain(|(_, _, v)| *v != C64::new(0.0, 0.0));
        entries.sort_by_key(|&(r, c, _)| (r, c));
        entries.dedup_by(|later, earlier| {
            if later.0 == earlier.0 && later.1 == earlier.1 {
                earlier.2 += later.2;
                true
            } else {
                false
            }
        });
        let group = |key: fn(&(usize, usize, C64)) -> (usize, usize)| {
            let mut sorted: Vec<(usize, usize, C64)> = entries.clone();
            sorted.sort_by_key(&key);
            let mut out: Vec<(usize, Vec<(usize, C64)>)> = Vec::new();
            for e in sorted {
                let (outer, inner) = key(&e);
                match out.last_mut() {
                    Some((k, list)) if *k == outer => list.push((inner, e.2)),
                    _ => out.push((outer, vec![(inner, e.2)])),
                }
            }
            out
        };
        let by_row = group(|e| (e.0, e.1));
        let by_col = group(|e| (e.1, e.0));
        Ok(Self {
            dim,
            entries,
            by_row,
            by_col,
        })
    }

    /// Non-zero entries of a dense matrix.
    pub fn from_dense(m: &CMatrix) -> Self {
        let mut entries = Vec::new();
        for c in 0..m.ncols() {
            for r in 0..m.nrows() {
                if m[(r, c)] != C64::new(0.0, 0.0) {
                    entries.push((r, c, m[(r, c)]));
                }
            }
        }
        Self::new(m.nrows(), entries).expect("indices in range")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[(usize, usize, C64)] {
        &self.entries
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for &(r, c, v) in &self.entries {
            m[(r, c)] += v;
        }
        m
    }

    /// `tr(G Y)`.
    pub(crate) fn trace_with(&self, y: &CMatrix) -> C64 {
        self.entries.iter().map(|&(r, c, v)| v * y[(c, r)]).sum()
    }

    /// `tr(G† Y)`.
    pub(crate) fn adjoint_trace_with(&self, y: &CMatrix) -> C64 {
        self.entries.iter().map(|&(r, c, v)| v.conj() * y[(r, c)]).sum()
    }

    /// `L G R` for dense `L`, `R`, as a sum of rank-one terms over the rows of `G`.
    pub(crate) fn sandwich(&self, left: &CMatrix, right: &CMatrix) -> CMatrix {
        let n = self.dim;
        let mut out = CMatrix::zeros(n, n);
        let mut row = vec![C64::new(0.0, 0.0); n];
        for (p, list) in &self.by_row {
            row.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
            for &(q, v) in list {
                for (r, z) in row.iter_mut().enumerate() {
                    *z += v * right[(q, r)];
                }
            }
            add_outer(&mut out, left, *p, &row);
        }
        out
    }

    /// `L G† R`, grouped by the columns of `G`.
    pub(crate) fn adjoint_sandwich(&self, left: &CMatrix, right: &CMatrix) -> CMatrix {
        let n = self.dim;
        let mut out = CMatrix::zeros(n, n);
        let mut row = vec![C64::new(0.0, 0.0); n];
        for (q, list) in &self.by_col {
            row.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
            for &(p, v) in list {
                let v = v.conj();
                for (r, z) in row.iter_mut().enumerate() {
                    *z += v * right[(p, r)];
                }
            }
            add_outer(&mut out, left, *q, &row);
        }
        out
    }
}

/// `out += left[:, col] ⊗ row`.
fn add_outer(out: &mut CMatrix, left: &CMatrix, col: usize, row: &[C64]) {
    let column = left.column(col);
    for (r, &x) in row.iter().enumerate() {
        if x == C64::new(0.0, 0.0) {
            continue;
        }
        for (o, &l) in out.column_mut(r).iter_mut().zip(column.iter()) {
            *o += l * x;
        }
    }
}

/// `F_i = c_i G + conj(c_i) G†` for a generator `G` of the block.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Image {
    pub generator: usize,
    pub coefficient: C64,
}

/// A Hermitian PSD constraint `Σ_i y_i F_i ⪰ 0` on an `n × n` block.
#[derive(Debug, Clone, PartialEq)]
pub struct PsdBlock {
    name: String,
    dim: usize,
    generators: Vec<SparseMatrix>,
    images: Vec<Image>,
    /// Image indices grouped by generator.
    users: Vec<Vec<usize>>,
}

impl PsdBlock {
    pub fn new(
        name: impl Into<String>,
        dim: usize,
        generators: Vec<SparseMatrix>,
        images: Vec<Image>,
    ) -> Result<Self> {
        if let Some(g) = generators.iter().find(|g| g.dim() != dim) {
            return Err(Error::MalformedProblem(format!(
                "generator of size {} in a block of size {dim}",
                g.dim()
            )));
        }
        let mut users = vec![Vec::new(); generators.len()];
        for (i, im) in images.iter().enumerate() {
            users
                .get_mut(im.generator)
                .ok_or_else(|| {
                    Error::MalformedProblem(format!("image {i} uses missing generator {}", im.generator))
                })?
                .push(i);
        }
        Ok(Self {
            name: name.into(),
            dim,
            generators,
            images,
            users,
        })
    }

    /// The block `X` itself, in the coordinates of [`super::params`].
    pub fn hermitian_variable(name: impl Into<String>, dim: usize) -> Self {
        let mut generators = Vec::new();
        let mut images = Vec::new();
        let one = C64::new(1.0, 0.0);
        for a in 0..dim {
            generators.push(SparseMatrix::new(dim, vec![(a, a, one)]).expect("in range"));
            images.push(Image {
                generator: a,
                coefficient: C64::new(0.5, 0.0),
            });
        }
        for a in 0..dim {
            for b in a + 1..dim {
                let g = generators.len();
                generators.push(SparseMatrix::new(dim, vec![(a, b, one)]).expect("in range"));
                images.push(Image {
                    generator: g,
                    coefficient: one,
                });
                images.push(Image {
                    generator: g,
                    coefficient: C64::new(0.0, 1.0),
                });
            }
        }
        Self::new(name, dim, generators, images).expect("consistent by construction")
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[SparseMatrix] {
        &self.generators
    }

    pub fn images(&self) -> &[Image] {
        &self.images
    }

    pub(crate) fn users(&self) -> &[Vec<usize>] {
        &self.users
    }

    /// `F_i` as a dense matrix.
    pub fn image_dense(&self, i: usize) -> CMatrix {
        let im = self.images[i];
        let g = self.generators[im.generator].to_dense();
        &g * im.coefficient + g.adjoint() * im.coefficient.conj()
    }

    /// `Σ_i y_i F_i`.
    pub fn evaluate(&self, y: &[f64]) -> CMatrix {
        let mut m = CMatrix::zeros(self.dim, self.dim);
        for (im, &yi) in self.images.iter().zip(y) {
            if yi == 0.0 {
                continue;
            }
            let c = im.coefficient * yi;
            for &(r, col, v) in self.generators[im.generator].entries() {
                m[(r, col)] += c * v;
                m[(col, r)] += (c * v).conj();
            }
        }
        m
    }

    /// `(Re tr(F_i X))_i`.
    pub fn adjoint(&self, x: &CMatrix) -> Vec<f64> {
        let traces: Vec<(C64, C64)> = self
            .generators
            .iter()
            .map(|g| (g.trace_with(x), g.adjoint_trace_with(x)))
            .collect();
        self.images
            .iter()
            .map(|im| {
                let (t, ta) = traces[im.generator];
                (im.coefficient * t + im.coefficient.conj() * ta).re
            })
            .collect()
    }
}

/// `min cᵀy` subject to `Σ_i y_i F_i^{(j)} ⪰ 0` for every block `j` and `E y = f`.
///
/// The variables are real coordinates of whatever the program is about; blocks and
/// the equality matrix are shared between instances that differ only in `c` and `f`.
#[derive(Debug, Clone)]
pub struct ConicProblem {
    num_vars: usize,
    objective: Vec<f64>,
    blocks: Arc<Vec<PsdBlock>>,
    equalities: Arc<DMatrix<f64>>,
    rhs: Vec<f64>,
}

impl ConicProblem {
    pub fn new(
        objective: Vec<f64>,
        blocks: Arc<Vec<PsdBlock>>,
        equalities: Arc<DMatrix<f64>>,
        rhs: Vec<f64>,
    ) -> Result<Self> {
        let num_vars = objective.len();
        if let Some(b) = blocks.iter().find(|b| b.images().len() != num_vars) {
            return Err(Error::MalformedProblem(format!(
                "block {} has {} images for {num_vars} variables",
                b.name(),
                b.images().len()
            )));
        }
        if equalities.ncols() != num_vars || equalities.nrows() != rhs.len() {
            return Err(Error::MalformedProblem(format!(
                "equality matrix {}x{} with {} right-hand sides and {num_vars} variables",
                equalities.nrows(),
                equalities.ncols(),
                rhs.len()
            )));
        }
        if objective.iter().chain(&rhs).any(|x| !x.is_finite()) {
            return Err(Error::MalformedProblem("non-finite data".into()));
        }
        Ok(Self {
            num_vars,
            objective,
            blocks,
            equalities,
            rhs,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn blocks(&self) -> &[PsdBlock] {
        &self.blocks
    }

    pub fn equalities(&self) -> &DMatrix<f64> {
        &self.equalities
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.dim()).collect()
    }

    pub fn objective_value(&self, y: &[f64]) -> f64 {
        self.objective.iter().zip(y).map(|(c, y)| c * y).sum()
    }

    pub fn evaluate_blocks(&self, y: &[f64]) -> Vec<CMatrix> {
        self.blocks.iter().map(|b| b.evaluate(y)).collect()
    }

    /// `f − E y`.
    pub fn equality_residual(&self, y: &[f64]) -> Vec<f64> {
        let ey = &*self.equalities * nalgebra::DVector::from_column_slice(y);
        self.rhs.iter().zip(ey.iter()).map(|(f, e)| f - e).collect()
    }

    /// `c − Σ_j 𝒜_j(X_j) − Eᵀw`.
    pub fn dual_residual(&self, dual_blocks: &[CMatrix], w: &[f64]) -> Vec<f64> {
        let mut r = self.objective.clone();
        for (b, x) in self.blocks.iter().zip(dual_blocks) {
            for (ri, a) in r.iter_mut().zip(b.adjoint(x)) {
                *ri -= a;
            }
        }
        let etw = self.equalities.transpose() * nalgebra::DVector::from_column_slice(w);
        for (ri, e) in r.iter_mut().zip(etw.iter()) {
            *ri -= e;
        }
        r
    }

    /// Self-describing form for cross-checking with external solvers.
    pub fn dump(&self) -> ProblemDump {
        ProblemDump {
            description: "minimize c.y subject to sum_i y_i F_i >= 0 (Hermitian PSD) for every \
                          block and E y = f; F_i = c_i G + conj(c_i) G^dagger"
                .into(),
            num_vars: self.num_vars,
            objective: self.objective.clone(),
            blocks: self
                .blocks
                .iter()
                .map(|b| BlockDump {
                    name: b.name().to_string(),
                    dim: b.dim(),
                    generators: b
                        .generators()
                        .iter()
                        .map(|g| g.entries().iter().map(|&(r, c, v)| (r, c, v.re, v.im)).collect())
                        .collect(),
                    images: b
                        .images()
                        .iter()
                        .map(|im| (im.generator, im.coefficient.re, im.coefficient.im))
                        .collect(),
                })
                .collect(),
            equality_matrix: self
                .equalities
                .row_iter()
                .map(|row| row.iter().copied().collect())
                .collect(),
            rhs: self.rhs.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemDump {
    pub description: String,
    pub num_vars: usize,
    pub objective: Vec<f64>,
    pub blocks: Vec<BlockDump>,
    pub equality_matrix: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockDump {
    pub name: String,
    pub dim: usize,
    /// `(row, col, re, im)` entries of each generator.
    pub generators: Vec<Vec<(usize, usize, f64, f64)>>,
    /// `(generator, re c, im c)` for each variable.
    pub images: Vec<(usize, f64, f64)>,
}
