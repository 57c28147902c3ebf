use nalgebra::{Cholesky, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hermitian::{hermitian_part, max_abs, trace_product};
use crate::{CMatrix, C64};

use super::problem::ConicProblem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolveStatus {
    Optimal,
    MaxIterations,
    Infeasible,
}

/// Primal point `y` with block values `Z_j = Σ y_i F_i^{(j)}`, and the dual point
/// `(X_j, w)` certifying it.
#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub status: SolveStatus,
    /// `cᵀy`.
    pub objective: f64,
    /// `fᵀw`.
    pub dual_objective: f64,
    pub gap: f64,
    /// Largest of `|Σ y F − Z|` and `|f − Ey|`.
    pub primal_residual: f64,
    /// Largest entry of `|c − 𝒜(X) − Eᵀw|`; optimality asks for `≤ tol · (1 + ‖c‖∞)`.
    pub dual_residual: f64,
    pub iterations: usize,
    pub y: Vec<f64>,
    pub blocks: Vec<CMatrix>,
    pub dual_blocks: Vec<CMatrix>,
    pub multipliers: Vec<f64>,
}

pub trait ConicSolver {
    fn solve(&self, problem: &ConicProblem, tolerance: f64) -> Result<SdpSolution>;
}

/// Infeasible primal-dual interior-point method with the HKM search direction and
/// Mehrotra's predictor-corrector, working directly on the Hermitian blocks.
#[derive(Debug, Clone, Copy)]
pub struct InteriorPoint {
    pub max_iterations: usize,
    /// Fraction of the distance to the cone boundary taken per step.
    pub step_fraction: f64,
    /// Norm of `y` or `X` beyond which the problem is declared infeasible.
    pub divergence: f64,
}

impl Default for InteriorPoint {
    fn default() -> Self {
        Self {
            max_iterations: 100,
            step_fraction: 0.98,
            divergence: 1e10,
        }
    }
}

const MAX_REFINEMENT_STEPS: usize = 30;
/// Iterations without improving the best iterate before giving up.
const STALL_ITERATIONS: usize = 15;

#[derive(Clone)]
struct State {
    y: Vec<f64>,
    z: Vec<CMatrix>,
    x: Vec<CMatrix>,
    w: Vec<f64>,
}

struct Residuals {
    /// `Σ y F − Z` per block.
    p: Vec<CMatrix>,
    /// `f − Ey`.
    r: DVector<f64>,
    /// `c − 𝒜(X) − Eᵀw`.
    d: DVector<f64>,
    primal: f64,
    dual: f64,
    objective: f64,
    dual_objective: f64,
}

struct Direction {
    dy: DVector<f64>,
    dz: Vec<CMatrix>,
    dx: Vec<CMatrix>,
    dw: DVector<f64>,
}

/// Cholesky factor of `D^{-1/2} (M + δI) D^{-1/2}` with `D = diag M`. The shift `δ`
/// starts at zero and grows until the factorization succeeds; the Newton solve refines
/// against the unshifted operator, so a small shift only costs accuracy per sweep.
struct Factor {
    chol: Cholesky<f64, nalgebra::Dyn>,
    scale: DVector<f64>,
}

impl Factor {
    fn new(m: DMatrix<f64>) -> Option<Self> {
        let n = m.nrows();
        let scale = DVector::from_iterator(
            n,
            m.diagonal().iter().map(|&v| if v > 0.0 { 1.0 / v.sqrt() } else { 1.0 }),
        );
        let mut scaled = m;
        for j in 0..n {
            for i in 0..n {
                scaled[(i, j)] *= scale[i] * scale[j];
            }
        }
        let mut shift = 0.0;
        for _ in 0..12 {
            let mut trial = scaled.clone();
            for i in 0..n {
                trial[(i, i)] += shift;
            }
            if let Some(chol) = Cholesky::new(trial) {
                return Some(Factor { chol, scale });
            }
            shift = if shift == 0.0 { 1e-14 } else { shift * 10.0 };
        }
        None
    }

    fn solve(&self, b: &DMatrix<f64>) -> DMatrix<f64> {
        let mut x = b.clone();
        for (i, mut row) in x.row_iter_mut().enumerate() {
            row *= self.scale[i];
        }
        let mut x = self.chol.solve(&x);
        for (i, mut row) in x.row_iter_mut().enumerate() {
            row *= self.scale[i];
        }
        x
    }

    fn solve_vector(&self, b: &DVector<f64>) -> DVector<f64> {
        let x = self.chol.solve(&b.component_mul(&self.scale));
        x.component_mul(&self.scale)
    }
}

fn inverse_and_factor(m: &CMatrix) -> Option<(CMatrix, Cholesky<C64, nalgebra::Dyn>)> {
    let chol = Cholesky::new(m.clone())?;
    Some((chol.inverse(), chol))
}

/// Largest `α` with `M + α dM ⪰ 0`, given the Cholesky factor of `M`.
fn max_step(chol: &Cholesky<C64, nalgebra::Dyn>, dm: &CMatrix) -> f64 {
    let l = chol.l();
    let Some(half) = l.solve_lower_triangular(dm) else {
        return 0.0;
    };
    let Some(full) = l.solve_lower_triangular(&half.adjoint()) else {
        return 0.0;
    };
    let smallest = hermitian_part(&full)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    if smallest >= 0.0 {
        f64::INFINITY
    } else {
        -1.0 / smallest
    }
}

/// `w ← argmin ‖c − 𝒜(X) − Eᵀw‖`. The multipliers are free, so this removes the part
/// of the dual residual in the range of `Eᵀ` exactly instead of relying on the Newton
/// step, whose `dw` loses accuracy as the Schur complement degenerates.
fn refit_multipliers(problem: &ConicProblem, eet: &Factor, s: &mut State) {
    let mut target = DVector::from_column_slice(problem.objective());
    for (block, x) in problem.blocks().iter().zip(&s.x) {
        target -= DVector::from_vec(block.adjoint(x));
    }
    let w = eet.solve_vector(&(problem.equalities() * target));
    s.w = w.iter().copied().collect();
}

impl InteriorPoint {
    fn residuals(&self, problem: &ConicProblem, s: &State) -> Residuals {
        let p: Vec<CMatrix> = problem
            .evaluate_blocks(&s.y)
            .into_iter()
            .zip(&s.z)
            .map(|(fy, z)| fy - z)
            .collect();
        let r = DVector::from_vec(problem.equality_residual(&s.y));
        let d = DVector::from_vec(problem.dual_residual(&s.x, &s.w));
        let primal = p.iter().map(max_abs).fold(r.amax(), f64::max);
        Residuals {
            primal,
            dual: d.amax(),
            objective: problem.objective_value(&s.y),
            dual_objective: problem.rhs().iter().zip(&s.w).map(|(f, w)| f * w).sum(),
            p,
            r,
            d,
        }
    }

    fn schur(problem: &ConicProblem, x: &[CMatrix], zinv: &[CMatrix]) -> DMatrix<f64> {
        let m = problem.num_vars();
        let mut schur = DMatrix::zeros(m, m);
        for ((block, x), zinv) in problem.blocks().iter().zip(x).zip(zinv) {
            let images = block.images();
            let generators = block.generators();
            let mut traces = vec![(C64::new(0.0, 0.0), C64::new(0.0, 0.0)); generators.len()];
            for (g, users) in block.users().iter().enumerate() {
                if users.is_empty() {
                    continue;
                }
                let h = generators[g].sandwich(zinv, x);
                let ha = generators[g].adjoint_sandwich(zinv, x);
                for &i in users {
                    let ci = images[i].coefficient;
                    let hi = &h * ci + &ha * ci.conj();
                    for (t, gen) in traces.iter_mut().zip(generators) {
                        *t = (gen.trace_with(&hi), gen.adjoint_trace_with(&hi));
                    }
                    for (k, im) in images.iter().enumerate() {
                        let (t, ta) = traces[im.generator];
                        schur[(i, k)] += (im.coefficient * t + im.coefficient.conj() * ta).re;
                    }
                }
            }
        }
        let t = schur.transpose();
        (schur + t) * 0.5
    }

    #[allow(clippy::too_many_arguments)]
    fn direction(
        problem: &ConicProblem,
        s: &State,
        res: &Residuals,
        zinv: &[CMatrix],
        factor: &Factor,
        minv_et: &DMatrix<f64>,
        reduced: &Factor,
        target: f64,
        corrector: Option<&Direction>,
    ) -> Direction {
        // G_j = σμ Z⁻¹ − X − X P Z⁻¹ − dX_aff dZ_aff Z⁻¹.
        let g: Vec<CMatrix> = (0..s.x.len())
            .map(|j| {
                let mut gj = zinv[j].scale(target) - &s.x[j] - &s.x[j] * &res.p[j] * &zinv[j];
                if let Some(c) = corrector {
                    gj -= &c.dx[j] * &c.dz[j] * &zinv[j];
                }
                gj
            })
            .collect();
        let mut h = DVector::zeros(problem.num_vars());
        for (block, gj) in problem.blocks().iter().zip(&g) {
            h += DVector::from_vec(block.adjoint(gj));
        }
        h -= &res.d;

        // M dy − Eᵀ dw = h and E dy = r, with iterative refinement against M applied
        // from its definition, 𝒜(X F(dy) Z⁻¹), rather than the assembled matrix.
        let e = problem.equalities();
        let kkt = |h: &DVector<f64>, r: &DVector<f64>| {
            let u = factor.solve_vector(h);
            let dw = reduced.solve_vector(&(r - e * &u));
            (u + minv_et * &dw, dw)
        };
        let apply_m = |v: &DVector<f64>| {
            let mut out = DVector::zeros(v.len());
            let images = problem.evaluate_blocks(v.as_slice());
            for (j, (block, fv)) in problem.blocks().iter().zip(images).enumerate() {
                out += DVector::from_vec(block.adjoint(&(&s.x[j] * fv * &zinv[j])));
            }
            out
        };
        let residual = |dy: &DVector<f64>, dw: &DVector<f64>| {
            let eh = &h - (apply_m(dy) - e.transpose() * dw);
            let er = &res.r - e * dy;
            let size = eh.amax().max(er.amax());
            (eh, er, size)
        };
        let (mut dy, mut dw) = kkt(&h, &res.r);
        let (mut eh, mut er, mut size) = residual(&dy, &dw);
        for _ in 0..MAX_REFINEMENT_STEPS {
            let (cy, cw) = kkt(&eh, &er);
            let (ny, nw) = (&dy + cy, &dw + cw);
            let (nh, nr, nsize) = residual(&ny, &nw);
            if nsize >= size {
                break;
            }
            (dy, dw, eh, er, size) = (ny, nw, nh, nr, nsize);
        }
        let fy = problem.evaluate_blocks(dy.as_slice());
        let dz: Vec<CMatrix> = fy.into_iter().zip(&res.p).map(|(f, p)| f + p).collect();
        let dx: Vec<CMatrix> = (0..s.x.len())
            .map(|j| hermitian_part(&(&g[j] - &s.x[j] * (&dz[j] - &res.p[j]) * &zinv[j])))
            .collect();
        Direction { dy, dz, dx, dw }
    }
}

impl ConicSolver for InteriorPoint {
    fn solve(&self, problem: &ConicProblem, tolerance: f64) -> Result<SdpSolution> {
        let m = problem.num_vars();
        let sizes = problem.block_sizes();
        let total: usize = sizes.iter().sum();
        if total == 0 {
            return Err(Error::MalformedProblem("no PSD blocks".into()));
        }
        let scale = problem
            .objective()
            .iter()
            .fold(1.0_f64, |acc, c| acc.max(c.abs()));
        let mut s = State {
            y: vec![0.0; m],
            z: sizes.iter().map(|&n| CMatrix::identity(n, n)).collect(),
            x: sizes.iter().map(|&n| CMatrix::identity(n, n) * C64::new(scale, 0.0)).collect(),
            w: vec![0.0; problem.rhs().len()],
        };
        let gamma = self.step_fraction;
        // Dual feasibility is judged relative to the cost vector.
        let dual_scale = 1.0 + problem.objective().iter().fold(0.0_f64, |a, c| a.max(c.abs()));
        let mut status = SolveStatus::MaxIterations;
        let mut iterations = 0;
        let e = problem.equalities();
        let eet = Factor::new(e * e.transpose())
            .ok_or_else(|| Error::MalformedProblem("equality constraints are linearly dependent".into()))?;
        let mut res = self.residuals(problem, &s);
        // Degenerate programs (no strictly feasible point) lose accuracy near the end;
        // the best iterate by max(gap, residuals) is what gets reported.
        let mut best: Option<(f64, State, usize)> = None;

        for it in 0..=self.max_iterations {
            iterations = it;
            let gap = (res.objective - res.dual_objective).abs();
            if gap <= tolerance && res.primal <= tolerance && res.dual <= tolerance * dual_scale {
                status = SolveStatus::Optimal;
                break;
            }
            let merit = gap.max(res.primal).max(res.dual / dual_scale);
            match &best {
                Some((m, _, at)) if *m <= merit => {
                    if it - at >= STALL_ITERATIONS {
                        break;
                    }
                }
                _ => best = Some((merit, s.clone(), it)),
            }
            let y_norm = s.y.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
            let x_norm = s.x.iter().map(max_abs).fold(0.0, f64::max);
            if y_norm > self.divergence || x_norm > self.divergence {
                status = SolveStatus::Infeasible;
                break;
            }
            if it == self.max_iterations {
                break;
            }

            let mut zinv = Vec::with_capacity(s.z.len());
            let mut zchol = Vec::with_capacity(s.z.len());
            let mut xchol = Vec::with_capacity(s.x.len());
            let mut ok = true;
            for (z, x) in s.z.iter().zip(&s.x) {
                match (inverse_and_factor(z), Cholesky::new(x.clone())) {
                    (Some((inv, zc)), Some(xc)) => {
                        zinv.push(inv);
                        zchol.push(zc);
                        xchol.push(xc);
                    }
                    _ => ok = false,
                }
            }
            if !ok {
                break;
            }
            let mu: f64 = s
                .x
                .iter()
                .zip(&s.z)
                .map(|(x, z)| trace_product(x, z))
                .sum::<f64>()
                / total as f64;

            let Some(factor) = Factor::new(Self::schur(problem, &s.x, &zinv)) else {
                break;
            };
            let e = problem.equalities();
            let minv_et = factor.solve(&e.transpose());
            let Some(reduced) = Factor::new(e * &minv_et) else {
                break;
            };

            let steps = |d: &Direction| {
                let mut ap = 1.0_f64;
                let mut ad = 1.0_f64;
                for j in 0..s.z.len() {
                    ap = ap.min(gamma * max_step(&zchol[j], &d.dz[j]));
                    ad = ad.min(gamma * max_step(&xchol[j], &d.dx[j]));
                }
                (ap, ad)
            };

            let predictor = Self::direction(problem, &s, &res, &zinv, &factor, &minv_et, &reduced, 0.0, None);
            let (ap, ad) = steps(&predictor);
            let mu_aff: f64 = (0..s.z.len())
                .map(|j| {
                    let z = &s.z[j] + &predictor.dz[j] * C64::new(ap, 0.0);
                    let x = &s.x[j] + &predictor.dx[j] * C64::new(ad, 0.0);
                    trace_product(&x, &z)
                })
                .sum::<f64>()
                / total as f64;
            let sigma = (mu_aff / mu).clamp(0.0, 1.0).powi(3);

            let d = Self::direction(
                problem,
                &s,
                &res,
                &zinv,
                &factor,
                &minv_et,
                &reduced,
                sigma * mu,
                Some(&predictor),
            );
            let (ap, ad) = steps(&d);
            for (y, dy) in s.y.iter_mut().zip(d.dy.iter()) {
                *y += ap * dy;
            }
            for (w, dw) in s.w.iter_mut().zip(d.dw.iter()) {
                *w += ad * dw;
            }
            for j in 0..s.z.len() {
                s.z[j] = hermitian_part(&(&s.z[j] + &d.dz[j] * C64::new(ap, 0.0)));
                s.x[j] = hermitian_part(&(&s.x[j] + &d.dx[j] * C64::new(ad, 0.0)));
            }
            refit_multipliers(problem, &eet, &mut s);
            res = self.residuals(problem, &s);
        }

        if status != SolveStatus::Optimal {
            if let Some((merit, state, _)) = best {
                let current = (res.objective - res.dual_objective)
                    .abs()
                    .max(res.primal)
                    .max(res.dual / dual_scale);
                if merit < current {
                    s = state;
                    res = self.residuals(problem, &s);
                }
            }
        }
        Ok(SdpSolution {
            status,
            objective: res.objective,
            dual_objective: res.dual_objective,
            gap: (res.objective - res.dual_objective).abs(),
            primal_residual: res.primal,
            dual_residual: res.dual,
            iterations,
            blocks: problem.evaluate_blocks(&s.y),
            y: s.y,
            dual_blocks: s.x,
            multipliers: s.w,
        })
    }
}
