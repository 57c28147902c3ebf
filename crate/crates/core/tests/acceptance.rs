//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use fisher_roof::experiments::{
    random_density, random_density_of_rank, random_hermitian, random_pure_state,
    random_zero_diagonal_observable, solve_trial, summarize, trial_rng, BoundKind, TrialConfig,
};
use fisher_roof::hermitian::{
    complex_to_real_embedding, eigendecompose, partial_trace, partial_transpose, MultipartiteLayout,
    SymmetricSubspace,
};
use fisher_roof::metrology::{generalized_qfi, generalized_variance, qfi_bc, skew_information, variance};
use fisher_roof::roofs::{
    concave_roof_decomposition, lemma2_split, mixture_variance, random_decomposition,
    theorem2_decomposition,
};
use fisher_roof::sdp::{bound_se, bound_sppt, BoundResult, SolveStatus, SIZE_LIMIT};
use fisher_roof::{CMatrix, DensityMatrix, HermitianOperator, MeanCatalog, Result, C64, TOLERANCES};
use rand::Rng;

const SOLVER_TOLERANCE: f64 = 1e-8;

struct Outcome {
    pass: bool,
    detail: String,
}

fn report(index: usize, title: &str, elapsed: Duration, outcome: Result<Outcome>) -> bool {
    let (pass, detail) = match outcome {
        Ok(o) => (o.pass, o.detail),
        Err(e) => (false, format!("error: {e}")),
    };
    let verdict = if pass { "PASS" } else { "FAIL" };
    println!("criterion {index}: {verdict} {title} ({detail}; {:.1} s)", elapsed.as_secs_f64());
    pass
}

fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

fn relative(x: f64, reference: f64) -> f64 {
    (x - reference).abs() / reference.abs().max(f64::MIN_POSITIVE)
}

/// Smallest eigenvalue through the real symmetric embedding, not the complex solver.
fn embedded_min_eigenvalue(m: &CMatrix) -> f64 {
    let h = HermitianOperator::hermitize(m.clone()).expect("square");
    let real = complex_to_real_embedding(&h);
    real.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

/// Rebuilds `ρ₀` from a bound witness in the full `d^N` space and measures it against
/// the program directly: cone violations, marginal residual, objective, and the gap to
/// the dual value `Tr(Wρ)`.
struct Recheck {
    primal_residual: f64,
    gap: f64,
    objective_drift: f64,
    dual_cone_violation: f64,
}

fn recheck(b: &BoundResult, rho: &DensityMatrix, a: &HermitianOperator) -> Result<Recheck> {
    let (n, d) = (b.extension_size, b.local_dim);
    let layout = MultipartiteLayout::new(n, d);
    let rho0 = SymmetricSubspace::new(layout).lift(&b.symmetric_state());

    let mut cone_violation = (-embedded_min_eigenvalue(&rho0)).max(0.0);
    for m in 1..=n / 2 {
        let parties: Vec<usize> = (0..m).collect();
        let pt = partial_transpose(&rho0, layout, &parties)?;
        cone_violation = cone_violation.max((-embedded_min_eigenvalue(pt.as_matrix())).max(0.0));
    }
    let rest: Vec<usize> = (1..n).collect();
    let marginal = partial_trace(&rho0, layout, &rest)?;
    let marginal_residual = max_abs(&(marginal.as_matrix() - &**rho));

    let tail: Vec<usize> = (2..n).collect();
    let rho12 = if tail.is_empty() {
        rho0.clone()
    } else {
        partial_trace(&rho0, layout, &tail)?.as_matrix().clone()
    };
    let id = CMatrix::identity(d, d);
    let diff = a.kronecker(&id) - id.kronecker(&**a);
    let cost = &diff * &diff;
    let objective = 2.0 * (cost * rho12).trace().re;
    let dual = (b.dual_observable() * &**rho).trace().re;

    let dual_cone_violation = b
        .witness
        .dual_blocks
        .iter()
        .map(|x| (-embedded_min_eigenvalue(x)).max(0.0))
        .fold(0.0, f64::max);

    Ok(Recheck {
        primal_residual: cone_violation.max(marginal_residual),
        gap: (objective - dual).abs(),
        objective_drift: (objective - b.value).abs(),
        dual_cone_violation,
    })
}

#[derive(Default)]
struct SolverAudit {
    checked: usize,
    worst_primal: f64,
    worst_gap: f64,
    worst_drift: f64,
    worst_dual_cone: f64,
}

impl SolverAudit {
    fn add(&mut self, b: &BoundResult, rho: &DensityMatrix, a: &HermitianOperator) -> Result<()> {
        if b.witness.status != SolveStatus::Optimal {
            return Ok(());
        }
        let r = recheck(b, rho, a)?;
        self.checked += 1;
        self.worst_primal = self.worst_primal.max(r.primal_residual);
        self.worst_gap = self.worst_gap.max(r.gap);
        self.worst_drift = self.worst_drift.max(r.objective_drift);
        self.worst_dual_cone = self.worst_dual_cone.max(r.dual_cone_violation);
        Ok(())
    }
}

fn criterion_1() -> Result<Outcome> {
    let mut worst: f64 = 0.0;
    for k in 0..500u64 {
        let mut rng = trial_rng(101, k);
        let d = 2 + (k % 3) as usize;
        let rho = random_density_of_rank(d, 2, &mut rng);
        let a = random_zero_diagonal_observable(&rho, &mut rng);
        let decomp = theorem2_decomposition(&rho, &a)?;
        let qfi = qfi_bc(&rho, &a)?;
        worst = worst.max(relative(4.0 * mixture_variance(&decomp, &a)?, qfi));
    }
    Ok(Outcome { pass: worst <= 1e-9, detail: format!("500 states, max relative error {worst:.3e}") })
}

fn criterion_2() -> Result<Outcome> {
    let (mut worst_mean, mut worst_var): (f64, f64) = (0.0, 0.0);
    for k in 0..200u64 {
        let mut rng = trial_rng(102, k);
        let d = 2 + (k % 3) as usize;
        let rho = random_density(d, &mut rng);
        let a = random_hermitian(d, &mut rng);
        let decomp = concave_roof_decomposition(&rho, &a)?;
        let mean = rho.expectation(&a);
        for s in decomp.states() {
            worst_mean = worst_mean.max((s.expectation(&a) - mean).abs());
        }
        worst_var = worst_var.max(relative(mixture_variance(&decomp, &a)?, variance(&rho, &a)?));
    }
    Ok(Outcome {
        pass: worst_mean <= 1e-8 && worst_var <= 1e-8,
        detail: format!("200 states, expectation error {worst_mean:.3e}, variance relative error {worst_var:.3e}"),
    })
}

fn criterion_3() -> Result<Outcome> {
    let (mut upper, mut lower) = (0usize, 0usize);
    for k in 0..1000u64 {
        let mut rng = trial_rng(103, k);
        let d = rng.random_range(2..=4usize);
        let rank2 = k % 2 == 1;
        let rho = if rank2 { random_density_of_rank(d, 2, &mut rng) } else { random_density(d, &mut rng) };
        let a = if rank2 { random_zero_diagonal_observable(&rho, &mut rng) } else { random_hermitian(d, &mut rng) };
        let floor = if rank2 { 2 } else { d };
        let count = rng.random_range(floor..=2 * d);
        let decomp = random_decomposition(&rho, count, &mut rng)?;
        let mv = mixture_variance(&decomp, &a)?;
        if mv > variance(&rho, &a)? + 1e-9 {
            upper += 1;
        }
        if rank2 && mv < qfi_bc(&rho, &a)? / 4.0 - 1e-9 {
            lower += 1;
        }
    }
    Ok(Outcome {
        pass: upper == 0 && lower == 0,
        detail: format!("1000 triples, {upper} upper and {lower} lower violations"),
    })
}

fn criterion_4(audit: &mut SolverAudit) -> Result<Outcome> {
    let rows = [
        (2usize, BoundKind::Sppt, true),
        (2, BoundKind::Sppt, false),
        (3, BoundKind::Sppt, false),
        (4, BoundKind::Sppt, false),
        (3, BoundKind::Se(3), false),
        (4, BoundKind::Se(3), false),
    ];
    let mut pass = true;
    let mut lines = Vec::new();
    for (d, bound, zero_diagonal) in rows {
        let label = format!("d={d} {bound}{}", if zero_diagonal { " zero-diagonal" } else { "" });
        if d.pow(bound.parties() as u32) > SIZE_LIMIT {
            lines.push(format!("{label}: skipped by size guard"));
            continue;
        }
        let config = TrialConfig { tolerance: SOLVER_TOLERANCE, ..TrialConfig::new(d, bound, zero_diagonal, 2024) };
        let mut records = Vec::with_capacity(config.trials);
        for trial in 0..config.trials as u64 {
            let (record, witness) = solve_trial(&config, trial)?;
            if let Some(b) = witness {
                let (rho, a) = config.sample(trial);
                audit.add(&b, &rho, &a)?;
            }
            records.push(record);
        }
        let s = summarize(&records);
        let row_pass = s.largest <= 1e-4 && s.average <= 1e-6 && s.failures == 0;
        pass &= row_pass;
        lines.push(format!(
            "{label}: max {:.3e} avg {:.3e} counted {}/{} failures {}",
            s.largest, s.average, s.counted, s.trials, s.failures
        ));
    }
    Ok(Outcome { pass, detail: lines.join("; ") })
}

fn criterion_5() -> Result<Outcome> {
    let catalog = MeanCatalog::standard();
    let arithmetic = catalog.get("arithmetic")?;
    let (mut ordering, mut minimality) = (0usize, 0usize);
    for k in 0..500u64 {
        let mut rng = trial_rng(105, k);
        let d = 2 + (k % 3) as usize;
        let rho = random_density(d, &mut rng);
        let a = random_hermitian(d, &mut rng);
        let qfi = qfi_bc(&rho, &a)?;
        let raw_arithmetic = generalized_qfi(&rho, &a, arithmetic, false)?;
        for mean in catalog.iter() {
            if generalized_qfi(&rho, &a, mean, true)? > qfi + 1e-9 {
                ordering += 1;
            }
            if raw_arithmetic > generalized_qfi(&rho, &a, mean, false)? + 1e-9 {
                minimality += 1;
            }
        }
    }
    Ok(Outcome {
        pass: ordering == 0 && minimality == 0,
        detail: format!(
            "500 pairs x {} means, {ordering} ordering and {minimality} minimality violations",
            catalog.len()
        ),
    })
}

fn criterion_6() -> Result<Outcome> {
    let catalog = MeanCatalog::standard();
    let mut worst: f64 = 0.0;
    for k in 0..200u64 {
        let mut rng = trial_rng(106, k);
        let d = rng.random_range(2..=4usize);
        let rho = DensityMatrix::pure(&random_pure_state(d, &mut rng));
        let a = random_hermitian(d, &mut rng);
        let v = variance(&rho, &a)?;
        worst = worst.max(relative(qfi_bc(&rho, &a)?, 4.0 * v));
        worst = worst.max(relative(skew_information(&rho, &a)?, v));
        for mean in catalog.iter().filter(|m| m.at_one_zero() > 0.0) {
            worst = worst.max(relative(generalized_variance(&rho, &a, mean, true)?, v));
        }
    }
    Ok(Outcome { pass: worst <= 1e-10, detail: format!("200 pure states, max relative error {worst:.3e}") })
}

fn criterion_7(audit: &mut SolverAudit) -> Result<Outcome> {
    let (mut order, mut roof, mut nonoptimal) = (0usize, 0usize, 0usize);
    for d in [2usize, 3] {
        for k in 0..50u64 {
            let mut rng = trial_rng(107 + d as u64, k);
            let rho = random_density(d, &mut rng);
            let a = random_hermitian(d, &mut rng);
            let sppt = bound_sppt(&rho, &a, SOLVER_TOLERANCE)?;
            let se3 = bound_se(&rho, &a, 3, SOLVER_TOLERANCE)?;
            audit.add(&sppt, &rho, &a)?;
            audit.add(&se3, &rho, &a)?;
            if sppt.witness.status != SolveStatus::Optimal || se3.witness.status != SolveStatus::Optimal {
                nonoptimal += 1;
            }
            if sppt.value > se3.value + 2e-8 {
                order += 1;
            }
            for _ in 0..20 {
                let count = rng.random_range(d..=2 * d);
                let mv = 4.0 * mixture_variance(&random_decomposition(&rho, count, &mut rng)?, &a)?;
                if sppt.value > mv + 1e-6 || se3.value > mv + 1e-6 {
                    roof += 1;
                }
            }
        }
    }
    Ok(Outcome {
        pass: order == 0 && roof == 0 && nonoptimal == 0,
        detail: format!(
            "100 pairs, {order} ordering and {roof} roof violations, {nonoptimal} non-optimal solves"
        ),
    })
}

fn criterion_8() -> Result<Outcome> {
    let mut violations = 0usize;
    for k in 0..200u64 {
        let mut rng = trial_rng(108, k);
        let r = 3 + (k % 2) as usize;
        let d = rng.random_range(r..=5usize);
        let rho = random_density_of_rank(d, r, &mut rng);
        let a = random_hermitian(d, &mut rng);
        let split = lemma2_split(&rho, &a)?;
        let p = split.p;
        let back = &*split.rho_minus * C64::new(p, 0.0) + &*split.rho_plus * C64::new(1.0 - p, 0.0);
        let reassembled = max_abs(&(back - &*rho)) <= TOLERANCES.decomposition;
        let rank_of = |x: &DensityMatrix| eigendecompose(x.as_operator()).rank(TOLERANCES.rank);
        let reduced = rank_of(&split.rho_minus) < r && rank_of(&split.rho_plus) < r;
        let mean = rho.expectation(&a);
        let preserved = (split.rho_minus.expectation(&a) - mean).abs() <= TOLERANCES.decomposition
            && (split.rho_plus.expectation(&a) - mean).abs() <= TOLERANCES.decomposition;
        let weight_ok = (0.0..=1.0).contains(&p);
        if !(reassembled && reduced && preserved && weight_ok) {
            violations += 1;
        }
    }
    Ok(Outcome { pass: violations == 0, detail: format!("200 splits, {violations} violations") })
}

fn criterion_9(audit: &SolverAudit) -> Outcome {
    let pass = audit.checked > 0
        && audit.worst_gap <= 1e-8
        && audit.worst_primal <= 1e-8
        && audit.worst_drift <= 1e-8
        && audit.worst_dual_cone <= 1e-8;
    Outcome {
        pass,
        detail: format!(
            "{} optimal solves, worst gap {:.3e}, primal residual {:.3e}, objective drift {:.3e}, dual cone violation {:.3e}",
            audit.checked, audit.worst_gap, audit.worst_primal, audit.worst_drift, audit.worst_dual_cone
        ),
    }
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let value = f();
    (value, start.elapsed())
}

fn within(outcome: Result<Outcome>, elapsed: Duration, limit: Duration) -> Result<Outcome> {
    outcome.map(|o| Outcome {
        pass: o.pass && elapsed < limit,
        detail: if elapsed < limit { o.detail } else { format!("{}; over the {} s budget", o.detail, limit.as_secs()) },
    })
}

fn main() -> ExitCode {
    let mut all = true;
    let mut audit = SolverAudit::default();

    let (o, t) = timed(criterion_1);
    all &= report(1, "rank-2 zero-diagonal decomposition attains F_Q/4", t, within(o, t, Duration::from_secs(10)));
    let (o, t) = timed(criterion_2);
    all &= report(2, "equal-expectation decomposition attains the variance", t, within(o, t, Duration::from_secs(30)));
    let (o, t) = timed(criterion_3);
    all &= report(3, "F_Q/4 <= mixture variance <= variance", t, o);
    let (o, t) = timed(|| criterion_4(&mut audit));
    all &= report(4, "desk-scale table regression", t, within(o, t, Duration::from_secs(15 * 60)));
    let (o, t) = timed(criterion_5);
    all &= report(5, "generalized Fisher information ordering", t, o);
    let (o, t) = timed(criterion_6);
    all &= report(6, "pure-state normalization", t, o);
    let (o, t) = timed(|| criterion_7(&mut audit));
    all &= report(7, "hierarchy monotonicity", t, o);
    let (o, t) = timed(criterion_8);
    all &= report(8, "rank-reducing split invariants", t, o);
    let (o, t) = timed(|| criterion_9(&audit));
    all &= report(9, "solver certificates recomputed from witnesses", t, Ok(o));

    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
