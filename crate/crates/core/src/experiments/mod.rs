//! Seeded random ensembles, relative-difference statistics between `F_Q` and the SDP
//! bounds, and monitoring of `F_Q ≤ 4 · min_decomposition Σ p_k (ΔA)²_k`.
//!
//! Every trial draws from its own ChaCha20 stream: the generator is seeded with the
//! run seed and switched to stream number `trial`. Trials can therefore run in any
//! order (or in parallel) and still see identical inputs.

mod random;

pub use random::{
    complex_normal, ginibre, random_density, random_density_of_rank, random_hermitian,
    random_pure_state, random_zero_diagonal_observable,
};

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::hermitian::{DensityMatrix, HermitianOperator};
use crate::metrology::qfi_bc;
use crate::roofs::{mixture_variance, random_decomposition};
use crate::sdp::{
    bound_with, BoundResult, ExtensionTemplate, InteriorPoint, SolveStatus, DEFAULT_TOLERANCE,
};
use crate::{Error, Result};

/// Trials whose `F_Q` is at or below this are degenerate and excluded from statistics.
pub const DEGENERATE_QFI: f64 = 1e-12;

/// Which semidefinite relaxation a trial solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum BoundKind {
    /// PPT symmetric two-party states.
    Sppt,
    /// PPT symmetric extension to `N ≥ 3` parties.
    Se(usize),
}

impl BoundKind {
    pub fn parties(self) -> usize {
        match self {
            BoundKind::Sppt => 2,
            BoundKind::Se(n) => n,
        }
    }
}

impl fmt::Display for BoundKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BoundKind::Sppt => f.write_str("sppt"),
            BoundKind::Se(n) => write!(f, "se{n}"),
        }
    }
}

impl FromStr for BoundKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        if lower == "sppt" {
            return Ok(BoundKind::Sppt);
        }
        match lower.strip_prefix("se").map(str::parse::<usize>) {
            Some(Ok(n)) if n >= 3 => Ok(BoundKind::Se(n)),
            Some(Ok(n)) => Err(Error::ExtensionSize(n)),
            _ => Err(Error::InvalidConfig(format!("unknown bound '{s}' (use sppt or seN)"))),
        }
    }
}

impl From<BoundKind> for String {
    fn from(b: BoundKind) -> String {
        b.to_string()
    }
}

impl TryFrom<String> for BoundKind {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

/// One row of the relative-difference table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialConfig {
    pub local_dim: usize,
    pub bound: BoundKind,
    /// Draw `A` with zero diagonal in the eigenbasis of `ρ`.
    pub zero_diagonal: bool,
    pub trials: usize,
    pub seed: u64,
    pub tolerance: f64,
}

impl TrialConfig {
    /// 200 trials at the default solver tolerance.
    pub fn new(local_dim: usize, bound: BoundKind, zero_diagonal: bool, seed: u64) -> Self {
        TrialConfig { local_dim, bound, zero_diagonal, trials: 200, seed, tolerance: DEFAULT_TOLERANCE }
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=4).contains(&self.local_dim) {
            return Err(Error::InvalidConfig(format!("d must be 2, 3 or 4 (got {})", self.local_dim)));
        }
        if self.trials == 0 {
            return Err(Error::InvalidConfig("at least one trial is required".into()));
        }
        if !(self.tolerance.is_finite() && self.tolerance > 0.0) {
            return Err(Error::InvalidConfig(format!("tolerance must be positive (got {})", self.tolerance)));
        }
        if let BoundKind::Se(n) = self.bound {
            if n < 3 {
                return Err(Error::ExtensionSize(n));
            }
        }
        Ok(())
    }

    /// The `(ρ, A)` pair of a trial, drawn from its own substream.
    pub fn sample(&self, trial: u64) -> (DensityMatrix, HermitianOperator) {
        let mut rng = trial_rng(self.seed, trial);
        let rho = random_density(self.local_dim, &mut rng);
        let a = if self.zero_diagonal {
            random_zero_diagonal_observable(&rho, &mut rng)
        } else {
            random_hermitian(self.local_dim, &mut rng)
        };
        (rho, a)
    }
}

/// The generator for trial `trial` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha20Rng {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrialStatus {
    Optimal,
    MaxIterations,
    Infeasible,
    /// The solver returned an error (numerical breakdown).
    Failed,
}

impl From<SolveStatus> for TrialStatus {
    fn from(s: SolveStatus) -> Self {
        match s {
            SolveStatus::Optimal => TrialStatus::Optimal,
            SolveStatus::MaxIterations => TrialStatus::MaxIterations,
            SolveStatus::Infeasible => TrialStatus::Infeasible,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    /// Stream index of the trial.
    pub trial: u64,
    pub qfi: f64,
    pub bound: Option<f64>,
    /// `|F_Q − B| / F_Q`; absent for degenerate or failed trials.
    pub relative_difference: Option<f64>,
    pub status: TrialStatus,
    pub iterations: usize,
    pub gap: Option<f64>,
}

impl TrialRecord {
    pub fn is_degenerate(&self) -> bool {
        self.qfi <= DEGENERATE_QFI
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsSummary {
    pub trials: usize,
    /// Trials entering the statistics: optimal and non-degenerate.
    pub counted: usize,
    pub largest: f64,
    pub average: f64,
    /// Population standard deviation.
    pub std_dev: f64,
    pub degenerate: usize,
    /// Trials without an optimal solve.
    pub failures: usize,
}

/// Runs every trial of `config`; records are in trial order.
pub fn run_trials(config: &TrialConfig) -> Result<Vec<TrialRecord>> {
    config.validate()?;
    let template = ExtensionTemplate::new(config.bound.parties(), config.local_dim)?;
    let solver = InteriorPoint::default();
    let run = |trial: u64| run_trial(config, &template, &solver, trial);

    #[cfg(feature = "parallel")]
    let records = {
        use rayon::prelude::*;
        (0..config.trials as u64).into_par_iter().map(run).collect::<Result<Vec<_>>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let records = (0..config.trials as u64).map(run).collect::<Result<Vec<_>>>()?;

    Ok(records)
}

/// One trial of `config` together with the solver output it was scored from; the
/// record is the same one [`run_trials`] produces.
pub fn solve_trial(config: &TrialConfig, trial: u64) -> Result<(TrialRecord, Option<BoundResult>)> {
    config.validate()?;
    let template = ExtensionTemplate::new(config.bound.parties(), config.local_dim)?;
    solve_with(config, &template, &InteriorPoint::default(), trial)
}

fn run_trial(
    config: &TrialConfig,
    template: &ExtensionTemplate,
    solver: &InteriorPoint,
    trial: u64,
) -> Result<TrialRecord> {
    solve_with(config, template, solver, trial).map(|(record, _)| record)
}

fn solve_with(
    config: &TrialConfig,
    template: &ExtensionTemplate,
    solver: &InteriorPoint,
    trial: u64,
) -> Result<(TrialRecord, Option<BoundResult>)> {
    let (rho, a) = config.sample(trial);
    let qfi = qfi_bc(&rho, &a)?;
    match bound_with(solver, template, &rho, &a, config.tolerance) {
        Ok(b) => {
            let status = TrialStatus::from(b.witness.status);
            let relative_difference = (status == TrialStatus::Optimal && qfi > DEGENERATE_QFI)
                .then(|| (qfi - b.value).abs() / qfi);
            let record = TrialRecord {
                trial,
                qfi,
                bound: Some(b.value),
                relative_difference,
                status,
                iterations: b.witness.iterations,
                gap: Some(b.witness.gap),
            };
            Ok((record, Some(b)))
        }
        Err(Error::Solver(_)) => {
            let record = TrialRecord {
                trial,
                qfi,
                bound: None,
                relative_difference: None,
                status: TrialStatus::Failed,
                iterations: 0,
                gap: None,
            };
            Ok((record, None))
        }
        Err(e) => Err(e),
    }
}

/// Statistics over optimal, non-degenerate records. Sums are compensated and taken in
/// trial order, so the result does not depend on how the records were produced.
pub fn summarize(records: &[TrialRecord]) -> StatsSummary {
    let mut sorted: Vec<&TrialRecord> = records.iter().collect();
    sorted.sort_by_key(|r| r.trial);
    let values: Vec<f64> = sorted.iter().filter_map(|r| r.relative_difference).collect();
    let degenerate = sorted.iter().filter(|r| r.is_degenerate()).count();
    let failures = sorted.iter().filter(|r| r.status != TrialStatus::Optimal).count();

    let n = values.len();
    let (largest, average, std_dev) = if n == 0 {
        (0.0, 0.0, 0.0)
    } else {
        let largest = values.iter().copied().fold(0.0, f64::max);
        let average = neumaier_sum(values.iter().copied()) / n as f64;
        let var = neumaier_sum(values.iter().map(|v| (v - average).powi(2))) / n as f64;
        (largest, average, var.sqrt())
    };
    StatsSummary { trials: records.len(), counted: n, largest, average, std_dev, degenerate, failures }
}

pub fn run_table(config: &TrialConfig) -> Result<StatsSummary> {
    Ok(summarize(&run_trials(config)?))
}

fn neumaier_sum(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0_f64;
    let mut c = 0.0_f64;
    for v in values {
        let t = sum + v;
        c += if sum.abs() >= v.abs() { (sum - t) + v } else { (v - t) + sum };
        sum = t;
    }
    sum + c
}

/// Random decompositions sampled per trial by [`conjecture_monitor`].
pub const MONITOR_DECOMPOSITIONS: usize = 20;

/// Outcome of [`conjecture_monitor`].
///
/// The gap of a trial is `4 · min_k Σ p (ΔA)² − F_Q` over the sampled decompositions,
/// relative to `F_Q`. It can never be negative beyond rounding (`F_Q` is convex and
/// equals `4(ΔA)²` on pure states); it vanishes exactly when one of the samples
/// attains the convex roof bound.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub trials: usize,
    pub decompositions_per_trial: usize,
    /// Decompositions with `F_Q > 4 Σ p (ΔA)² + 1e-8`.
    pub guaranteed_violations: usize,
    /// Most negative `4 Σ p (ΔA)² − F_Q` seen (0 if none negative).
    pub worst_margin: f64,
    pub smallest_relative_gap: f64,
    pub average_relative_gap: f64,
    pub largest_relative_gap: f64,
}

/// Checks `F_Q ≤ 4 Σ p (ΔA)²` for random full-rank `ρ`, random `A` and
/// [`MONITOR_DECOMPOSITIONS`] random decompositions per trial.
pub fn conjecture_monitor<R: Rng + ?Sized>(count: usize, d: usize, rng: &mut R) -> Result<ConjectureReport> {
    conjecture_monitor_with(count, d, MONITOR_DECOMPOSITIONS, rng)
}

pub fn conjecture_monitor_with<R: Rng + ?Sized>(
    count: usize,
    d: usize,
    decompositions: usize,
    rng: &mut R,
) -> Result<ConjectureReport> {
    if !(1..=4).contains(&d) {
        return Err(Error::InvalidConfig(format!("d must be at most 4 (got {d})")));
    }
    if decompositions == 0 {
        return Err(Error::InvalidConfig("at least one decomposition per trial is required".into()));
    }
    let mut violations = 0;
    let mut worst_margin = 0.0_f64;
    let mut gaps = Vec::with_capacity(count);
    for _ in 0..count {
        let rho = random_density(d, rng);
        let a = random_hermitian(d, rng);
        let qfi = qfi_bc(&rho, &a)?;
        let mut best = f64::INFINITY;
        for _ in 0..decompositions {
            let terms = rng.random_range(d..=2 * d);
            let decomp = random_decomposition(&rho, terms, rng)?;
            let bound = 4.0 * mixture_variance(&decomp, &a)?;
            let margin = bound - qfi;
            if margin < -1e-8 {
                violations += 1;
            }
            worst_margin = worst_margin.min(margin);
            best = best.min(bound);
        }
        if qfi > DEGENERATE_QFI {
            gaps.push((best - qfi) / qfi);
        }
    }
    let n = gaps.len().max(1) as f64;
    Ok(ConjectureReport {
        trials: count,
        decompositions_per_trial: decompositions,
        guaranteed_violations: violations,
        worst_margin,
        smallest_relative_gap: gaps.iter().copied().fold(f64::INFINITY, f64::min).min(f64::MAX),
        average_relative_gap: neumaier_sum(gaps.iter().copied()) / n,
        largest_relative_gap: gaps.iter().copied().fold(0.0, f64::max),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::DensityMatrix;
    use crate::metrology::variance;
    use crate::roofs::theorem2_decomposition;

    #[test]
    fn bound_kind_round_trip() {
        for b in [BoundKind::Sppt, BoundKind::Se(3), BoundKind::Se(4)] {
            assert_eq!(b.to_string().parse::<BoundKind>().unwrap(), b);
            let json = serde_json::to_string(&b).unwrap();
            assert_eq!(serde_json::from_str::<BoundKind>(&json).unwrap(), b);
        }
        assert!("se2".parse::<BoundKind>().is_err());
        assert!("ppt".parse::<BoundKind>().is_err());
    }

    #[test]
    fn config_validation() {
        let ok = TrialConfig::new(2, BoundKind::Sppt, true, 1);
        assert!(ok.validate().is_ok());
        assert!(TrialConfig { local_dim: 5, ..ok.clone() }.validate().is_err());
        assert!(TrialConfig { local_dim: 1, ..ok.clone() }.validate().is_err());
        assert!(TrialConfig { trials: 0, ..ok.clone() }.validate().is_err());
        assert!(TrialConfig { tolerance: 0.0, ..ok }.validate().is_err());
    }

    #[test]
    fn substreams_are_independent_of_order() {
        let config = TrialConfig::new(3, BoundKind::Sppt, false, 42);
        let (r5, a5) = config.sample(5);
        let _ = config.sample(4);
        let (again, a_again) = config.sample(5);
        assert_eq!(r5, again);
        assert_eq!(a5, a_again);
        assert_ne!(config.sample(6).0, r5);
    }

    #[test]
    fn zero_diagonal_rank2_trials_are_exact() {
        let config = TrialConfig::new(2, BoundKind::Sppt, true, 11);
        for t in 0..20 {
            let (rho, a) = config.sample(t);
            let decomp = theorem2_decomposition(&rho, &a).unwrap();
            let qfi = qfi_bc(&rho, &a).unwrap();
            assert!((4.0 * mixture_variance(&decomp, &a).unwrap() - qfi).abs() <= 1e-9 * qfi.max(1.0));
        }
    }

    #[test]
    fn summary_statistics() {
        let rec = |trial, qfi: f64, rd: Option<f64>, status| TrialRecord {
            trial,
            qfi,
            bound: Some(qfi),
            relative_difference: rd,
            status,
            iterations: 1,
            gap: Some(0.0),
        };
        let records = vec![
            rec(2, 1.0, Some(3e-7), TrialStatus::Optimal),
            rec(0, 1.0, Some(1e-7), TrialStatus::Optimal),
            rec(1, 0.0, None, TrialStatus::Optimal),
            rec(3, 1.0, None, TrialStatus::MaxIterations),
        ];
        let s = summarize(&records);
        assert_eq!((s.trials, s.counted, s.degenerate, s.failures), (4, 2, 1, 1));
        assert_eq!(s.largest, 3e-7);
        assert!((s.average - 2e-7).abs() < 1e-22);
        assert!((s.std_dev - 1e-7).abs() < 1e-20);
        let mut reversed = records.clone();
        reversed.reverse();
        assert_eq!(summarize(&reversed), s);
        assert_eq!(summarize(&[]).counted, 0);
    }

    #[test]
    fn compensated_sum() {
        let values = [1e16, 1.0, -1e16, 1.0];
        assert_eq!(neumaier_sum(values.iter().copied()), 2.0);
    }

    #[test]
    fn small_table_is_deterministic() {
        let config = TrialConfig { trials: 12, ..TrialConfig::new(2, BoundKind::Sppt, true, 7) };
        let a = run_trials(&config).unwrap();
        let b = run_trials(&config).unwrap();
        assert_eq!(a, b);
        let s = summarize(&a);
        assert_eq!(s.failures, 0);
        assert!(s.largest <= 1e-4, "{s:?}");
        assert!(s.largest >= s.average && s.average >= 0.0 && s.std_dev >= 0.0);
    }

    #[test]
    fn monitor_never_violates_convexity() {
        let mut rng = trial_rng(5, 0);
        for d in 2..=4 {
            let report = conjecture_monitor_with(30, d, 8, &mut rng).unwrap();
            assert_eq!(report.guaranteed_violations, 0, "{report:?}");
            assert!(report.smallest_relative_gap >= -1e-8);
        }
        assert!(conjecture_monitor(1, 5, &mut rng).is_err());
    }

    #[test]
    fn pure_states_have_no_gap() {
        let mut rng = trial_rng(8, 0);
        for _ in 0..20 {
            let psi = random_pure_state(3, &mut rng);
            let rho = DensityMatrix::pure(&psi);
            let a = random_hermitian(3, &mut rng);
            let decomp = random_decomposition(&rho, 3, &mut rng).unwrap();
            let v = variance(&rho, &a).unwrap();
            assert!((qfi_bc(&rho, &a).unwrap() - 4.0 * v).abs() < 1e-10 * v.max(1.0));
            assert!((mixture_variance(&decomp, &a).unwrap() - v).abs() < 1e-10 * v.max(1.0));
        }
    }
}
