mod args;

use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use fisher_roof::experiments::{
    conjecture_monitor_with, run_trials, summarize, trial_rng, BoundKind, TrialConfig, TrialRecord,
    DEGENERATE_QFI,
};
use fisher_roof::hermitian::matrix_from_json;
use fisher_roof::metrology::{generalized_qfi, generalized_variance, qfi_bc, skew_information, variance};
use fisher_roof::roofs::{concave_roof_decomposition, theorem2_decomposition, verify_decomposition};
use fisher_roof::sdp::{bound_se, bound_sppt, build_se_problem, build_sppt_problem, SolveStatus};
use fisher_roof::{DensityMatrix, HermitianOperator, MeanCatalog, MeanFunction, PureDecomposition};
use serde_json::json;

use args::{BoundChoice, Cli, Command, Experiment, Format, PairInput, Quantity, RoofKind};

const THREADS_ENV: &str = "FISHER_ROOF_THREADS";

enum Failure {
    /// Bad option combination; exit code 2.
    Usage(String),
    /// Invalid input data or a failed computation; exit code 1.
    Compute(String),
}

impl From<fisher_roof::Error> for Failure {
    fn from(e: fisher_roof::Error) -> Self {
        Failure::Compute(e.to_string())
    }
}

type Outcome = Result<(String, bool), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Compute(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: &Cli) -> Result<(), Failure> {
    let is_table = matches!(&cli.command, Command::Experiment { kind: Experiment::Table { .. } });
    if cli.format == Format::Csv && !is_table {
        return Err(Failure::Usage("--format csv is only available for `experiment table`".into()));
    }
    configure_threads(cli.threads)?;

    let (text, success) = match &cli.command {
        Command::Compute { quantity, input, mean, raw } => compute(*quantity, input, mean.as_deref(), *raw),
        Command::Roof { kind, input, decomposition } => roof(*kind, input, decomposition.as_deref()),
        Command::Bound { kind, input, parties, tolerance, dump } => {
            bound(*kind, input, *parties, *tolerance, dump.as_deref())
        }
        Command::Experiment { kind } => experiment(kind, cli.format),
    }?;
    emit(cli.output.as_deref(), &text)?;
    if success {
        Ok(())
    } else {
        Err(Failure::Compute("result did not pass its checks (see output)".into()))
    }
}

fn configure_threads(flag: Option<usize>) -> Result<(), Failure> {
    let threads = match flag {
        Some(n) => Some(n),
        None => match std::env::var(THREADS_ENV) {
            Ok(v) => Some(
                v.trim()
                    .parse::<usize>()
                    .map_err(|_| Failure::Usage(format!("{THREADS_ENV} must be a positive integer (got '{v}')")))?,
            ),
            Err(_) => None,
        },
    };
    match threads {
        Some(0) => Err(Failure::Usage("thread count must be at least 1".into())),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Compute(e.to_string())),
        None => Ok(()),
    }
}

fn emit(path: Option<&Path>, text: &str) -> Result<(), Failure> {
    let mut text = text.to_string();
    if !text.ends_with('\n') {
        text.push('\n');
    }
    match path {
        Some(p) => write_file(p, &text),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Compute(format!("writing output: {e}"))),
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure::Compute(format!("writing {}: {e}", path.display())))
}

fn read_file(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Compute(format!("reading {}: {e}", path.display())))
}

fn load_pair(input: &PairInput) -> Result<(DensityMatrix, HermitianOperator), Failure> {
    let context = |path: &Path, e: fisher_roof::Error| Failure::Compute(format!("{}: {e}", path.display()));
    let rho = matrix_from_json(&read_file(&input.rho)?)
        .and_then(|m| DensityMatrix::new(m.as_matrix().clone()))
        .map_err(|e| context(&input.rho, e))?;
    let a = matrix_from_json(&read_file(&input.obs)?)
        .and_then(|m| HermitianOperator::new(m.as_matrix().clone()))
        .map_err(|e| context(&input.obs, e))?;
    if rho.dim() != a.dim() {
        return Err(Failure::Compute(format!(
            "state is {0}x{0} but observable is {1}x{1}",
            rho.dim(),
            a.dim()
        )));
    }
    Ok((rho, a))
}

fn pretty(value: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(value).expect("serializable output")
}

fn lookup_mean(name: Option<&str>, quantity: Quantity) -> Result<MeanFunction, Failure> {
    let name = name.ok_or_else(|| Failure::Usage(format!("{} requires --mean", quantity.key())))?;
    MeanCatalog::standard()
        .get(name)
        .cloned()
        .map_err(|e| Failure::Usage(e.to_string()))
}

fn compute(quantity: Quantity, input: &PairInput, mean: Option<&str>, raw: bool) -> Outcome {
    let needs_mean = matches!(quantity, Quantity::GenVar | Quantity::GenQfi);
    if !needs_mean && (mean.is_some() || raw) {
        return Err(Failure::Usage(format!("--mean and --raw only apply to gen-var and gen-qfi, not {}", quantity.key())));
    }
    let mean = needs_mean.then(|| lookup_mean(mean, quantity)).transpose()?;
    let (rho, a) = load_pair(input)?;
    let value = match (quantity, &mean) {
        (Quantity::Variance, _) => variance(&rho, &a)?,
        (Quantity::Qfi, _) => qfi_bc(&rho, &a)?,
        (Quantity::Skew, _) => skew_information(&rho, &a)?,
        (Quantity::GenVar, Some(m)) => generalized_variance(&rho, &a, m, !raw)?,
        (Quantity::GenQfi, Some(m)) => generalized_qfi(&rho, &a, m, !raw)?,
        _ => unreachable!("mean resolved above"),
    };
    let mut out = json!({ quantity.key(): value });
    if let Some(m) = &mean {
        out["mean"] = json!(m.name());
        out["normalized"] = json!(!raw);
    }
    Ok((pretty(&out), true))
}

fn roof(kind: RoofKind, input: &PairInput, decomposition: Option<&Path>) -> Outcome {
    match (kind, decomposition) {
        (RoofKind::Verify, None) => return Err(Failure::Usage("roof verify requires --decomposition".into())),
        (RoofKind::Concave | RoofKind::Theorem2, Some(_)) => {
            return Err(Failure::Usage("--decomposition only applies to roof verify".into()))
        }
        _ => {}
    }
    let (rho, a) = load_pair(input)?;
    match kind {
        RoofKind::Concave => Ok((concave_roof_decomposition(&rho, &a)?.to_json()?, true)),
        RoofKind::Theorem2 => Ok((theorem2_decomposition(&rho, &a)?.to_json()?, true)),
        RoofKind::Verify => {
            let path = decomposition.expect("checked above");
            let decomp = PureDecomposition::from_json(&read_file(path)?)
                .map_err(|e| Failure::Compute(format!("{}: {e}", path.display())))?;
            let report = verify_decomposition(&decomp, &rho, &a)?;
            Ok((pretty(&report), report.valid))
        }
    }
}

fn bound(kind: BoundChoice, input: &PairInput, parties: Option<usize>, tolerance: f64, dump: Option<&Path>) -> Outcome {
    let n = match (kind, parties) {
        (BoundChoice::Sppt, Some(_)) => return Err(Failure::Usage("--parties only applies to se".into())),
        (BoundChoice::Sppt, None) => 2,
        (BoundChoice::Se, Some(n)) if n < 3 => {
            return Err(Failure::Usage(format!("se needs at least 3 parties (got {n})")))
        }
        (BoundChoice::Se, n) => n.unwrap_or(3),
    };
    if !(tolerance.is_finite() && tolerance > 0.0) {
        return Err(Failure::Usage(format!("tolerance must be positive (got {tolerance})")));
    }
    let (rho, a) = load_pair(input)?;
    if let Some(path) = dump {
        let problem = if n == 2 { build_sppt_problem(&rho, &a)? } else { build_se_problem(&rho, &a, n)? };
        write_file(path, &pretty(&problem.dump()))?;
    }
    let result = if n == 2 { bound_sppt(&rho, &a, tolerance)? } else { bound_se(&rho, &a, n, tolerance)? };
    let w = &result.witness;
    let out = json!({
        "bound": result.value,
        "kind": if n == 2 { BoundKind::Sppt } else { BoundKind::Se(n) },
        "status": w.status,
        "dual_objective": w.dual_objective,
        "gap": w.gap,
        "primal_residual": w.primal_residual,
        "dual_residual": w.dual_residual,
        "iterations": w.iterations,
        "support_rank": result.support.as_ref().map(|v| v.ncols()),
    });
    Ok((pretty(&out), w.status != SolveStatus::Infeasible))
}

fn experiment(kind: &Experiment, format: Format) -> Outcome {
    match kind {
        Experiment::Table { d, bound, zero_diagonal, trials, seed, tolerance, log } => {
            let bound: BoundKind = bound.parse().map_err(|e: fisher_roof::Error| Failure::Usage(e.to_string()))?;
            let config = TrialConfig {
                local_dim: *d,
                bound,
                zero_diagonal: *zero_diagonal,
                trials: *trials,
                seed: *seed,
                tolerance: *tolerance,
            };
            config.validate().map_err(|e| Failure::Usage(e.to_string()))?;
            let records = run_trials(&config)?;
            if let Some(path) = log {
                write_file(path, &trial_log(&records, format))?;
            }
            let summary = summarize(&records);
            let text = match format {
                Format::Json => pretty(&json!({
                    "build": env!("FISHER_ROOF_BUILD"),
                    "config": config,
                    "summary": summary,
                    "exclusion": format!(
                        "trials with qfi <= {DEGENERATE_QFI:e} are excluded from the statistics and counted as degenerate; \
                         trials without an optimal solve are counted as failures"
                    ),
                })),
                Format::Csv => {
                    let mut s = String::from(
                        "d,bound,zero_diagonal,trials,seed,tolerance,counted,largest,average,std_dev,degenerate,failures,build\n",
                    );
                    let _ = writeln!(
                        s,
                        "{},{},{},{},{},{:e},{},{:e},{:e},{:e},{},{},{}",
                        config.local_dim,
                        config.bound,
                        config.zero_diagonal,
                        summary.trials,
                        config.seed,
                        config.tolerance,
                        summary.counted,
                        summary.largest,
                        summary.average,
                        summary.std_dev,
                        summary.degenerate,
                        summary.failures,
                        env!("FISHER_ROOF_BUILD"),
                    );
                    s
                }
            };
            Ok((text, true))
        }
        Experiment::Conjecture { d, trials, seed, decompositions } => {
            if *trials == 0 || *decompositions == 0 {
                return Err(Failure::Usage("--trials and --decompositions must be at least 1".into()));
            }
            if !(1..=4).contains(d) {
                return Err(Failure::Usage(format!("d must be between 1 and 4 (got {d})")));
            }
            let mut rng = trial_rng(*seed, 0);
            let report = conjecture_monitor_with(*trials, *d, *decompositions, &mut rng)?;
            let out = json!({
                "build": env!("FISHER_ROOF_BUILD"),
                "config": { "d": d, "trials": trials, "seed": seed, "decompositions": decompositions },
                "report": report,
            });
            Ok((pretty(&out), report.guaranteed_violations == 0))
        }
    }
}

fn trial_log(records: &[TrialRecord], format: Format) -> String {
    let mut s = String::new();
    match format {
        Format::Json => {
            for r in records {
                s.push_str(&serde_json::to_string(r).expect("serializable record"));
                s.push('\n');
            }
        }
        Format::Csv => {
            s.push_str("trial,qfi,bound,relative_difference,status,iterations,gap\n");
            let opt = |x: Option<f64>| x.map(|v| format!("{v:e}")).unwrap_or_default();
            for r in records {
                let status = serde_json::to_value(r.status).ok().and_then(|v| v.as_str().map(String::from));
                let _ = writeln!(
                    s,
                    "{},{:e},{},{},{},{},{}",
                    r.trial,
                    r.qfi,
                    opt(r.bound),
                    opt(r.relative_difference),
                    status.unwrap_or_default(),
                    r.iterations,
                    opt(r.gap),
                );
            }
        }
    }
    s
}
