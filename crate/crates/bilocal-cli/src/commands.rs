//! The four workflows behind the CLI subcommands. Each returns the unit on
//! success; failures carry their exit code (2 usage, 3 constraint). Data
//! goes to `--out` or stdout; human-readable summaries go to stderr so
//! piped output stays clean.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use bilocal_core::correlations::{
    eval_bloch_general_unchecked, eval_factored_unchecked, eval_trace_unchecked,
    eval_werner_prime_unchecked, pq_threshold, CorrelationResult, MeasurementStrategy,
};
use bilocal_core::experiments::{
    audit_reported, reported_strategy, run_sprime_experiment, scan_pq, AuditReport,
};
use bilocal_core::qstate::{werner, BlochForm, WernerParam};

use crate::error::CliError;
use crate::formats::{convergence_csv, read_strategy, scan_csv, scan_json, strategy_json};
use crate::output::{fmt_sig, Json, RESULT_DIGITS};

/// Output format for the scan subcommand.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanFormat {
    /// `p,q,pq,...` CSV rows.
    Csv,
    /// JSON array of cell objects.
    Json,
}

fn visibility(label: &str, value: f64) -> Result<WernerParam, CliError> {
    WernerParam::new(value)
        .map_err(|_| CliError::Usage(format!("{label} must lie in [0, 1], got {value}")))
}

fn write_output(out: Option<&Path>, content: &str) -> Result<(), CliError> {
    match out {
        Some(path) => {
            fs::write(path, content)
                .map_err(|e| CliError::Usage(format!("cannot write {}: {e}", path.display())))?;
        }
        None => {
            print!("{content}");
            std::io::stdout().flush()?;
        }
    }
    Ok(())
}

fn correlation_json(result: &CorrelationResult) -> Json {
    Json::Obj(vec![
        ("I", Json::num(result.i)),
        ("J", Json::num(result.j)),
        ("S", Json::num(result.s)),
    ])
}

/// `eval`: all three evaluation routes plus the Werner factors for one
/// strategy on `werner(p) × werner(q)`.
pub fn cmd_eval(
    strategy_path: &Path,
    p: f64,
    q: f64,
    no_project_audit: bool,
    out: Option<&Path>,
) -> Result<(), CliError> {
    let strategy = read_strategy(strategy_path)?;
    let (wp, wq) = (visibility("p", p)?, visibility("q", q)?);
    if !no_project_audit {
        strategy
            .validate()
            .map_err(|e| CliError::Constraint(e.to_string()))?;
    }
    let (rho_ab, rho_bc) = (werner(wp), werner(wq));
    let (bf_ab, bf_bc) = (BlochForm::werner(wp), BlochForm::werner(wq));
    let trace = eval_trace_unchecked(&strategy, &rho_ab, &rho_bc);
    let bloch = eval_bloch_general_unchecked(&strategy, &bf_ab, &bf_bc);
    let factored = eval_factored_unchecked(&strategy, &bf_ab, &bf_bc);
    let prime = eval_werner_prime_unchecked(&strategy);
    let doc = Json::Obj(vec![
        ("p", Json::num(p)),
        ("q", Json::num(q)),
        ("trace", correlation_json(&trace)),
        ("bloch", correlation_json(&bloch)),
        ("paper_formula", correlation_json(&factored)),
        (
            "werner_prime",
            Json::Obj(vec![
                ("Iprime", Json::num(prime.iprime)),
                ("Jprime", Json::num(prime.jprime)),
                ("Sprime", Json::num(prime.sprime)),
            ]),
        ),
    ]);
    write_output(out, &doc.render())
}

/// `optimize`: maximizes `S'`, writes `convergence.csv` and
/// `best_strategy.json` into the output directory, and summarizes the
/// final value and visibility threshold.
pub fn cmd_optimize(
    config_path: Option<&Path>,
    seed: Option<u64>,
    iterations: Option<usize>,
    out_dir: &Path,
) -> Result<(), CliError> {
    let mut config = crate::formats::read_config(config_path)?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    if let Some(iterations) = iterations {
        config.iterations = iterations;
    }
    config.validate().map_err(CliError::usage)?;

    let experiment = run_sprime_experiment(&config).map_err(CliError::usage)?;

    fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Usage(format!("cannot create {}: {e}", out_dir.display())))?;
    let csv_path = out_dir.join("convergence.csv");
    let strategy_path = out_dir.join("best_strategy.json");
    fs::write(&csv_path, convergence_csv(&experiment.trace))?;
    fs::write(&strategy_path, strategy_json(&experiment.strategy))?;

    let threshold = pq_threshold(experiment.sprime_max)
        .map(|t| fmt_sig(t, RESULT_DIGITS))
        .unwrap_or_else(|_| "undefined".to_string());
    println!("sprime_max = {}", fmt_sig(experiment.sprime_max, RESULT_DIGITS));
    println!("pq_threshold = {threshold}");
    eprintln!(
        "wrote {} and {}",
        csv_path.display(),
        strategy_path.display()
    );
    Ok(())
}

/// `audit`: the full report on the bundled reference strategy at `(p, q)`.
pub fn cmd_audit(p: f64, q: f64, out: Option<&Path>) -> Result<(), CliError> {
    let report = audit_reported(p, q).map_err(CliError::usage)?;
    write_output(out, &audit_json(&report).render())
}

fn audit_json(report: &AuditReport) -> Json {
    Json::Obj(vec![
        ("p", Json::num(report.p)),
        ("q", Json::num(report.q)),
        ("sprime_paper", Json::num(report.sprime_paper)),
        ("iprime", Json::num(report.iprime)),
        ("jprime", Json::num(report.jprime)),
        ("s_trace", Json::num(report.s_trace)),
        ("spectral_radius_m", Json::num(report.spectral_radius_m)),
        ("spectral_radius_n", Json::num(report.spectral_radius_n)),
        ("rank1_residual_m", Json::num(report.rank1_residual_m)),
        ("rank1_residual_n", Json::num(report.rank1_residual_n)),
        ("formula_gap", Json::num(report.formula_gap)),
        ("violates_paper", Json::Bool(report.violates_paper)),
        ("ab_entangled", Json::Bool(report.ab_entangled)),
        ("bc_entangled", Json::Bool(report.bc_entangled)),
    ])
}

/// `scan`: classifies a uniform grid over the `(p, q)` unit square and
/// reports how many cells violate the closed-form bound with exactly one
/// entangled source.
pub fn cmd_scan(
    sprime: Option<f64>,
    steps: usize,
    strategy_path: Option<&Path>,
    format: ScanFormat,
    out: Option<&Path>,
) -> Result<(), CliError> {
    if steps < 2 {
        return Err(CliError::Usage(format!(
            "steps must be at least 2, got {steps}"
        )));
    }
    let strategy: MeasurementStrategy = match strategy_path {
        Some(path) => read_strategy(path)?,
        None => reported_strategy(),
    };
    let sprime = match sprime {
        Some(value) if value > 0.0 => value,
        Some(value) => {
            return Err(CliError::Usage(format!(
                "sprime must be positive, got {value}"
            )));
        }
        // Default: the closed-form S' of the strategy being scanned.
        None => eval_werner_prime_unchecked(&strategy).sprime,
    };
    let cells = scan_pq(sprime, steps, &strategy).map_err(CliError::usage)?;
    let rendered = match format {
        ScanFormat::Csv => scan_csv(&cells),
        ScanFormat::Json => scan_json(&cells),
    };
    write_output(out, &rendered)?;
    let mixed_violations = cells
        .iter()
        .filter(|c| c.violates_paper && (c.ab_entangled != c.bc_entangled))
        .count();
    eprintln!(
        "{} of {} cells violate sqrt(pq)*S' > 2 with exactly one entangled source (S' = {})",
        mixed_violations,
        cells.len(),
        fmt_sig(sprime, RESULT_DIGITS),
    );
    Ok(())
}

/// Resolves an output directory argument, defaulting to the current
/// directory.
pub fn resolve_out_dir(out: Option<PathBuf>) -> PathBuf {
    out.unwrap_or_else(|| PathBuf::from("."))
}
