//! File formats: strategy JSON, optimizer config JSON, the density-matrix
//! and Bloch-form JSON schemas, and the CSV exports.
//!
//! Strategy files carry keys `x0, x1, y0, y1` (arrays of 3) and `M`, `N`
//! (3×3 row-major arrays). Density matrices serialize as
//! `{"re": [[...]], "im": [[...]]}` row-major; Bloch forms as
//! `{"r": [...], "s": [...], "T": [[...]]}`. Convergence traces export as
//! `iteration,best_value` CSV; scans as
//! `p,q,pq,violates_paper,violates_trace,ab_entangled,bc_entangled`.

use std::fs;
use std::path::Path;

use bilocal_core::num_complex::Complex64;
use serde::Deserialize;

use bilocal_core::correlations::MeasurementStrategy;
use bilocal_core::experiments::PqCell;
use bilocal_core::matrix::Matrix;
use bilocal_core::optimizer::{PsoConfig, TracePoint};
use bilocal_core::qstate::{BlochForm, TwoQubitState};

use crate::error::CliError;
use crate::output::{fmt_sig, Json, RESULT_DIGITS};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct StrategyFile {
    x0: [f64; 3],
    x1: [f64; 3],
    y0: [f64; 3],
    y1: [f64; 3],
    #[serde(rename = "M")]
    m: [[f64; 3]; 3],
    #[serde(rename = "N")]
    n: [[f64; 3]; 3],
}

/// Reads a strategy JSON file. Parse failures are usage errors (exit 2);
/// constraint checking happens later, at evaluation time.
pub fn read_strategy(path: &Path) -> Result<MeasurementStrategy, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let file: StrategyFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("invalid strategy file {}: {e}", path.display())))?;
    Ok(MeasurementStrategy {
        x0: file.x0,
        x1: file.x1,
        y0: file.y0,
        y1: file.y1,
        m: file.m,
        n: file.n,
    })
}

/// Renders a strategy as the same JSON schema `read_strategy` accepts.
pub fn strategy_json(strategy: &MeasurementStrategy) -> String {
    let rows = |c: &[[f64; 3]; 3]| {
        Json::Arr(c.iter().map(|row| Json::num_array(row.iter().copied())).collect())
    };
    Json::Obj(vec![
        ("x0", Json::num_array(strategy.x0)),
        ("x1", Json::num_array(strategy.x1)),
        ("y0", Json::num_array(strategy.y0)),
        ("y1", Json::num_array(strategy.y1)),
        ("M", rows(&strategy.m)),
        ("N", rows(&strategy.n)),
    ])
    .render()
}

/// Optimizer configuration file mirroring [`PsoConfig`] field names; every
/// field is optional and defaults to the standard settings.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default = "defaults::swarm_size")]
    swarm_size: usize,
    #[serde(default = "defaults::iterations")]
    iterations: usize,
    #[serde(default = "defaults::omega")]
    omega: f64,
    #[serde(default = "defaults::beta1")]
    beta1: f64,
    #[serde(default = "defaults::beta2")]
    beta2: f64,
    #[serde(default = "defaults::vmax")]
    vmax: f64,
    #[serde(default = "defaults::ring_radius")]
    ring_radius: usize,
    #[serde(default = "defaults::resamples")]
    resamples: usize,
    #[serde(default)]
    seed: u64,
}

mod defaults {
    use bilocal_core::optimizer::PsoConfig;

    pub fn swarm_size() -> usize {
        PsoConfig::default().swarm_size
    }
    pub fn iterations() -> usize {
        PsoConfig::default().iterations
    }
    pub fn omega() -> f64 {
        PsoConfig::default().omega
    }
    pub fn beta1() -> f64 {
        PsoConfig::default().beta1
    }
    pub fn beta2() -> f64 {
        PsoConfig::default().beta2
    }
    pub fn vmax() -> f64 {
        PsoConfig::default().vmax
    }
    pub fn ring_radius() -> usize {
        PsoConfig::default().ring_radius
    }
    pub fn resamples() -> usize {
        PsoConfig::default().resamples
    }
}

/// Reads an optimizer config file, or returns the defaults when no path is
/// given.
pub fn read_config(path: Option<&Path>) -> Result<PsoConfig, CliError> {
    let Some(path) = path else {
        return Ok(PsoConfig::default());
    };
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let file: ConfigFile = serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("invalid config file {}: {e}", path.display())))?;
    Ok(PsoConfig {
        swarm_size: file.swarm_size,
        iterations: file.iterations,
        omega: file.omega,
        beta1: file.beta1,
        beta2: file.beta2,
        vmax: file.vmax,
        ring_radius: file.ring_radius,
        resamples: file.resamples,
        seed: file.seed,
    })
}

/// Density matrix as `{"re": [[...]], "im": [[...]]}`, row-major.
pub fn state_json(state: &TwoQubitState) -> String {
    matrix_json(state.matrix())
}

/// Any complex matrix in the same `{"re", "im"}` schema.
pub fn matrix_json(m: &Matrix) -> String {
    let part = |f: fn(&Complex64) -> f64| {
        Json::Arr(
            (0..m.dim())
                .map(|i| Json::state_array((0..m.dim()).map(|j| f(&m[(i, j)]))))
                .collect(),
        )
    };
    Json::Obj(vec![("re", part(|z| z.re)), ("im", part(|z| z.im))]).render()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixFile {
    re: Vec<Vec<f64>>,
    im: Vec<Vec<f64>>,
}

/// Parses the `{"re", "im"}` schema back into a matrix.
pub fn matrix_from_json(text: &str) -> Result<Matrix, CliError> {
    let file: MatrixFile =
        serde_json::from_str(text).map_err(|e| CliError::Usage(format!("invalid matrix: {e}")))?;
    let dim = file.re.len();
    if dim == 0 || file.im.len() != dim {
        return Err(CliError::Usage("re and im must be square and equal-sized".into()));
    }
    let mut m = Matrix::zeros(dim);
    for i in 0..dim {
        if file.re[i].len() != dim || file.im[i].len() != dim {
            return Err(CliError::Usage("re and im must be square and equal-sized".into()));
        }
        for j in 0..dim {
            m[(i, j)] = Complex64::new(file.re[i][j], file.im[i][j]);
        }
    }
    Ok(m)
}

/// Parses and validates a density matrix from the `{"re", "im"}` schema.
pub fn state_from_json(text: &str) -> Result<TwoQubitState, CliError> {
    TwoQubitState::new(matrix_from_json(text)?).map_err(CliError::usage)
}

/// Bloch form as `{"r": [...], "s": [...], "T": [[...]]}`.
pub fn bloch_json(bf: &BlochForm) -> String {
    Json::Obj(vec![
        ("r", Json::state_array(bf.r)),
        ("s", Json::state_array(bf.s)),
        (
            "T",
            Json::Arr(bf.t.iter().map(|row| Json::state_array(row.iter().copied())).collect()),
        ),
    ])
    .render()
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BlochFile {
    r: [f64; 3],
    s: [f64; 3],
    #[serde(rename = "T")]
    t: [[f64; 3]; 3],
}

/// Parses the Bloch-form schema.
pub fn bloch_from_json(text: &str) -> Result<BlochForm, CliError> {
    let file: BlochFile = serde_json::from_str(text)
        .map_err(|e| CliError::Usage(format!("invalid Bloch form: {e}")))?;
    Ok(BlochForm {
        r: file.r,
        s: file.s,
        t: file.t,
    })
}

/// Convergence trace as `iteration,best_value` CSV.
pub fn convergence_csv(trace: &[TracePoint]) -> String {
    let mut out = String::from("iteration,best_value\n");
    for point in trace {
        out.push_str(&point.iteration.to_string());
        out.push(',');
        out.push_str(&fmt_sig(point.best_value, RESULT_DIGITS));
        out.push('\n');
    }
    out
}

/// Scan grid as
/// `p,q,pq,violates_paper,violates_trace,ab_entangled,bc_entangled` CSV.
pub fn scan_csv(cells: &[PqCell]) -> String {
    let mut out = String::from("p,q,pq,violates_paper,violates_trace,ab_entangled,bc_entangled\n");
    for cell in cells {
        let flag = |b: bool| if b { "true" } else { "false" };
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            fmt_sig(cell.p, RESULT_DIGITS),
            fmt_sig(cell.q, RESULT_DIGITS),
            fmt_sig(cell.p * cell.q, RESULT_DIGITS),
            flag(cell.violates_paper),
            flag(cell.violates_trace),
            flag(cell.ab_entangled),
            flag(cell.bc_entangled),
        ));
    }
    out
}

/// Scan grid as a JSON array of cell objects.
pub fn scan_json(cells: &[PqCell]) -> String {
    Json::Arr(cells.iter().map(cell_json).collect()).render()
}

fn cell_json(cell: &PqCell) -> Json {
    Json::Obj(vec![
        ("p", Json::num(cell.p)),
        ("q", Json::num(cell.q)),
        ("pq", Json::num(cell.p * cell.q)),
        ("violates_paper", Json::Bool(cell.violates_paper)),
        ("violates_trace", Json::Bool(cell.violates_trace)),
        ("ab_entangled", Json::Bool(cell.ab_entangled)),
        ("bc_entangled", Json::Bool(cell.bc_entangled)),
    ])
}
