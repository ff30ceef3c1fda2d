//! The bilocal correlators `I`, `J` and the inequality value
//! `S = sqrt(|I|) + sqrt(|J|)`, computed through three routes:
//!
//! - [`eval_trace`] — the ground-truth oracle: exact operator traces on the
//!   16-dimensional joint space ordered (Alice, Bob-left, Bob-right,
//!   Charles).
//! - [`eval_bloch_general`] — the contraction that follows from the trace
//!   definition, `I = Σ_ij m_ij [Σ_k u_k T_ki][Σ_l S_jl w_l]` with
//!   `u = x0 + x1`, `w = y0 + y1` (and the `x0 - x1`, `N`, `y0 - y1` analog
//!   for `J`). Agrees with [`eval_trace`] on all valid inputs.
//! - [`eval_factored`] — the closed-form contraction that factors the
//!   Alice-side and Charles-side sums into independent brackets,
//!   `I = [Σ_k u_k (T·mrow)_k] · [Σ_k (S·w)_k]` with `mrow_i = Σ_j m_ij`.
//!   On Werner forms it specializes exactly to `I = pq·I'`, `J = pq·J'`
//!   (see [`eval_werner_prime`]); it is *not* equal to the trace oracle in
//!   general, and the audit reports the gap.
//!
//! Strategy validation is centralized in
//! [`MeasurementStrategy::validate`]; each route has a `*_unchecked` twin
//! for audit paths that must evaluate constraint-violating inputs as-is.

use thiserror::Error;

use crate::float;
use crate::qstate::{bob_observable, qubit_observable, CoeffMatrix, TwoQubitState, Vector3};
use crate::qstate::{spectral_radius, BlochForm};

const UNIT_NORM_TOL: f64 = 1e-9;
const SPECTRAL_TOL: f64 = 1e-9;

/// A measurement-strategy constraint that failed validation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConstraintViolation {
    /// One of the four direction vectors is not unit length.
    #[error("{label} must be unit length, got |{label}| = {norm}")]
    UnitNorm {
        /// Which vector (`x0`, `x1`, `y0`, `y1`).
        label: &'static str,
        /// Its actual Euclidean norm.
        norm: f64,
    },
    /// A joint-observable coefficient matrix exceeds the eigenvalue bound.
    #[error("eigenvalues of the {label} observable must lie in [-1, 1], got spectral radius {radius}")]
    SpectralRadius {
        /// Which coefficient matrix (`M`, `N`).
        label: &'static str,
        /// Spectral radius of the observable it defines.
        radius: f64,
    },
}

/// `pq_threshold` requires a positive `S'`.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("S' must be positive, got {0}")]
pub struct NonPositiveSprime(pub f64);

/// The tuple of measurement settings the inequality value is optimized
/// over: Alice's two observable directions, Charles's two directions, and
/// Bob's two joint-observable coefficient matrices.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementStrategy {
    /// Alice's first observable direction (`a_0 = x0·σ`).
    pub x0: Vector3,
    /// Alice's second observable direction.
    pub x1: Vector3,
    /// Charles's first observable direction.
    pub y0: Vector3,
    /// Charles's second observable direction.
    pub y1: Vector3,
    /// Coefficients of Bob's first joint observable `b_0`.
    pub m: CoeffMatrix,
    /// Coefficients of Bob's second joint observable `b_1`.
    pub n: CoeffMatrix,
}

impl MeasurementStrategy {
    /// Checks the strategy invariants: the four direction vectors are unit
    /// length within `1e-9` and the eigenvalues of `b_0`, `b_1` lie in
    /// `[-1, 1]` within `1e-9`.
    pub fn validate(&self) -> Result<(), ConstraintViolation> {
        for (label, v) in [
            ("x0", &self.x0),
            ("x1", &self.x1),
            ("y0", &self.y0),
            ("y1", &self.y1),
        ] {
            let norm = norm3(*v);
            if float::abs(norm - 1.0) > UNIT_NORM_TOL {
                return Err(ConstraintViolation::UnitNorm { label, norm });
            }
        }
        for (label, c) in [("M", &self.m), ("N", &self.n)] {
            let radius = spectral_radius(&bob_observable(c));
            if radius > 1.0 + SPECTRAL_TOL {
                return Err(ConstraintViolation::SpectralRadius { label, radius });
            }
        }
        Ok(())
    }
}

/// The correlators and the inequality value for one evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationResult {
    /// `I = ⟨(a0 + a1) b0 (c0 + c1)⟩`.
    pub i: f64,
    /// `J = ⟨(a0 - a1) b1 (c0 - c1)⟩`.
    pub j: f64,
    /// `S = sqrt(|I|) + sqrt(|J|)`.
    pub s: f64,
}

impl CorrelationResult {
    fn from_ij(i: f64, j: f64) -> Self {
        Self {
            i,
            j,
            s: s_value(i, j),
        }
    }
}

/// The `p, q`-independent Werner factors `I'`, `J'` and
/// `S' = sqrt(|I'|) + sqrt(|J'|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WernerPrime {
    /// Alice-bracket × Charles-bracket factor for `I = pq·I'`.
    pub iprime: f64,
    /// The analogous factor for `J = pq·J'`.
    pub jprime: f64,
    /// `sqrt(|I'|) + sqrt(|J'|)`.
    pub sprime: f64,
}

/// `S = sqrt(|I|) + sqrt(|J|)`.
pub fn s_value(i: f64, j: f64) -> f64 {
    float::sqrt(float::abs(i)) + float::sqrt(float::abs(j))
}

/// The visibility product above which `sqrt(pq)·S' > 2`: returns
/// `(2 / S')²`.
pub fn pq_threshold(sprime: f64) -> Result<f64, NonPositiveSprime> {
    if sprime > 0.0 {
        Ok((2.0 / sprime) * (2.0 / sprime))
    } else {
        Err(NonPositiveSprime(sprime))
    }
}

/// Ground-truth oracle: `I = Tr[((a0+a1) ⊗ b0 ⊗ (c0+c1)) (ρ_AB ⊗ ρ_BC)]`
/// and the `J` analog, evaluated as exact 16×16 operator traces.
pub fn eval_trace(
    strategy: &MeasurementStrategy,
    rho_ab: &TwoQubitState,
    rho_bc: &TwoQubitState,
) -> Result<CorrelationResult, ConstraintViolation> {
    strategy.validate()?;
    Ok(eval_trace_unchecked(strategy, rho_ab, rho_bc))
}

/// [`eval_trace`] without strategy validation, for audit paths.
pub fn eval_trace_unchecked(
    strategy: &MeasurementStrategy,
    rho_ab: &TwoQubitState,
    rho_bc: &TwoQubitState,
) -> CorrelationResult {
    let joint = rho_ab.matrix().kron(rho_bc.matrix());
    let a_plus = qubit_observable(add3(strategy.x0, strategy.x1));
    let a_minus = qubit_observable(sub3(strategy.x0, strategy.x1));
    let c_plus = qubit_observable(add3(strategy.y0, strategy.y1));
    let c_minus = qubit_observable(sub3(strategy.y0, strategy.y1));
    let i = a_plus
        .kron(&bob_observable(&strategy.m))
        .kron(&c_plus)
        .mul_trace(&joint)
        .re;
    let j = a_minus
        .kron(&bob_observable(&strategy.n))
        .kron(&c_minus)
        .mul_trace(&joint)
        .re;
    CorrelationResult::from_ij(i, j)
}

/// Trace-derived Bloch contraction; identical to [`eval_trace`] on the
/// composed states, within round-off.
pub fn eval_bloch_general(
    strategy: &MeasurementStrategy,
    bf_ab: &BlochForm,
    bf_bc: &BlochForm,
) -> Result<CorrelationResult, ConstraintViolation> {
    strategy.validate()?;
    Ok(eval_bloch_general_unchecked(strategy, bf_ab, bf_bc))
}

/// [`eval_bloch_general`] without strategy validation, for audit paths.
pub fn eval_bloch_general_unchecked(
    strategy: &MeasurementStrategy,
    bf_ab: &BlochForm,
    bf_bc: &BlochForm,
) -> CorrelationResult {
    let i = bloch_contraction(
        add3(strategy.x0, strategy.x1),
        &strategy.m,
        add3(strategy.y0, strategy.y1),
        bf_ab,
        bf_bc,
    );
    let j = bloch_contraction(
        sub3(strategy.x0, strategy.x1),
        &strategy.n,
        sub3(strategy.y0, strategy.y1),
        bf_ab,
        bf_bc,
    );
    CorrelationResult::from_ij(i, j)
}

/// `Σ_ij c_ij [Σ_k u_k T_ki] [Σ_l S_jl w_l]`.
fn bloch_contraction(
    u: Vector3,
    coeffs: &CoeffMatrix,
    w: Vector3,
    bf_ab: &BlochForm,
    bf_bc: &BlochForm,
) -> f64 {
    // Alice side: (uᵀ T)_i; Charles side: (S w)_j.
    let mut ut = [0.0; 3];
    let mut sw = [0.0; 3];
    for i in 0..3 {
        for k in 0..3 {
            ut[i] += u[k] * bf_ab.t[k][i];
            sw[i] += bf_bc.t[i][k] * w[k];
        }
    }
    let mut acc = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            acc += coeffs[i][j] * ut[i] * sw[j];
        }
    }
    acc
}

/// Closed-form contraction with independent Alice and Charles brackets:
/// `I = [Σ_k u_k (T·mrow)_k] · [Σ_k (S·w)_k]` with row sums
/// `mrow_i = Σ_j m_ij`, and the `J` analog. On Werner Bloch forms this
/// equals `(pq·I', pq·J')` exactly; in general it differs from the trace
/// oracle (see the crate docs and [`eval_werner_prime`]).
pub fn eval_factored(
    strategy: &MeasurementStrategy,
    bf_ab: &BlochForm,
    bf_bc: &BlochForm,
) -> Result<CorrelationResult, ConstraintViolation> {
    strategy.validate()?;
    Ok(eval_factored_unchecked(strategy, bf_ab, bf_bc))
}

/// [`eval_factored`] without strategy validation, for audit paths.
pub fn eval_factored_unchecked(
    strategy: &MeasurementStrategy,
    bf_ab: &BlochForm,
    bf_bc: &BlochForm,
) -> CorrelationResult {
    let i = factored_contraction(
        add3(strategy.x0, strategy.x1),
        &strategy.m,
        add3(strategy.y0, strategy.y1),
        bf_ab,
        bf_bc,
    );
    let j = factored_contraction(
        sub3(strategy.x0, strategy.x1),
        &strategy.n,
        sub3(strategy.y0, strategy.y1),
        bf_ab,
        bf_bc,
    );
    CorrelationResult::from_ij(i, j)
}

fn factored_contraction(
    u: Vector3,
    coeffs: &CoeffMatrix,
    w: Vector3,
    bf_ab: &BlochForm,
    bf_bc: &BlochForm,
) -> f64 {
    let rows = row_sums(coeffs);
    let mut alice = 0.0;
    let mut charles = 0.0;
    for k in 0..3 {
        for i in 0..3 {
            alice += u[k] * bf_ab.t[k][i] * rows[i];
            charles += bf_bc.t[k][i] * w[i];
        }
    }
    alice * charles
}

/// The Werner closed forms `I'`, `J'`, `S'`: on `werner(p) × werner(q)` the
/// factored contraction gives `I = pq·I'` and `J = pq·J'`, so
/// `S = sqrt(pq)·S'`.
pub fn eval_werner_prime(
    strategy: &MeasurementStrategy,
) -> Result<WernerPrime, ConstraintViolation> {
    strategy.validate()?;
    Ok(eval_werner_prime_unchecked(strategy))
}

/// [`eval_werner_prime`] without strategy validation, for audit paths.
pub fn eval_werner_prime_unchecked(strategy: &MeasurementStrategy) -> WernerPrime {
    // T = diag(p, -p, p) contracts each bracket to its η-weighted sum with
    // η = (1, -1, 1); the p, q factors divide out.
    const ETA: Vector3 = [1.0, -1.0, 1.0];
    let u = add3(strategy.x0, strategy.x1);
    let v = sub3(strategy.x0, strategy.x1);
    let w = add3(strategy.y0, strategy.y1);
    let wm = sub3(strategy.y0, strategy.y1);
    let mrow = row_sums(&strategy.m);
    let nrow = row_sums(&strategy.n);
    let bracket = |a: Vector3, b: Vector3| -> f64 {
        (0..3).map(|k| ETA[k] * a[k] * b[k]).sum()
    };
    let eta_sum = |a: Vector3| -> f64 { (0..3).map(|k| ETA[k] * a[k]).sum() };
    let iprime = bracket(u, mrow) * eta_sum(w);
    let jprime = bracket(v, nrow) * eta_sum(wm);
    WernerPrime {
        iprime,
        jprime,
        sprime: s_value(iprime, jprime),
    }
}

/// The strategy behind `S = 2·sqrt(2pq)`: `a_x = (σ3 ± σ1)/√2`,
/// `c_z = (σ3 ± σ1)/√2`, `b_0 = σ3⊗σ3`, `b_1 = σ1⊗σ1`.
pub fn canonical_strategy() -> MeasurementStrategy {
    let inv_sqrt2 = 1.0 / float::sqrt(2.0);
    let mut m = [[0.0; 3]; 3];
    let mut n = [[0.0; 3]; 3];
    m[2][2] = 1.0;
    n[0][0] = 1.0;
    MeasurementStrategy {
        x0: [inv_sqrt2, 0.0, inv_sqrt2],
        x1: [-inv_sqrt2, 0.0, inv_sqrt2],
        y0: [inv_sqrt2, 0.0, inv_sqrt2],
        y1: [-inv_sqrt2, 0.0, inv_sqrt2],
        m,
        n,
    }
}

fn add3(a: Vector3, b: Vector3) -> Vector3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn sub3(a: Vector3, b: Vector3) -> Vector3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn row_sums(c: &CoeffMatrix) -> Vector3 {
    [
        c[0][0] + c[0][1] + c[0][2],
        c[1][0] + c[1][1] + c[1][2],
        c[2][0] + c[2][1] + c[2][2],
    ]
}

fn norm3(v: Vector3) -> f64 {
    float::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2])
}
