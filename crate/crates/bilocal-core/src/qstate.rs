//! Two-qubit density-matrix algebra: Pauli basis, Bloch decomposition and
//! composition, Werner states, observables built from Pauli coefficients,
//! and the PPT entanglement check (exact for two qubits).
//!
//! Conventions: σ1 = X, σ2 = Y, σ3 = Z in the computational basis |0⟩, |1⟩;
//! the first tensor factor of a state is the first party's qubit; the
//! correlation matrix is `T_ij = Tr(ρ σ_i ⊗ σ_j)` with the first index on
//! the first factor.

use alloc::vec::Vec;

use num_complex::Complex64;
use thiserror::Error;

use crate::float;
use crate::matrix::Matrix;

/// Real 3-vector of Pauli coefficients (`a = x·σ`).
pub type Vector3 = [f64; 3];

/// Real 3×3 coefficient matrix for a traceless two-qubit observable
/// `b = Σ c_ij σ_i ⊗ σ_j`.
pub type CoeffMatrix = [[f64; 3]; 3];

/// Violations of the two-qubit state invariants.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum StateError {
    /// Matrix differs from its conjugate transpose beyond tolerance.
    #[error("matrix is not Hermitian (defect {defect:e})")]
    NotHermitian {
        /// Largest entry-wise deviation from the conjugate transpose.
        defect: f64,
    },
    /// Trace differs from one beyond tolerance.
    #[error("trace is {trace}, expected 1")]
    NotUnitTrace {
        /// Actual trace (real part).
        trace: f64,
    },
    /// Negative eigenvalue beyond the round-off allowance.
    #[error("matrix is not positive semidefinite (min eigenvalue {min_eigenvalue:e})")]
    NotPositive {
        /// Smallest eigenvalue found.
        min_eigenvalue: f64,
    },
    /// Matrix is not 4×4.
    #[error("expected a 4x4 matrix, got {dim}x{dim}")]
    WrongDimension {
        /// Actual order.
        dim: usize,
    },
    /// Werner mixing weight outside `[0, 1]`.
    #[error("Werner parameter {0} is outside [0, 1]")]
    InvalidWernerParam(f64),
}

const HERMITICITY_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
// Absorbs floating-point round-off without accepting genuinely indefinite
// matrices.
const POSITIVITY_TOL: f64 = -1e-10;

/// Pauli matrix σ_i for `i ∈ {1, 2, 3}` (X, Y, Z).
///
/// Panics if `i` is outside `1..=3`.
pub fn pauli(i: usize) -> Matrix {
    let mut m = Matrix::zeros(2);
    match i {
        1 => {
            m[(0, 1)] = Complex64::ONE;
            m[(1, 0)] = Complex64::ONE;
        }
        2 => {
            m[(0, 1)] = Complex64::new(0.0, -1.0);
            m[(1, 0)] = Complex64::new(0.0, 1.0);
        }
        3 => {
            m[(0, 0)] = Complex64::ONE;
            m[(1, 1)] = -Complex64::ONE;
        }
        _ => panic!("Pauli index {i} out of range 1..=3"),
    }
    m
}

/// Werner mixing weight `p ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WernerParam(f64);

impl WernerParam {
    /// Validates `0 ≤ p ≤ 1`.
    pub fn new(p: f64) -> Result<Self, StateError> {
        if (0.0..=1.0).contains(&p) {
            Ok(Self(p))
        } else {
            Err(StateError::InvalidWernerParam(p))
        }
    }

    /// The weight value.
    pub fn value(self) -> f64 {
        self.0
    }
}

/// A validated two-qubit density matrix: 4×4 complex, Hermitian, unit trace,
/// positive semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitState {
    matrix: Matrix,
}

impl TwoQubitState {
    /// Validates and wraps a 4×4 matrix.
    pub fn new(matrix: Matrix) -> Result<Self, StateError> {
        if matrix.dim() != 4 {
            return Err(StateError::WrongDimension { dim: matrix.dim() });
        }
        let defect = matrix.hermiticity_defect();
        if defect > HERMITICITY_TOL {
            return Err(StateError::NotHermitian { defect });
        }
        let trace = matrix.trace();
        if float::abs(trace.re - 1.0) > TRACE_TOL || float::abs(trace.im) > TRACE_TOL {
            return Err(StateError::NotUnitTrace { trace: trace.re });
        }
        let min_eigenvalue = matrix.hermitian_eigenvalues()[0];
        if min_eigenvalue < POSITIVITY_TOL {
            return Err(StateError::NotPositive { min_eigenvalue });
        }
        Ok(Self { matrix })
    }

    /// Composes a Bloch form and validates positivity of the result.
    pub fn from_bloch(bf: &BlochForm) -> Result<Self, StateError> {
        Self::new(bloch_compose(bf))
    }

    /// The underlying density matrix.
    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }
}

/// Bloch representation of a two-qubit state: local Bloch vectors `r`, `s`
/// and the 3×3 correlation matrix `T`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochForm {
    /// First marginal Bloch vector, `r_i = Tr(ρ σ_i ⊗ I)`.
    pub r: Vector3,
    /// Second marginal Bloch vector, `s_j = Tr(ρ I ⊗ σ_j)`.
    pub s: Vector3,
    /// Correlation matrix, `t[i][j] = Tr(ρ σ_i ⊗ σ_j)`.
    pub t: [[f64; 3]; 3],
}

impl BlochForm {
    /// The Bloch form of `werner(p)`: zero marginals, `T = diag(p, -p, p)`.
    pub fn werner(p: WernerParam) -> Self {
        let p = p.value();
        Self {
            r: [0.0; 3],
            s: [0.0; 3],
            t: [[p, 0.0, 0.0], [0.0, -p, 0.0], [0.0, 0.0, p]],
        }
    }
}

/// The Werner state `p |φ+⟩⟨φ+| + (1-p) I/4` with
/// `|φ+⟩ = (|00⟩ + |11⟩)/√2`.
pub fn werner(p: WernerParam) -> TwoQubitState {
    let p = p.value();
    let mut m = Matrix::zeros(4);
    let half_p = Complex64::new(p / 2.0, 0.0);
    let quarter = Complex64::new((1.0 - p) / 4.0, 0.0);
    m[(0, 0)] = half_p + quarter;
    m[(3, 3)] = half_p + quarter;
    m[(0, 3)] = half_p;
    m[(3, 0)] = half_p;
    m[(1, 1)] = quarter;
    m[(2, 2)] = quarter;
    TwoQubitState { matrix: m }
}

/// Bloch decomposition of a valid state.
pub fn bloch_decompose(rho: &TwoQubitState) -> BlochForm {
    let id = Matrix::identity(2);
    let m = rho.matrix();
    let mut r = [0.0; 3];
    let mut s = [0.0; 3];
    let mut t = [[0.0; 3]; 3];
    for i in 0..3 {
        r[i] = pauli(i + 1).kron(&id).mul_trace(m).re;
        s[i] = id.kron(&pauli(i + 1)).mul_trace(m).re;
        for j in 0..3 {
            t[i][j] = pauli(i + 1).kron(&pauli(j + 1)).mul_trace(m).re;
        }
    }
    BlochForm { r, s, t }
}

/// Composes `ρ = ¼ (I⊗I + r·σ⊗I + I⊗s·σ + Σ T_ij σ_i⊗σ_j)`.
///
/// The result is Hermitian with unit trace by construction, but positivity
/// is not guaranteed for arbitrary `(r, s, T)`; use
/// [`TwoQubitState::from_bloch`] when a validated state is required.
pub fn bloch_compose(bf: &BlochForm) -> Matrix {
    let id = Matrix::identity(2);
    let mut m = id.kron(&id);
    for i in 0..3 {
        if bf.r[i] != 0.0 {
            m = m.add(&pauli(i + 1).kron(&id).scale(bf.r[i]));
        }
        if bf.s[i] != 0.0 {
            m = m.add(&id.kron(&pauli(i + 1)).scale(bf.s[i]));
        }
        for j in 0..3 {
            if bf.t[i][j] != 0.0 {
                m = m.add(&pauli(i + 1).kron(&pauli(j + 1)).scale(bf.t[i][j]));
            }
        }
    }
    m.scale(0.25)
}

/// Minimum eigenvalue of the partial transpose over the second qubit.
///
/// Negative iff the state is entangled (the PPT criterion is exact for
/// two qubits).
pub fn ppt_min_eigenvalue(rho: &TwoQubitState) -> f64 {
    let m = rho.matrix();
    let mut pt = Matrix::zeros(4);
    // Index (a, b) -> 2a + b; transposing the second factor swaps b and b'.
    for a in 0..2 {
        for b in 0..2 {
            for ap in 0..2 {
                for bp in 0..2 {
                    pt[(2 * a + b, 2 * ap + bp)] = m[(2 * a + bp, 2 * ap + b)];
                }
            }
        }
    }
    pt.hermitian_eigenvalues()[0]
}

/// The single-qubit observable `x·σ`; eigenvalues are `±|x|`.
pub fn qubit_observable(x: Vector3) -> Matrix {
    let mut m = Matrix::zeros(2);
    for (i, &c) in x.iter().enumerate() {
        if c != 0.0 {
            m = m.add(&pauli(i + 1).scale(c));
        }
    }
    m
}

/// Bob's traceless joint observable `Σ c_ij σ_i ⊗ σ_j`.
pub fn bob_observable(coeffs: &CoeffMatrix) -> Matrix {
    let mut m = Matrix::zeros(4);
    for i in 0..3 {
        for j in 0..3 {
            let c = coeffs[i][j];
            if c != 0.0 {
                m = m.add(&pauli(i + 1).kron(&pauli(j + 1)).scale(c));
            }
        }
    }
    m
}

/// `max |λ|` over the eigenvalues of a Hermitian matrix.
///
/// Panics if the input is not Hermitian within `1e-9`.
pub fn spectral_radius(h: &Matrix) -> f64 {
    h.hermitian_spectral_radius()
}

/// Singular values of a real 3×3 matrix, descending, via the eigenvalues of
/// `MᵀM`.
pub fn singular_values_3x3(m: &CoeffMatrix) -> [f64; 3] {
    let mut gram = Matrix::zeros(3);
    for i in 0..3 {
        for j in 0..3 {
            let mut acc = 0.0;
            for k in 0..3 {
                acc += m[k][i] * m[k][j];
            }
            gram[(i, j)] = Complex64::new(acc, 0.0);
        }
    }
    let eigs: Vec<f64> = gram.hermitian_eigenvalues();
    // Ascending eigenvalues of MᵀM -> descending singular values.
    [
        float::sqrt(eigs[2].max(0.0)),
        float::sqrt(eigs[1].max(0.0)),
        float::sqrt(eigs[0].max(0.0)),
    ]
}
