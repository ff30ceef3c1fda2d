//! Dense complex square matrices of small fixed order (2, 4, 8, 16) with the
//! handful of operations the rest of the crate needs: products, adjoints,
//! Kronecker products, traces, and eigenvalues of Hermitian matrices via
//! cyclic Jacobi rotations.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::float;

/// Dense, row-major complex square matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl Matrix {
    /// Zero matrix of order `dim`.
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::ZERO; dim * dim],
        }
    }

    /// Identity matrix of order `dim`.
    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::ONE;
        }
        m
    }

    /// Builds a matrix from row-major complex entries.
    ///
    /// Panics if `data.len() != dim * dim`.
    pub fn from_rows(dim: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), dim * dim, "row data does not match dimension");
        Self { dim, data }
    }

    /// Matrix order.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Complex64] {
        &self.data
    }

    /// Trace.
    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                out[(i, j)] = self[(j, i)].conj();
            }
        }
        out
    }

    /// Entry-wise scaling by a real factor.
    pub fn scale(&self, factor: f64) -> Self {
        let data = self.data.iter().map(|z| z * factor).collect();
        Self {
            dim: self.dim,
            data,
        }
    }

    /// Matrix sum. Panics on dimension mismatch.
    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Self {
            dim: self.dim,
            data,
        }
    }

    /// Matrix difference. Panics on dimension mismatch.
    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Self {
            dim: self.dim,
            data,
        }
    }

    /// Matrix product. Panics on dimension mismatch.
    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..n {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// `Tr(self * other)` without forming the product. Panics on dimension
    /// mismatch.
    ///
    /// Compensated summation keeps exactly-cancelling expectation values at
    /// true zero; the callers take square roots of these traces, which
    /// would otherwise amplify an ulp of residue into ~1e-8.
    pub fn mul_trace(&self, other: &Self) -> Complex64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let n = self.dim;
        let mut re = Compensated::default();
        let mut im = Compensated::default();
        for i in 0..n {
            for k in 0..n {
                let term = self[(i, k)] * other[(k, i)];
                re.add(term.re);
                im.add(term.im);
            }
        }
        Complex64::new(re.value(), im.value())
    }

    /// Kronecker product `self ⊗ other`.
    pub fn kron(&self, other: &Self) -> Self {
        let (m, n) = (self.dim, other.dim);
        let mut out = Self::zeros(m * n);
        for i in 0..m {
            for j in 0..m {
                let a = self[(i, j)];
                if a == Complex64::ZERO {
                    continue;
                }
                for k in 0..n {
                    for l in 0..n {
                        out[(i * n + k, j * n + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        out
    }

    /// Largest entry-wise deviation from the conjugate transpose.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let d = (self[(i, j)] - self[(j, i)].conj()).norm_sqr();
                if d > worst {
                    worst = d;
                }
            }
        }
        float::sqrt(worst)
    }

    /// Whether the matrix equals its conjugate transpose within `tol`
    /// (entry-wise).
    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_defect() <= tol
    }

    /// Frobenius norm.
    pub fn frobenius_norm(&self) -> f64 {
        float::sqrt(self.data.iter().map(|z| z.norm_sqr()).sum())
    }

    /// Eigenvalues of a Hermitian matrix, ascending.
    ///
    /// Cyclic Jacobi with complex rotations; only the (real) spectrum is
    /// accumulated. Intended for the small orders used here — convergence is
    /// quadratic and a handful of sweeps reaches machine precision.
    ///
    /// Panics if the matrix is not Hermitian within `1e-9`.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        assert!(
            self.is_hermitian(1e-9),
            "hermitian_eigenvalues requires a Hermitian matrix"
        );
        let n = self.dim;
        let mut a = self.clone();
        // Symmetrize exactly so rotations keep the working copy Hermitian.
        for i in 0..n {
            a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
            for j in (i + 1)..n {
                let avg = (a[(i, j)] + a[(j, i)].conj()) * 0.5;
                a[(i, j)] = avg;
                a[(j, i)] = avg.conj();
            }
        }

        let scale = self.frobenius_norm().max(1.0);
        for _sweep in 0..60 {
            let mut off = 0.0f64;
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a[(p, q)].norm_sqr();
                }
            }
            if float::sqrt(off) <= 1e-15 * scale {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    jacobi_rotate(&mut a, p, q);
                }
            }
        }

        let mut eigs: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
        eigs.sort_by(|x, y| x.partial_cmp(y).expect("eigenvalues are finite"));
        eigs
    }

    /// `max |λ|` over the eigenvalues of a Hermitian matrix.
    pub fn hermitian_spectral_radius(&self) -> f64 {
        self.hermitian_eigenvalues()
            .into_iter()
            .fold(0.0, |acc, l| acc.max(float::abs(l)))
    }
}

/// Neumaier-compensated accumulator.
#[derive(Debug, Default, Clone, Copy)]
struct Compensated {
    sum: f64,
    correction: f64,
}

impl Compensated {
    fn add(&mut self, value: f64) {
        let t = self.sum + value;
        if float::abs(self.sum) >= float::abs(value) {
            self.correction += (self.sum - t) + value;
        } else {
            self.correction += (value - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.correction
    }
}

/// Zeroes `a[(p, q)]` with a unitary two-sided rotation, preserving the
/// spectrum. `a` must be Hermitian with real diagonal.
fn jacobi_rotate(a: &mut Matrix, p: usize, q: usize) {
    let apq = a[(p, q)];
    let r = float::sqrt(apq.norm_sqr());
    if r == 0.0 {
        return;
    }
    // Phase factor turning the pivot real: with D = diag(1, e^{-iφ}),
    // D† H D has off-diagonal |a_pq|.
    let phase = apq / r;
    let alpha = a[(p, p)].re;
    let beta = a[(q, q)].re;
    let tau = (beta - alpha) / (2.0 * r);
    // Smaller-angle root of t² − 2τt − 1 = 0, which zeroes the pivot under
    // the rotation below.
    let t = if tau >= 0.0 {
        -1.0 / (tau + float::sqrt(1.0 + tau * tau))
    } else {
        1.0 / (-tau + float::sqrt(1.0 + tau * tau))
    };
    let c = 1.0 / float::sqrt(1.0 + t * t);
    let s = t * c;

    let n = a.dim();
    // U restricted to the (p, q) plane is [[c, -s], [s·e^{-iφ}, c·e^{-iφ}]]:
    // phase alignment composed with a real rotation. Apply A <- A·U, then
    // A <- U†·A.
    for k in 0..n {
        let akp = a[(k, p)];
        let akq = a[(k, q)];
        a[(k, p)] = akp * c + akq * phase.conj() * s;
        a[(k, q)] = -akp * s + akq * phase.conj() * c;
    }
    // Row update: A <- U†·A.
    for k in 0..n {
        let apk = a[(p, k)];
        let aqk = a[(q, k)];
        a[(p, k)] = apk * c + aqk * phase * s;
        a[(q, k)] = -apk * s + aqk * phase * c;
    }
    // Clean up roundoff on the pivot pair.
    a[(p, q)] = Complex64::ZERO;
    a[(q, p)] = Complex64::ZERO;
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);
}

impl core::ops::Index<(usize, usize)> for Matrix {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl core::ops::IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}
