//! Shared helpers for unit tests.

use num_complex::Complex64;

use crate::correlations::MeasurementStrategy;
use crate::matrix::Matrix;
use crate::qstate::{bob_observable, spectral_radius, CoeffMatrix, TwoQubitState, Vector3};
use crate::rng::Xoshiro256PlusPlus;

/// Random density matrix via `G G† / Tr(G G†)`.
pub(crate) fn random_state(rng: &mut Xoshiro256PlusPlus) -> TwoQubitState {
    let mut g = Matrix::zeros(4);
    for i in 0..4 {
        for j in 0..4 {
            g[(i, j)] = Complex64::new(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0));
        }
    }
    let gg = g.mul(&g.adjoint());
    let norm = gg.trace().re;
    TwoQubitState::new(gg.scale(1.0 / norm)).expect("G G† construction is valid")
}

/// Random constraint-satisfying measurement strategy.
pub(crate) fn random_strategy(rng: &mut Xoshiro256PlusPlus) -> MeasurementStrategy {
    let unit = |rng: &mut Xoshiro256PlusPlus| -> Vector3 {
        loop {
            let v = [
                rng.uniform(-1.0, 1.0),
                rng.uniform(-1.0, 1.0),
                rng.uniform(-1.0, 1.0),
            ];
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if n > 1e-3 {
                return [v[0] / n, v[1] / n, v[2] / n];
            }
        }
    };
    let coeffs = |rng: &mut Xoshiro256PlusPlus| -> CoeffMatrix {
        let mut c = [[0.0; 3]; 3];
        for row in c.iter_mut() {
            for entry in row.iter_mut() {
                *entry = rng.uniform(-1.0, 1.0);
            }
        }
        let radius = spectral_radius(&bob_observable(&c));
        if radius > 1.0 {
            for row in c.iter_mut() {
                for entry in row.iter_mut() {
                    *entry /= radius;
                }
            }
        }
        c
    };
    MeasurementStrategy {
        x0: unit(rng),
        x1: unit(rng),
        y0: unit(rng),
        y1: unit(rng),
        m: coeffs(rng),
        n: coeffs(rng),
    }
}
