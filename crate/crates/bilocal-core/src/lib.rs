//! Evaluation and maximization of the bilocal (two-source network Bell)
//! inequality `S = sqrt(|I|) + sqrt(|J|) <= 2` for pairs of two-qubit states.
//!
//! The crate is organized around four pieces:
//!
//! - [`qstate`] — two-qubit density-matrix algebra: Pauli basis, Bloch
//!   decomposition/composition, Werner states, and the PPT entanglement check.
//! - [`correlations`] — the correlators `I`, `J` and the value `S` for a
//!   measurement strategy, computed through three routes: an exact trace
//!   oracle on the 16-dimensional joint space, the trace-derived Bloch
//!   contraction, and the closed-form contraction whose Werner
//!   specialization factors as `I = pq I'`, `J = pq J'`.
//! - [`optimizer`] — a deterministic, seedable particle-swarm optimizer with
//!   ring neighborhoods, damped velocity updates, and per-component
//!   displacement clamping.
//! - [`experiments`] — strategy encoding/decoding for the 30-dimensional
//!   search space, the `S'` maximization experiment, the audit of the
//!   bundled reference strategy, and the (p, q) Werner-plane scan.
//!
//! Everything is `f64`, deterministic, and pure; the crate is `no_std`
//! compatible (`alloc` required, enable the `libm` feature for float math
//! without `std`).

#![cfg_attr(not(feature = "std"), no_std)]
#![warn(missing_docs)]
// Index loops here usually contract two or three arrays at once; iterator
// chains would obscure the arithmetic.
#![allow(clippy::needless_range_loop)]

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("at least one of the `std` or `libm` features must be enabled");

extern crate alloc;

// Matrix entries are `num_complex::Complex64`; re-exported so downstream
// crates do not need their own pinned copy.
pub use num_complex;

mod float;
#[cfg(test)]
pub(crate) mod testutil;

pub mod correlations;
pub mod experiments;
pub mod matrix;
pub mod optimizer;
pub mod qstate;
pub mod rng;

pub use correlations::{CorrelationResult, MeasurementStrategy};
pub use matrix::Matrix;
pub use optimizer::{OptimizationOutcome, PsoConfig};
pub use qstate::{BlochForm, TwoQubitState, WernerParam};
