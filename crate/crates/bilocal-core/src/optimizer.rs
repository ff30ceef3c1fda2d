//! Particle-swarm optimizer with ring neighborhoods, damped velocity
//! updates, per-component displacement clamping, and optional fitness
//! re-sampling for noisy objectives.
//!
//! Each iteration proceeds in two synchronous phases. First every particle
//! samples its current position (`resamples` draws averaged), folds fresh
//! samples of its personal-best position into that best's running mean, and
//! replaces the personal best when the current mean exceeds the stored one.
//! Then every particle reads the best personal best within its ring
//! neighborhood and moves, component-wise:
//!
//! ```text
//! δ ← ω·δ + β1·ξ1·(best − ρ) + β2·ξ2·(Λ − ρ)
//! ρ ← ρ + clamp(δ, ±νmax)   (δ itself is stored unclamped)
//! ```
//!
//! `ξ1`, `ξ2` are fresh uniform `[0, 1]` draws for every component of
//! every update; the damping `ω < 1` inside the velocity recursion is what
//! makes the swarm settle instead of orbiting its attractors. Every
//! particle draws from its own RNG stream (seeded from `PsoConfig::seed`
//! through SplitMix64), so results are bit-identical under any
//! fitness-evaluation order.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use thiserror::Error;

use crate::rng::{SplitMix64, Xoshiro256PlusPlus};

/// Optimizer misconfiguration or an unusable search box.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PsoError {
    /// A `PsoConfig` field violates its bound.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    /// The objective dimension is zero.
    #[error("dimension must be at least 1")]
    ZeroDimension,
    /// The initialization box is empty or non-finite in some component.
    #[error("initialization box is invalid at component {index}: [{lo}, {hi}]")]
    InvalidBox {
        /// Offending component.
        index: usize,
        /// Lower bound given.
        lo: f64,
        /// Upper bound given.
        hi: f64,
    },
    /// Box length does not match the dimension.
    #[error("initialization box has {got} components, expected {expected}")]
    BoxDimensionMismatch {
        /// Components provided.
        got: usize,
        /// Dimension requested.
        expected: usize,
    },
}

/// Swarm hyperparameters. The defaults are the settings reported to give
/// the highest success probability: 30 particles, 500 iterations, ω = 0.8,
/// β1 = β2 = 0.5, νmax = 0.2, ring radius 1, one sample per evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct PsoConfig {
    /// Number of particles.
    pub swarm_size: usize,
    /// Iterations to run.
    pub iterations: usize,
    /// Damping factor ω multiplying the velocity in each update.
    pub omega: f64,
    /// Exploitation weight β1 (attraction to the personal best).
    pub beta1: f64,
    /// Exploration weight β2 (attraction to the neighborhood best).
    pub beta2: f64,
    /// Per-component bound νmax on the applied displacement ω·δ.
    pub vmax: f64,
    /// Ring radius r: particles within circular distance r communicate.
    pub ring_radius: usize,
    /// Fitness samples per evaluation (K); averaging matters only for
    /// noisy objectives.
    pub resamples: usize,
    /// Master seed for all random draws.
    pub seed: u64,
}

impl Default for PsoConfig {
    fn default() -> Self {
        Self {
            swarm_size: 30,
            iterations: 500,
            omega: 0.8,
            beta1: 0.5,
            beta2: 0.5,
            vmax: 0.2,
            ring_radius: 1,
            resamples: 1,
            seed: 0,
        }
    }
}

impl PsoConfig {
    /// Checks the structural bounds: `swarm_size ≥ 2`,
    /// `ring_radius < swarm_size/2 + 1`, `iterations ≥ 1`, `vmax > 0`,
    /// `resamples ≥ 1`.
    pub fn validate(&self) -> Result<(), PsoError> {
        if self.swarm_size < 2 {
            return Err(PsoError::InvalidConfig(format!(
                "swarm_size must be at least 2, got {}",
                self.swarm_size
            )));
        }
        if self.iterations < 1 {
            return Err(PsoError::InvalidConfig(String::from(
                "iterations must be at least 1",
            )));
        }
        if !self.vmax.is_finite() || self.vmax <= 0.0 {
            return Err(PsoError::InvalidConfig(format!(
                "vmax must be positive and finite, got {}",
                self.vmax
            )));
        }
        if self.resamples < 1 {
            return Err(PsoError::InvalidConfig(String::from(
                "resamples must be at least 1",
            )));
        }
        if self.ring_radius < 1
            || (self.ring_radius as f64) >= self.swarm_size as f64 / 2.0 + 1.0
        {
            return Err(PsoError::InvalidConfig(format!(
                "ring_radius must satisfy 1 <= r < swarm_size/2 + 1, got r={} for {} particles",
                self.ring_radius, self.swarm_size
            )));
        }
        for (name, v) in [("omega", self.omega), ("beta1", self.beta1), ("beta2", self.beta2)] {
            if !v.is_finite() {
                return Err(PsoError::InvalidConfig(format!("{name} must be finite")));
            }
        }
        Ok(())
    }
}

/// One swarm member: current position and velocity, plus the personal best
/// and the running mean of its fitness samples.
#[derive(Debug, Clone)]
pub struct Particle {
    /// Current position ρ.
    pub position: Vec<f64>,
    /// Current damped velocity δ, stored unclamped; only the applied
    /// per-component displacement is bounded by ±νmax.
    pub velocity: Vec<f64>,
    /// Best position visited so far.
    pub best_position: Vec<f64>,
    /// Running mean fitness of `best_position`.
    pub best_mean: f64,
    /// Number of samples folded into `best_mean`.
    pub best_samples: u64,
    rng: Xoshiro256PlusPlus,
}

/// Indices within circular distance `r` of particle `i` on a ring of `n`
/// particles, in ring order starting at `i - r`; `i` itself is included.
/// When the radius covers the whole ring, all indices are returned.
///
/// Panics if `i >= n` or `r < 1`.
pub fn ring_neighborhood(i: usize, r: usize, n: usize) -> Vec<usize> {
    assert!(i < n, "particle index {i} out of range for swarm of {n}");
    assert!(r >= 1, "ring radius must be at least 1");
    if 2 * r + 1 >= n {
        return (0..n).collect();
    }
    (0..=2 * r).map(|k| (i + n - r + k) % n).collect()
}

/// Per-iteration record of the best-so-far value and position.
#[derive(Debug, Clone, PartialEq)]
pub struct TracePoint {
    /// 1-based iteration index.
    pub iteration: usize,
    /// Best fitness seen so far.
    pub best_value: f64,
    /// Position achieving `best_value`.
    pub best_position: Vec<f64>,
}

/// Result of an [`optimize`] run.
#[derive(Debug, Clone)]
pub struct OptimizationOutcome {
    /// Best-ever evaluated position.
    pub best_position: Vec<f64>,
    /// Its (mean) fitness.
    pub best_value: f64,
    /// One record per iteration; `best_value` is non-decreasing for
    /// deterministic objectives.
    pub trace: Vec<TracePoint>,
}

/// Particle swarm over a fixed-dimension search space.
#[derive(Debug, Clone)]
pub struct Swarm {
    particles: Vec<Particle>,
    dim: usize,
}

impl Swarm {
    /// Initializes the swarm: positions uniform in `init_box`, velocities
    /// uniform in `[-vmax, vmax]` per component, one RNG stream per
    /// particle derived from `config.seed`.
    pub fn init(dim: usize, init_box: &[(f64, f64)], config: &PsoConfig) -> Result<Self, PsoError> {
        config.validate()?;
        if dim == 0 {
            return Err(PsoError::ZeroDimension);
        }
        if init_box.len() != dim {
            return Err(PsoError::BoxDimensionMismatch {
                got: init_box.len(),
                expected: dim,
            });
        }
        for (index, &(lo, hi)) in init_box.iter().enumerate() {
            if !lo.is_finite() || !hi.is_finite() || lo > hi {
                return Err(PsoError::InvalidBox { index, lo, hi });
            }
        }
        let mut seeder = SplitMix64::new(config.seed);
        let particles = (0..config.swarm_size)
            .map(|_| {
                let mut rng = Xoshiro256PlusPlus::seed_from_u64(seeder.next_u64());
                let position: Vec<f64> =
                    init_box.iter().map(|&(lo, hi)| rng.uniform(lo, hi)).collect();
                let velocity: Vec<f64> = (0..dim)
                    .map(|_| rng.uniform(-config.vmax, config.vmax))
                    .collect();
                Particle {
                    best_position: position.clone(),
                    position,
                    velocity,
                    best_mean: f64::NEG_INFINITY,
                    best_samples: 0,
                    rng,
                }
            })
            .collect();
        Ok(Self { particles, dim })
    }

    /// The swarm members.
    pub fn particles(&self) -> &[Particle] {
        &self.particles
    }

    /// Runs one synchronous iteration: evaluate, update personal bests,
    /// communicate neighborhood bests, move.
    pub fn step<F: Fn(&[f64]) -> f64>(&mut self, objective: &F, config: &PsoConfig) {
        let n = self.particles.len();

        // Evaluation phase: steps (i)-(iii).
        for particle in &mut self.particles {
            let current_mean = sample_mean(objective, &particle.position, config.resamples);
            if particle.best_samples > 0 {
                // Re-sample the stored best and refine its running mean;
                // degenerate (mean unchanged) for deterministic objectives.
                let refresh = sample_mean(objective, &particle.best_position, config.resamples);
                particle.fold_best_samples(refresh, config.resamples as u64);
            }
            if current_mean > particle.best_mean || particle.best_samples == 0 {
                if current_mean.is_finite() {
                    particle.best_position.clone_from(&particle.position);
                    particle.best_mean = current_mean;
                    particle.best_samples = config.resamples as u64;
                } else if particle.best_samples == 0 {
                    // Keep -inf so any finite later evaluation wins.
                    particle.best_mean = f64::NEG_INFINITY;
                }
            }
        }

        // Communication phase: steps (iv)-(v). Ties break toward the lowest
        // index, so the result is independent of evaluation order.
        let neighborhood_best: Vec<usize> = (0..n)
            .map(|i| {
                ring_neighborhood(i, config.ring_radius, n)
                    .into_iter()
                    .fold(i, |best, j| {
                        if self.particles[j].best_mean > self.particles[best].best_mean
                            || (self.particles[j].best_mean == self.particles[best].best_mean
                                && j < best)
                        {
                            j
                        } else {
                            best
                        }
                    })
            })
            .collect();

        // Move phase: step (vi).
        let leader_positions: Vec<Vec<f64>> = neighborhood_best
            .iter()
            .map(|&j| self.particles[j].best_position.clone())
            .collect();
        for (particle, leader) in self.particles.iter_mut().zip(&leader_positions) {
            for d in 0..self.dim {
                let xi1 = particle.rng.next_f64();
                let xi2 = particle.rng.next_f64();
                particle.velocity[d] = config.omega * particle.velocity[d]
                    + config.beta1 * xi1 * (particle.best_position[d] - particle.position[d])
                    + config.beta2 * xi2 * (leader[d] - particle.position[d]);
                let displacement = particle.velocity[d].clamp(-config.vmax, config.vmax);
                particle.position[d] += displacement;
            }
        }
    }

    /// Index of the particle with the best personal mean (lowest index on
    /// ties).
    fn best_index(&self) -> usize {
        let mut best = 0;
        for (i, p) in self.particles.iter().enumerate() {
            if p.best_mean > self.particles[best].best_mean {
                best = i;
            }
        }
        best
    }
}

impl Particle {
    fn fold_best_samples(&mut self, sample_mean: f64, count: u64) {
        let total = self.best_samples + count;
        if sample_mean.is_finite() && self.best_mean.is_finite() {
            self.best_mean = (self.best_mean * self.best_samples as f64
                + sample_mean * count as f64)
                / total as f64;
        } else if !sample_mean.is_finite() {
            self.best_mean = f64::NEG_INFINITY;
        }
        self.best_samples = total;
    }
}

fn sample_mean<F: Fn(&[f64]) -> f64>(objective: &F, position: &[f64], k: usize) -> f64 {
    let mut acc = 0.0;
    for _ in 0..k {
        let v = objective(position);
        if !v.is_finite() {
            return f64::NEG_INFINITY;
        }
        acc += v;
    }
    acc / k as f64
}

/// Maximizes `objective` over `dim` dimensions with positions initialized
/// uniformly in `init_box`. Returns the best-ever evaluated position, its
/// value, and the per-iteration trace. Fully deterministic for a given
/// `(config, objective)` pair.
pub fn optimize<F: Fn(&[f64]) -> f64>(
    objective: F,
    dim: usize,
    init_box: &[(f64, f64)],
    config: &PsoConfig,
) -> Result<OptimizationOutcome, PsoError> {
    let mut swarm = Swarm::init(dim, init_box, config)?;
    let mut best_value = f64::NEG_INFINITY;
    let mut best_position = swarm.particles[0].position.clone();
    let mut trace = Vec::with_capacity(config.iterations);
    for iteration in 1..=config.iterations {
        swarm.step(&objective, config);
        let leader = &swarm.particles[swarm.best_index()];
        if leader.best_mean > best_value {
            best_value = leader.best_mean;
            best_position.clone_from(&leader.best_position);
        }
        trace.push(TracePoint {
            iteration,
            best_value,
            best_position: best_position.clone(),
        });
    }
    Ok(OptimizationOutcome {
        best_position,
        best_value,
        trace,
    })
}
