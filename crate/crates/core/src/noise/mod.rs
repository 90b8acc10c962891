//! Open-system simulation: amplitude damping and dephasing by quantum
//! trajectories with a dense density-matrix cross-check, readout error and
//! the reference-based normalization of noisy signals.

mod density;
mod model;
mod readout;
mod trajectory;

pub use density::{density_expectation, run_noisy_density, MAX_DENSITY_QUBITS};
pub use model::{damping_probability, dephasing_probability, NoiseModel, QubitNoise, TABLE1};
pub use readout::{AssignmentMatrix, Corrected};
pub use trajectory::{
    pairwise_sum, run_noisy_branches, run_noisy_trajectories, trajectory_rng, Branch, NoisyEstimate, TrajectoryConfig,
};

use crate::{Error, Result};

/// Smallest usable reference signal; below it the run is over-decohered.
pub const REFERENCE_GUARD: f64 = 0.05;
/// Normalized values beyond this magnitude are clipped and flagged.
pub const NORMALIZED_CLIP: f64 = 1.2;

/// Experiment signal divided by its reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normalized {
    pub value: f64,
    /// The raw ratio exceeded [`NORMALIZED_CLIP`] in magnitude.
    pub clipped: bool,
}

/// `exp / ref`, where `ref` is the reference circuit at one and a half
/// times the evolution of a single block.
pub fn normalize_signal(exp: f64, reference: f64) -> Result<Normalized> {
    if !(reference.abs() > REFERENCE_GUARD) {
        return Err(Error::ReferenceBelowGuard(reference));
    }
    let ratio = exp / reference;
    if ratio.abs() > NORMALIZED_CLIP {
        Ok(Normalized { value: NORMALIZED_CLIP.copysign(ratio), clipped: true })
    } else {
        Ok(Normalized { value: ratio, clipped: false })
    }
}
