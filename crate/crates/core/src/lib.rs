//! Simulation and analysis toolkit for scrambling-enhanced ("butterfly")
//! phase metrology on XY-coupled qubit lattices.
//!
//! The crate is organised bottom-up:
//!
//! * [`engine`] – statevector, single-qubit gates, XY Hamiltonian, exact and
//!   Trotterized evolution, lattice graphs and circuits.
//! * [`protocol`] – sensing, OTOC, reference and butterfly-state circuits in
//!   both the abstract (`U†`) and hardware (`Σ_Z`-conjugated) forms.
//! * [`metrology`] – slopes, Fisher information, inverted sensitivity, the
//!   polarization distribution and the OTOC route to `η⁻¹`.
//! * [`entanglement`] – partial traces, purity, pure-state GME concurrence
//!   and simulated Pauli tomography.
//! * [`noise`] – amplitude damping and dephasing via quantum trajectories,
//!   a density-matrix oracle, readout errors and reference normalization.
//! * [`calibration`] – flux-distortion fitting, Z-gate splines, effective
//!   coupling and chevron frequency extraction.
//! * [`harness`] – JSON configuration, deterministic parallel sweeps and CSV
//!   output used by the `butterfly` binary.
//!
//! # Examples
//!
//! Each capability has a runnable example (`cargo run --release --example <name>`):
//!
//! | example | shows |
//! |---|---|
//! | `sensing_signal` | `⟨σx⟩(φ)`, abstract vs hardware sequences, three-term expansion |
//! | `otoc_light_cone` | mask-averaged OTOCs by graph distance and their onset times |
//! | `sensitivity_scan` | `η⁻¹(t)` for 6/8/10 qubits against the OTOC prediction, SQL and `N/2` |
//! | `butterfly_entanglement` | GME concurrence of the butterfly state and its minimizing cut |
//! | `noisy_sensing` | trajectory noise, reference normalization |
//! | `readout_mitigation` | assignment matrices and their inversion |
//! | `state_tomography` | simulated Pauli tomography of a GHZ state |
//! | `calibration_fits` | distortion fit, Z-gate spline, effective coupling, chevron |
//! | `trotter_convergence` | second-order product-formula error scaling |
//! | `config_sweep` | JSON-driven sweeps and deterministic CSV output |

// `!(x > 0.0)` style checks are deliberate: they reject NaN as well.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibration;
pub mod engine;
pub mod entanglement;
pub mod error;
pub mod harness;
pub mod metrology;
pub mod noise;
pub mod protocol;

pub use error::{Error, Result};

/// Complex amplitude type used throughout the crate.
pub type C64 = num_complex::Complex64;
