//! Statevector engine: states, gates, the XY Hamiltonian, time evolution,
//! lattice graphs and circuits.

mod circuit;
mod graph;
mod hamiltonian;
mod state;

pub use circuit::{Circuit, Observable, Op};
pub use graph::{checkerboard_coloring, Color, QubitGraph};
pub use hamiltonian::{apply_hop, mhz_to_rad_per_ns, EvolutionMethod, Hamiltonian, SectorSpectrum};
pub use state::{Gate, Mat2, StateVector};

/// Largest supported register. Dense per-sector spectra stay tractable well
/// beyond the 12 qubits used by the presets.
pub const MAX_QUBITS: usize = 20;

/// `|0…0⟩` on `n` qubits.
pub fn zero_state(n: usize) -> crate::Result<StateVector> {
    StateVector::zero(n)
}
