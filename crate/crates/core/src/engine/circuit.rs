use crate::{Error, Result};

use super::hamiltonian::{EvolutionMethod, Hamiltonian};
use super::state::{Gate, StateVector};

/// One step of a protocol circuit.
///
/// Every step carries a physical duration for the noise model: `Evolve`
/// lasts `|t|`, a gate layer or phase encoding lasts one single-qubit gate
/// slot.
#[derive(Debug, Clone, PartialEq)]
pub enum Op {
    /// `exp(−iHt)`.
    Evolve(f64),
    /// Simultaneous single-qubit gates, applied in list order.
    Layer(Vec<(usize, Gate)>),
    /// `exp(−iφS_z)`.
    PhaseEncoding(f64),
}

impl Op {
    pub fn apply(&self, state: &mut StateVector, h: &Hamiltonian, method: EvolutionMethod) -> Result<()> {
        match self {
            Op::Evolve(t) => h.evolve(state, *t, method),
            Op::Layer(gates) => {
                for (q, g) in gates {
                    state.apply_1q(*q, g)?;
                }
                Ok(())
            }
            Op::PhaseEncoding(phi) => {
                state.apply_phase_encoding(*phi);
                Ok(())
            }
        }
    }
}

/// Single-qubit Pauli observable measured at the end of a circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Observable {
    SigmaX(usize),
    SigmaZ(usize),
}

impl Observable {
    pub fn qubit(&self) -> usize {
        match *self {
            Observable::SigmaX(q) | Observable::SigmaZ(q) => q,
        }
    }

    pub fn expectation(&self, state: &StateVector) -> Result<f64> {
        match *self {
            Observable::SigmaX(q) => state.expect_x(q),
            Observable::SigmaZ(q) => state.expect_z(q),
        }
    }
}

/// A circuit acting on `|0…0⟩`, followed by a single-qubit measurement.
#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub n_qubits: usize,
    pub ops: Vec<Op>,
    pub observable: Observable,
}

impl Circuit {
    pub fn new(n_qubits: usize, ops: Vec<Op>, observable: Observable) -> Result<Self> {
        if observable.qubit() >= n_qubits {
            return Err(Error::QubitIndex { index: observable.qubit(), n_qubits });
        }
        Ok(Self { n_qubits, ops, observable })
    }

    /// Final pure state of the noiseless circuit.
    pub fn run(&self, h: &Hamiltonian, method: EvolutionMethod) -> Result<StateVector> {
        let mut state = StateVector::zero(self.n_qubits)?;
        self.apply(&mut state, h, method)?;
        Ok(state)
    }

    pub fn apply(&self, state: &mut StateVector, h: &Hamiltonian, method: EvolutionMethod) -> Result<()> {
        for op in &self.ops {
            op.apply(state, h, method)?;
        }
        Ok(())
    }

    /// Noiseless expectation value of the observable.
    pub fn expectation(&self, h: &Hamiltonian, method: EvolutionMethod) -> Result<f64> {
        self.observable.expectation(&self.run(h, method)?)
    }
}
