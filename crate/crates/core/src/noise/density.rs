use nalgebra::DMatrix;

use crate::engine::{Circuit, EvolutionMethod, Hamiltonian, Observable, Op, StateVector};
use crate::entanglement::DensityMatrix;
use crate::{Error, Result, C64};

use super::model::NoiseModel;

/// Largest register evolved as a dense density matrix.
pub const MAX_DENSITY_QUBITS: usize = 6;

/// Exact open-system evolution of the noisy circuit on the same slice
/// schedule as the trajectories.
pub fn run_noisy_density(circuit: &Circuit, h: &Hamiltonian, method: EvolutionMethod, noise: &NoiseModel) -> Result<DensityMatrix> {
    let n = circuit.n_qubits;
    if n > MAX_DENSITY_QUBITS {
        return Err(Error::SizeLimit(format!("density oracle supports at most {MAX_DENSITY_QUBITS} qubits, got {n}")));
    }
    noise.check_qubits(n)?;
    let dim = 1usize << n;
    let mut rho = DMatrix::<C64>::zeros(dim, dim);
    rho[(0, 0)] = C64::new(1.0, 0.0);
    for (op, dt) in noise.schedule(circuit) {
        rho = conjugate(&rho, &op, h, method)?;
        for (q, (gamma, p)) in noise.channels(dt)?.into_iter().enumerate() {
            apply_channels(&mut rho, q, gamma, p);
        }
    }
    DensityMatrix::from_matrix(rho)
}

/// `Tr(ρ O)` for a circuit observable.
pub fn density_expectation(rho: &DensityMatrix, observable: Observable) -> f64 {
    match observable {
        Observable::SigmaX(q) => rho.expect_x(q),
        Observable::SigmaZ(q) => rho.expect_z(q),
    }
}

/// `U ρ U†` where `U` is the unitary of `op`, computed column by column:
/// `A = U ρ`, then `U ρ U† = (U A†)†`.
fn conjugate(rho: &DMatrix<C64>, op: &Op, h: &Hamiltonian, method: EvolutionMethod) -> Result<DMatrix<C64>> {
    let apply_columns = |m: &DMatrix<C64>| -> Result<DMatrix<C64>> {
        let mut out = m.clone();
        for c in 0..m.ncols() {
            let mut s = StateVector::from_amplitudes(m.column(c).iter().copied().collect())?;
            op.apply(&mut s, h, method)?;
            out.column_mut(c).copy_from_slice(s.amplitudes());
        }
        Ok(out)
    };
    let a = apply_columns(rho)?;
    Ok(apply_columns(&a.adjoint())?.adjoint())
}

/// Amplitude damping `{K0, K1}` followed by dephasing `{√(1−p) I, √p Z}` on
/// one qubit, applied entrywise.
fn apply_channels(rho: &mut DMatrix<C64>, qubit: usize, gamma: f64, p: f64) {
    let m = 1usize << qubit;
    let dim = rho.nrows();
    if gamma > 0.0 {
        let s = (1.0 - gamma).sqrt();
        for a in 0..dim {
            for b in 0..dim {
                match (a & m != 0, b & m != 0) {
                    (false, false) => {
                        let v = rho[(a | m, b | m)];
                        rho[(a, b)] += v * gamma;
                    }
                    (true, true) => rho[(a, b)] *= 1.0 - gamma,
                    _ => rho[(a, b)] *= s,
                }
            }
        }
    }
    if p > 0.0 {
        let f = 1.0 - 2.0 * p;
        for a in 0..dim {
            for b in 0..dim {
                if (a ^ b) & m != 0 {
                    rho[(a, b)] *= f;
                }
            }
        }
    }
}
