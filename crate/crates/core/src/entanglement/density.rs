use nalgebra::{DMatrix, DVector};

use crate::engine::StateVector;
use crate::{Error, Result, C64};

use super::split_bits;

/// Density matrix on `n` qubits, same little-endian indexing as
/// [`StateVector`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n_qubits: usize,
    data: DMatrix<C64>,
}

impl DensityMatrix {
    pub fn from_matrix(data: DMatrix<C64>) -> Result<Self> {
        let dim = data.nrows();
        if dim != data.ncols() || dim < 2 || !dim.is_power_of_two() {
            return Err(Error::InvalidArgument(format!("{}x{} is not a qubit density matrix", dim, data.ncols())));
        }
        Ok(Self { n_qubits: dim.trailing_zeros() as usize, data })
    }

    /// `|ψ⟩⟨ψ|`.
    pub fn from_pure(state: &StateVector) -> Self {
        let v = DVector::from_column_slice(state.amplitudes());
        Self { n_qubits: state.n_qubits(), data: &v * v.adjoint() }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<C64> {
        &self.data
    }

    pub fn matrix_mut(&mut self) -> &mut DMatrix<C64> {
        &mut self.data
    }

    pub fn into_matrix(self) -> DMatrix<C64> {
        self.data
    }

    pub fn trace(&self) -> C64 {
        self.data.trace()
    }

    /// Largest `|ρ − ρ†|` entry.
    pub fn hermiticity_error(&self) -> f64 {
        (&self.data - self.data.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `⟨ψ|ρ|ψ⟩`.
    pub fn fidelity_with(&self, state: &StateVector) -> f64 {
        let v = DVector::from_column_slice(state.amplitudes());
        (v.adjoint() * &self.data * &v)[(0, 0)].re
    }

    pub fn expect_z(&self, qubit: usize) -> f64 {
        (0..self.dim()).map(|i| if i >> qubit & 1 == 0 { self.data[(i, i)].re } else { -self.data[(i, i)].re }).sum()
    }

    pub fn expect_x(&self, qubit: usize) -> f64 {
        let m = 1usize << qubit;
        (0..self.dim()).filter(|i| i & m == 0).map(|i| 2.0 * self.data[(i, i | m)].re).sum()
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let h = (&self.data + self.data.adjoint()) * C64::new(0.5, 0.0);
        let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }
}

fn keep_mask(n: usize, keep: &[usize]) -> Result<usize> {
    let mut mask = 0usize;
    for &q in keep {
        if q >= n {
            return Err(Error::QubitIndex { index: q, n_qubits: n });
        }
        mask |= 1 << q;
    }
    if mask == 0 {
        return Err(Error::InvalidArgument("partial trace must keep at least one qubit".into()));
    }
    if keep.len() != mask.count_ones() as usize {
        return Err(Error::InvalidArgument("duplicate qubit in keep set".into()));
    }
    Ok(mask)
}

/// Reduced state of `keep` (kept qubits relabelled in ascending order).
pub fn partial_trace_state(state: &StateVector, keep: &[usize]) -> Result<DensityMatrix> {
    let n = state.n_qubits();
    let mask = keep_mask(n, keep)?;
    let (a_bits, e_bits) = split_bits(n, mask);
    let amps = state.amplitudes();
    let m = DMatrix::from_fn(a_bits.len(), e_bits.len(), |a, e| amps[a_bits[a] | e_bits[e]]);
    DensityMatrix::from_matrix(&m * m.adjoint())
}

/// Reduced density matrix of `keep`.
pub fn partial_trace(rho: &DensityMatrix, keep: &[usize]) -> Result<DensityMatrix> {
    let n = rho.n_qubits();
    let mask = keep_mask(n, keep)?;
    let (a_bits, e_bits) = split_bits(n, mask);
    let data = DMatrix::from_fn(a_bits.len(), a_bits.len(), |a, b| {
        e_bits.iter().map(|&e| rho.data[(a_bits[a] | e, a_bits[b] | e)]).sum()
    });
    DensityMatrix::from_matrix(data)
}

/// `Tr ρ²`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.data.iter().map(|z| z.norm_sqr()).sum()
}

/// Nearest-in-spectrum physical state: clip negative eigenvalues of the
/// Hermitian part and renormalise the trace.
pub fn psd_project(rho: &DensityMatrix) -> DensityMatrix {
    let h = (&rho.data + rho.data.adjoint()) * C64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let clipped: Vec<f64> = eig.eigenvalues.iter().map(|&e| e.max(0.0)).collect();
    let total: f64 = clipped.iter().sum();
    let dim = rho.dim();
    if total <= 0.0 {
        let data = DMatrix::identity(dim, dim) * C64::new(1.0 / dim as f64, 0.0);
        return DensityMatrix { n_qubits: rho.n_qubits, data };
    }
    let d = DMatrix::from_diagonal(&DVector::from_iterator(dim, clipped.iter().map(|e| C64::new(e / total, 0.0))));
    let v = &eig.eigenvectors;
    DensityMatrix { n_qubits: rho.n_qubits, data: v * d * v.adjoint() }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::Gate;
    use rand::{Rng, SeedableRng};

    fn bell() -> StateVector {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let z = C64::new(0.0, 0.0);
        StateVector::from_amplitudes(vec![C64::new(r, 0.0), z, z, C64::new(r, 0.0)]).unwrap()
    }

    fn random_state(n: usize, seed: u64) -> StateVector {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let amps = (0..1 << n).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let mut s = StateVector::from_amplitudes(amps).unwrap();
        s.normalize();
        s
    }

    #[test]
    fn bell_reduces_to_maximally_mixed() {
        for keep in [[0], [1]] {
            let r = partial_trace_state(&bell(), &keep).unwrap();
            assert!((r.matrix()[(0, 0)].re - 0.5).abs() < 1e-15);
            assert!((r.matrix()[(1, 1)].re - 0.5).abs() < 1e-15);
            assert!(r.matrix()[(0, 1)].norm() < 1e-15);
            assert!((purity(&r) - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn product_state_keeps_local_part() {
        let s = StateVector::basis(2, 0b10).unwrap(); // qubit 0 in |0⟩, qubit 1 in |1⟩
        let r = partial_trace_state(&s, &[0]).unwrap();
        assert!((r.matrix()[(0, 0)].re - 1.0).abs() < 1e-15);
        let r = partial_trace_state(&s, &[1]).unwrap();
        assert!((r.matrix()[(1, 1)].re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn state_and_density_routes_agree() {
        for seed in 0..5 {
            let s = random_state(4, seed);
            let rho = DensityMatrix::from_pure(&s);
            assert!((purity(&rho) - 1.0).abs() < 1e-12);
            for keep in [vec![0], vec![1, 3], vec![0, 2, 3]] {
                let a = partial_trace_state(&s, &keep).unwrap();
                let b = partial_trace(&rho, &keep).unwrap();
                assert!((a.trace().re - 1.0).abs() < 1e-12);
                assert!((a.matrix() - b.matrix()).iter().all(|z| z.norm() < 1e-12));
            }
        }
    }

    #[test]
    fn w_state_single_qubit_purity() {
        let rho = partial_trace_state(&super::super::tests::w3(), &[1]).unwrap();
        assert!((purity(&rho) - 5.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn keep_set_is_validated() {
        let s = bell();
        assert!(partial_trace_state(&s, &[]).is_err());
        assert!(partial_trace_state(&s, &[2]).is_err());
        assert!(partial_trace_state(&s, &[0, 0]).is_err());
    }

    #[test]
    fn psd_projection_examples() {
        let mut s = StateVector::zero(2).unwrap();
        s.apply_1q(0, &Gate::Ry(0.8)).unwrap();
        let pure = DensityMatrix::from_pure(&s);
        let p = psd_project(&pure);
        assert!((p.matrix() - pure.matrix()).iter().all(|z| z.norm() < 1e-10));

        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![C64::new(1.1, 0.0), C64::new(-0.1, 0.0)]));
        let p = psd_project(&DensityMatrix::from_matrix(d).unwrap());
        assert!((p.matrix()[(0, 0)].re - 1.0).abs() < 1e-12);
        assert!(p.matrix()[(1, 1)].norm() < 1e-12);

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let a = DMatrix::from_fn(8, 8, |_, _| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
            let h = &a + a.adjoint();
            let p = psd_project(&DensityMatrix::from_matrix(h).unwrap());
            assert!(p.eigenvalues()[0] >= -1e-12);
            assert!((p.trace().re - 1.0).abs() < 1e-12);
            assert!(p.hermiticity_error() < 1e-12);
        }
    }
}
