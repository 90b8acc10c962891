//! Entanglement diagnostics: reduced density matrices, purity, pure-state
//! GME concurrence and simulated local-Pauli tomography.

mod density;
mod tomography;

pub use density::{partial_trace, partial_trace_state, psd_project, purity, DensityMatrix};
pub use tomography::{simulate_tomography, Shots, MAX_TOMOGRAPHY_QUBITS};

use crate::engine::StateVector;
use crate::{Error, Result, C64};

/// Qubits on one side of a cut.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Bipartition {
    n_qubits: usize,
    mask: usize,
}

impl Bipartition {
    pub fn new(n_qubits: usize, side: &[usize]) -> Result<Self> {
        let mut mask = 0usize;
        for &q in side {
            if q >= n_qubits {
                return Err(Error::QubitIndex { index: q, n_qubits });
            }
            mask |= 1 << q;
        }
        let full = (1usize << n_qubits) - 1;
        if mask == 0 || mask == full {
            return Err(Error::InvalidArgument("bipartition side must be a nonempty proper subset".into()));
        }
        // canonical form: the side that does not contain the last qubit
        if mask >> (n_qubits - 1) & 1 == 1 {
            mask ^= full;
        }
        Ok(Self { n_qubits, mask })
    }

    /// All `2^{N−1} − 1` distinct cuts.
    pub fn all(n_qubits: usize) -> impl Iterator<Item = Bipartition> {
        let count = if n_qubits < 2 { 0 } else { 1usize << (n_qubits - 1) };
        (1..count).map(move |mask| Bipartition { n_qubits, mask })
    }

    pub fn mask(&self) -> usize {
        self.mask
    }

    pub fn side(&self) -> Vec<usize> {
        (0..self.n_qubits).filter(|q| self.mask >> q & 1 == 1).collect()
    }

    pub fn complement(&self) -> Vec<usize> {
        (0..self.n_qubits).filter(|q| self.mask >> q & 1 == 0).collect()
    }
}

impl std::fmt::Display for Bipartition {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let join = |v: Vec<usize>| v.iter().map(|q| q.to_string()).collect::<Vec<_>>().join(" ");
        write!(f, "{}|{}", join(self.side()), join(self.complement()))
    }
}

/// Pure-state GME concurrence and the cut that attains it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmeConcurrence {
    pub value: f64,
    pub min_cut: Option<Bipartition>,
}

/// `C_GME(|ψ⟩) = min_γ √(2(1 − Tr ρ_γ²))` over all bipartitions.
pub fn gme_concurrence_pure(state: &StateVector) -> GmeConcurrence {
    let n = state.n_qubits();
    let mut best = GmeConcurrence { value: 0.0, min_cut: None };
    let mut first = true;
    for cut in Bipartition::all(n) {
        let c = (2.0 * cut_linear_entropy(state, cut.mask())).sqrt();
        if first || c < best.value {
            best = GmeConcurrence { value: c, min_cut: Some(cut) };
            first = false;
        }
    }
    best
}

/// `Tr ρ_A²` for the subsystem `A = mask`, computed on the smaller Gram matrix.
#[cfg(test)]
pub(crate) fn cut_purity(state: &StateVector, mask: usize) -> f64 {
    let n = state.n_qubits();
    let k = mask.count_ones() as usize;
    let keep = if 2 * k <= n { mask } else { ((1usize << n) - 1) ^ mask };
    let ka = keep.count_ones() as usize;
    let dim_a = 1usize << ka;
    let dim_e = 1usize << (n - ka);
    // M[a, e] = ψ(a, e); ρ_A = M M†
    let (a_bits, e_bits) = split_bits(n, keep);
    let amps = state.amplitudes();
    let mut m = vec![C64::new(0.0, 0.0); dim_a * dim_e];
    for (e, &eo) in e_bits.iter().enumerate() {
        for (a, &ao) in a_bits.iter().enumerate() {
            m[e * dim_a + a] = amps[ao | eo];
        }
    }
    let mut total = 0.0;
    for i in 0..dim_a {
        for j in i..dim_a {
            let mut acc = C64::new(0.0, 0.0);
            for e in 0..dim_e {
                acc += m[e * dim_a + i] * m[e * dim_a + j].conj();
            }
            total += if i == j { acc.norm_sqr() } else { 2.0 * acc.norm_sqr() };
        }
    }
    total
}

/// `1 − Tr ρ_A²` for a normalized state, evaluated as a sum of squared 2×2
/// minors of the amplitude matrix so that product states give exactly zero
/// rather than a rounding residue.
pub(crate) fn cut_linear_entropy(state: &StateVector, mask: usize) -> f64 {
    let n = state.n_qubits();
    let (a_bits, e_bits) = split_bits(n, mask);
    let amps = state.amplitudes();
    let rows: Vec<Vec<C64>> = a_bits.iter().map(|&a| e_bits.iter().map(|&e| amps[a | e]).collect()).collect();
    let mut total = 0.0;
    for i in 0..rows.len() {
        for j in i + 1..rows.len() {
            let (ri, rj) = (&rows[i], &rows[j]);
            for e in 0..ri.len() {
                for f in e + 1..ri.len() {
                    total += (ri[e] * rj[f] - ri[f] * rj[e]).norm_sqr();
                }
            }
        }
    }
    2.0 * total
}

/// Basis offsets for every assignment of the `keep` bits and of the rest.
pub(crate) fn split_bits(n: usize, keep: usize) -> (Vec<usize>, Vec<usize>) {
    let spread = |mask: usize| -> Vec<usize> {
        let qubits: Vec<usize> = (0..n).filter(|q| mask >> q & 1 == 1).collect();
        (0..(1usize << qubits.len()))
            .map(|local| qubits.iter().enumerate().fold(0, |acc, (b, &q)| acc | ((local >> b & 1) << q)))
            .collect()
    };
    (spread(keep), spread(((1usize << n) - 1) ^ keep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{Gate, QubitGraph};
    use crate::protocol::{butterfly_state, InsertGate, ProtocolSpec};
    use rand::{Rng, SeedableRng};

    fn ghz(n: usize) -> StateVector {
        let mut a = vec![C64::new(0.0, 0.0); 1 << n];
        a[0] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        a[(1 << n) - 1] = a[0];
        StateVector::from_amplitudes(a).unwrap()
    }

    pub(crate) fn w3() -> StateVector {
        let mut a = vec![C64::new(0.0, 0.0); 8];
        for i in [1, 2, 4] {
            a[i] = C64::new(1.0 / 3f64.sqrt(), 0.0);
        }
        StateVector::from_amplitudes(a).unwrap()
    }

    #[test]
    fn bipartition_enumeration() {
        assert_eq!(Bipartition::all(6).count(), 31);
        assert_eq!(Bipartition::all(1).count(), 0);
        let cut = Bipartition::new(4, &[3, 2]).unwrap();
        assert_eq!(cut.side(), vec![0, 1]);
        assert_eq!(cut.to_string(), "0 1|2 3");
        assert!(Bipartition::new(3, &[]).is_err());
        assert!(Bipartition::new(3, &[0, 1, 2]).is_err());
    }

    #[test]
    fn product_states_have_zero_gme() {
        let mut s = StateVector::zero(4).unwrap();
        for q in 0..4 {
            s.apply_1q(q, &Gate::Ry(0.3 + 0.4 * q as f64)).unwrap();
        }
        assert!(gme_concurrence_pure(&s).value < 1e-12);
    }

    #[test]
    fn ghz_and_w_values() {
        for n in 2..7 {
            assert!((gme_concurrence_pure(&ghz(n)).value - 1.0).abs() < 1e-12);
        }
        let w = gme_concurrence_pure(&w3());
        assert!((w.value - (8.0f64 / 9.0).sqrt()).abs() < 1e-12);
        assert_eq!(w.min_cut.unwrap().side().len(), 1);
    }

    #[test]
    fn invariant_under_local_unitaries() {
        let spec = ProtocolSpec::from_graph(QubitGraph::preset("n6").unwrap(), crate::engine::mhz_to_rad_per_ns(3.0))
            .with_insert(InsertGate::RxPlusHalfPi)
            .with_random_masks(1, 4, false);
        let s = butterfly_state(&spec, 56.0, &spec.masks[0]).unwrap();
        let before = gme_concurrence_pure(&s).value;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let mut rotated = s.clone();
        for q in 0..6 {
            rotated.apply_1q(q, &Gate::Rz(rng.gen_range(-3.0..3.0))).unwrap();
            rotated.apply_1q(q, &Gate::Ry(rng.gen_range(-3.0..3.0))).unwrap();
            rotated.apply_1q(q, &Gate::Rx(rng.gen_range(-3.0..3.0))).unwrap();
        }
        assert!((gme_concurrence_pure(&rotated).value - before).abs() < 1e-8);
        assert!(before > 0.1);
    }

    #[test]
    fn cut_purity_matches_partial_trace() {
        let s = w3();
        let rho = partial_trace_state(&s, &[0]).unwrap();
        assert!((purity(&rho) - cut_purity(&s, 1)).abs() < 1e-14);
        assert!((cut_purity(&s, 0b011) - 5.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn linear_entropy_matches_purity() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let amps = (0..32).map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let mut s = StateVector::from_amplitudes(amps).unwrap();
        s.normalize();
        for cut in Bipartition::all(5) {
            let a = cut_linear_entropy(&s, cut.mask());
            assert!((a - (1.0 - cut_purity(&s, cut.mask()))).abs() < 1e-12);
            assert!((a - cut_linear_entropy(&s, 31 ^ cut.mask())).abs() < 1e-12);
        }
    }
}
