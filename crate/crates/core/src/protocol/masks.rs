use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Which qubits receive an initial `X` gate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct XMask(Vec<bool>);

impl XMask {
    pub fn new(bits: Vec<bool>) -> Self {
        Self(bits)
    }

    pub fn none(n_qubits: usize) -> Self {
        Self(vec![false; n_qubits])
    }

    pub fn from_bits(n_qubits: usize, bits: usize) -> Self {
        Self((0..n_qubits).map(|q| bits >> q & 1 == 1).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, qubit: usize) -> bool {
        self.0[qubit]
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.0
    }

    /// Bit mask with bit `q` set when qubit `q` is flipped.
    pub fn bits(&self) -> usize {
        self.0.iter().enumerate().filter(|(_, b)| **b).fold(0, |m, (q, _)| m | (1 << q))
    }

    pub fn iter_set(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, b)| **b).map(|(q, _)| q)
    }

    pub fn without(mut self, qubit: usize) -> Self {
        if qubit < self.0.len() {
            self.0[qubit] = false;
        }
        self
    }
}

/// `n_sets` masks, each qubit flipped independently with probability ½.
/// Deterministic in `seed` (ChaCha8 stream).
pub fn sample_x_masks(n_qubits: usize, n_sets: usize, seed: u64) -> Vec<XMask> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n_sets).map(|_| XMask((0..n_qubits).map(|_| rng.gen_bool(0.5)).collect())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn deterministic_in_seed() {
        assert_eq!(sample_x_masks(6, 10, 42), sample_x_masks(6, 10, 42));
        assert_ne!(sample_x_masks(6, 10, 42), sample_x_masks(6, 10, 43));
    }

    #[test]
    fn shape() {
        let masks = sample_x_masks(6, 10, 1);
        assert_eq!(masks.len(), 10);
        assert!(masks.iter().all(|m| m.len() == 6));
    }

    #[test]
    fn per_qubit_rate_is_half() {
        let masks = sample_x_masks(8, 10_000, 7);
        for q in 0..8 {
            let rate = masks.iter().filter(|m| m.get(q)).count() as f64 / 1e4;
            assert!((0.47..=0.53).contains(&rate), "qubit {q}: {rate}");
        }
    }

    #[test]
    fn bits_round_trip() {
        let m = XMask::from_bits(5, 0b10110);
        assert_eq!(m.bits(), 0b10110);
        assert_eq!(m.iter_set().collect::<Vec<_>>(), vec![1, 2, 4]);
        assert_eq!(m.without(2).bits(), 0b10010);
    }
}
