use nalgebra::DMatrix;
use rand::distributions::{Distribution, WeightedIndex};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::FRAC_PI_2;

use crate::engine::{Gate, StateVector};
use crate::{Error, Result, C64};

use super::density::{psd_project, DensityMatrix};

/// Largest register handled by full local-Pauli tomography (3^N settings).
pub const MAX_TOMOGRAPHY_QUBITS: usize = 7;

/// Sampling budget for each measurement setting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shots {
    /// Use the Born probabilities themselves (infinite shots).
    Exact,
    PerSetting(u32),
}

/// Simulated local-Pauli tomography of a pure state: measure all `3^N`
/// settings, reconstruct by linear inversion over all `4^N` Pauli strings,
/// then project onto the physical (PSD, unit trace) set.
pub fn simulate_tomography(state: &StateVector, shots: Shots, seed: u64) -> Result<DensityMatrix> {
    let n = state.n_qubits();
    if n > MAX_TOMOGRAPHY_QUBITS {
        return Err(Error::SizeLimit(format!("tomography supports at most {MAX_TOMOGRAPHY_QUBITS} qubits, got {n}")));
    }
    if shots == Shots::PerSetting(0) {
        return Err(Error::InvalidArgument("shots per setting must be at least 1".into()));
    }
    let dim = 1usize << n;
    let n_settings = 3usize.pow(n as u32);
    let n_paulis = 4usize.pow(n as u32);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // Pauli string index: base-4 digits per qubit, 0=I 1=X 2=Y 3=Z.
    let mut sums = vec![0.0; n_paulis];
    let mut counts = vec![0u32; n_paulis];
    let mut freq = vec![0.0; dim];
    for setting in 0..n_settings {
        let bases = digits(setting, 3, n);
        let mut rotated = state.clone();
        for (q, &b) in bases.iter().enumerate() {
            match b {
                0 => rotated.apply_1q(q, &Gate::Ry(-FRAC_PI_2))?,
                1 => rotated.apply_1q(q, &Gate::Rx(FRAC_PI_2))?,
                _ => {}
            }
        }
        let probs = rotated.probabilities();
        match shots {
            Shots::Exact => freq.copy_from_slice(&probs),
            Shots::PerSetting(k) => {
                freq.iter_mut().for_each(|f| *f = 0.0);
                let dist = WeightedIndex::new(&probs).map_err(|e| Error::InvalidArgument(e.to_string()))?;
                for _ in 0..k {
                    freq[dist.sample(&mut rng)] += 1.0;
                }
                freq.iter_mut().for_each(|f| *f /= k as f64);
            }
        }
        // every subset of qubits gives one compatible Pauli string
        for subset in 0..dim {
            let parity: f64 = freq
                .iter()
                .enumerate()
                .map(|(j, f)| if (j & subset).count_ones() % 2 == 0 { *f } else { -*f })
                .sum();
            let pauli = (0..n).filter(|q| subset >> q & 1 == 1).map(|q| (bases[q] + 1) * 4usize.pow(q as u32)).sum::<usize>();
            sums[pauli] += parity;
            counts[pauli] += 1;
        }
    }

    let scale = 1.0 / dim as f64;
    let mut rho = DMatrix::<C64>::zeros(dim, dim);
    for pauli in 0..n_paulis {
        let expectation = sums[pauli] / counts[pauli] as f64;
        let (mut x, mut z, mut n_y) = (0usize, 0usize, 0u32);
        for (q, d) in digits(pauli, 4, n).into_iter().enumerate() {
            match d {
                1 => x |= 1 << q,
                2 => {
                    x |= 1 << q;
                    z |= 1 << q;
                    n_y += 1;
                }
                3 => z |= 1 << q,
                _ => {}
            }
        }
        // P|j⟩ = i^{nY} (−1)^{|j∧z|} |j ⊕ x⟩
        let phase = C64::i().powu(n_y) * (expectation * scale);
        for j in 0..dim {
            let sign = if (j & z).count_ones() % 2 == 0 { 1.0 } else { -1.0 };
            rho[(j ^ x, j)] += phase * sign;
        }
    }
    Ok(psd_project(&DensityMatrix::from_matrix(rho)?))
}

fn digits(mut value: usize, base: usize, len: usize) -> Vec<usize> {
    (0..len)
        .map(|_| {
            let d = value % base;
            value /= base;
            d
        })
        .collect()
}
