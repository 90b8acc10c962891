use crate::{Error, Result, C64};

use super::MAX_QUBITS;

/// 2×2 complex matrix, row-major.
pub type Mat2 = [[C64; 2]; 2];

const UNITARY_TOL: f64 = 1e-10;

/// Single-qubit gates. Rotations follow `Rα(θ) = exp(−iθσα/2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    I,
    X,
    Y,
    Z,
    Rx(f64),
    Ry(f64),
    Rz(f64),
    Unitary(Mat2),
}

impl Gate {
    pub fn matrix(&self) -> Mat2 {
        let z = C64::new(0.0, 0.0);
        let one = C64::new(1.0, 0.0);
        let i = C64::new(0.0, 1.0);
        match *self {
            Gate::I => [[one, z], [z, one]],
            Gate::X => [[z, one], [one, z]],
            Gate::Y => [[z, -i], [i, z]],
            Gate::Z => [[one, z], [z, -one]],
            Gate::Rx(theta) => {
                let (s, c) = (theta / 2.0).sin_cos();
                [[C64::new(c, 0.0), C64::new(0.0, -s)], [C64::new(0.0, -s), C64::new(c, 0.0)]]
            }
            Gate::Ry(theta) => {
                let (s, c) = (theta / 2.0).sin_cos();
                [[C64::new(c, 0.0), C64::new(-s, 0.0)], [C64::new(s, 0.0), C64::new(c, 0.0)]]
            }
            Gate::Rz(theta) => {
                [[C64::from_polar(1.0, -theta / 2.0), z], [z, C64::from_polar(1.0, theta / 2.0)]]
            }
            Gate::Unitary(m) => m,
        }
    }

    /// Largest entry of `U†U − I`.
    pub fn unitarity_error(&self) -> f64 {
        let m = self.matrix();
        let mut worst = 0.0f64;
        for r in 0..2 {
            for c in 0..2 {
                let mut acc = C64::new(0.0, 0.0);
                for row in &m {
                    acc += row[r].conj() * row[c];
                }
                if r == c {
                    acc -= 1.0;
                }
                worst = worst.max(acc.norm());
            }
        }
        worst
    }

    fn diagonal(&self) -> Option<(C64, C64)> {
        match *self {
            Gate::I => None,
            Gate::Z => Some((C64::new(1.0, 0.0), C64::new(-1.0, 0.0))),
            Gate::Rz(theta) => {
                Some((C64::from_polar(1.0, -theta / 2.0), C64::from_polar(1.0, theta / 2.0)))
            }
            _ => None,
        }
    }
}

/// Pure state of `n` qubits. Basis index bit `k` is the state of qubit `k`
/// (little-endian); a set bit means `|1⟩`, and `σz|0⟩ = +|0⟩`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<C64>,
}

impl StateVector {
    /// The fully polarized state `|00…0⟩`.
    pub fn zero(n_qubits: usize) -> Result<Self> {
        check_qubit_count(n_qubits)?;
        let mut amps = vec![C64::new(0.0, 0.0); 1 << n_qubits];
        amps[0] = C64::new(1.0, 0.0);
        Ok(Self { n_qubits, amps })
    }

    /// Computational basis state with the given index.
    pub fn basis(n_qubits: usize, index: usize) -> Result<Self> {
        let mut s = Self::zero(n_qubits)?;
        if index >= s.amps.len() {
            return Err(Error::InvalidArgument(format!(
                "basis index {index} out of range for {n_qubits} qubits"
            )));
        }
        s.amps[0] = C64::new(0.0, 0.0);
        s.amps[index] = C64::new(1.0, 0.0);
        Ok(s)
    }

    /// Wrap raw amplitudes. The length must be a power of two; no
    /// normalization is applied.
    pub fn from_amplitudes(amps: Vec<C64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidArgument(format!(
                "amplitude count {len} is not a power of two >= 2"
            )));
        }
        let n_qubits = len.trailing_zeros() as usize;
        check_qubit_count(n_qubits)?;
        Ok(Self { n_qubits, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn amplitudes_mut(&mut self) -> &mut [C64] {
        &mut self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            let inv = 1.0 / n;
            self.amps.iter_mut().for_each(|a| *a *= inv);
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> C64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    /// `|⟨self|other⟩|²`.
    pub fn fidelity(&self, other: &StateVector) -> f64 {
        self.inner(other).norm_sqr()
    }

    pub fn check_qubit(&self, qubit: usize) -> Result<()> {
        if qubit >= self.n_qubits {
            return Err(Error::QubitIndex { index: qubit, n_qubits: self.n_qubits });
        }
        Ok(())
    }

    /// Apply a single-qubit gate to `qubit`.
    pub fn apply_1q(&mut self, qubit: usize, gate: &Gate) -> Result<()> {
        self.check_qubit(qubit)?;
        if let Gate::Unitary(_) = gate {
            let err = gate.unitarity_error();
            if err > UNITARY_TOL {
                return Err(Error::NonUnitary(err));
            }
        }
        match gate {
            Gate::I => {}
            Gate::X => {
                let stride = 1usize << qubit;
                for block in self.amps.chunks_exact_mut(stride << 1) {
                    let (lo, hi) = block.split_at_mut(stride);
                    lo.swap_with_slice(hi);
                }
            }
            g => {
                if let Some((d0, d1)) = g.diagonal() {
                    let mask = 1usize << qubit;
                    for (i, a) in self.amps.iter_mut().enumerate() {
                        *a *= if i & mask == 0 { d0 } else { d1 };
                    }
                } else {
                    self.apply_matrix(qubit, &g.matrix());
                }
            }
        }
        Ok(())
    }

    fn apply_matrix(&mut self, qubit: usize, m: &Mat2) {
        let stride = 1usize << qubit;
        for block in self.amps.chunks_exact_mut(stride << 1) {
            let (lo, hi) = block.split_at_mut(stride);
            for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
                let (x, y) = (*a, *b);
                *a = m[0][0] * x + m[0][1] * y;
                *b = m[1][0] * x + m[1][1] * y;
            }
        }
    }

    /// `exp(−iφ S_z)` with `S_z = ½Σσz`: a basis state with `k` excitations
    /// picks up `exp(−iφ(N−2k)/2)`.
    pub fn apply_phase_encoding(&mut self, phi: f64) {
        let n = self.n_qubits as f64;
        let phases: Vec<C64> = (0..=self.n_qubits)
            .map(|k| C64::from_polar(1.0, -phi * (n - 2.0 * k as f64) / 2.0))
            .collect();
        for (i, a) in self.amps.iter_mut().enumerate() {
            *a *= phases[i.count_ones() as usize];
        }
    }

    /// Apply `Z` to every qubit in `mask` (a product of Pauli Z operators).
    pub fn apply_z_mask(&mut self, mask: usize) {
        for (i, a) in self.amps.iter_mut().enumerate() {
            if (i & mask).count_ones() & 1 == 1 {
                *a = -*a;
            }
        }
    }

    /// Apply `X` to every qubit in `mask`.
    pub fn apply_x_mask(&mut self, mask: usize) {
        if mask == 0 {
            return;
        }
        for i in 0..self.amps.len() {
            let j = i ^ mask;
            if i < j {
                self.amps.swap(i, j);
            }
        }
    }

    pub fn expect_z(&self, qubit: usize) -> Result<f64> {
        self.check_qubit(qubit)?;
        let mask = 1usize << qubit;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| if i & mask == 0 { a.norm_sqr() } else { -a.norm_sqr() })
            .sum())
    }

    pub fn expect_x(&self, qubit: usize) -> Result<f64> {
        self.check_qubit(qubit)?;
        Ok(2.0 * self.pair_sum(qubit).re)
    }

    pub fn expect_y(&self, qubit: usize) -> Result<f64> {
        self.check_qubit(qubit)?;
        Ok(2.0 * self.pair_sum(qubit).im)
    }

    /// `Σ conj(a_{b=0}) a_{b=1}` over pairs differing in `qubit`.
    fn pair_sum(&self, qubit: usize) -> C64 {
        let stride = 1usize << qubit;
        let mut acc = C64::new(0.0, 0.0);
        for block in self.amps.chunks_exact(stride << 1) {
            let (lo, hi) = block.split_at(stride);
            for (a, b) in lo.iter().zip(hi) {
                acc += a.conj() * b;
            }
        }
        acc
    }

    /// `⟨S_z⟩ = ½Σ⟨σz⟩`.
    pub fn expect_sz(&self) -> f64 {
        let n = self.n_qubits as f64;
        self.amps
            .iter()
            .enumerate()
            .map(|(i, a)| a.norm_sqr() * (n - 2.0 * i.count_ones() as f64) / 2.0)
            .sum()
    }

    /// Probability of `|1⟩` on `qubit`.
    pub fn excited_population(&self, qubit: usize) -> f64 {
        let mask = 1usize << qubit;
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }
}

fn check_qubit_count(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::QubitCount(n));
    }
    Ok(())
}
