use std::sync::OnceLock;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::{Error, Result, C64};

use super::graph::QubitGraph;
use super::state::StateVector;

/// How `exp(−iHt)` is computed.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum EvolutionMethod {
    /// Spectral decomposition of each excitation-number block.
    #[default]
    ExactEigen,
    /// Symmetric second-order product formula over edge terms with step `dt` (ns).
    Trotter2 { dt: f64 },
}

/// Eigendecomposition of one fixed-excitation block of `H`.
#[derive(Debug, Clone)]
pub struct SectorSpectrum {
    /// Basis indices with this popcount, ascending.
    pub basis: Vec<usize>,
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns (column-major, `basis.len()`²).
    pub eigenvectors: DMatrix<f64>,
}

/// `H = J Σ_{⟨m,n⟩} (σx^m σx^n + σy^m σy^n)` on a [`QubitGraph`].
///
/// `H` conserves the number of excitations, so the spectrum is computed per
/// popcount sector and cached on first use. The cache is write-once and the
/// value can be shared read-only across threads.
#[derive(Debug)]
pub struct Hamiltonian {
    graph: QubitGraph,
    coupling: f64,
    spectrum: OnceLock<Vec<SectorSpectrum>>,
}

impl Clone for Hamiltonian {
    fn clone(&self) -> Self {
        let spectrum = OnceLock::new();
        if let Some(s) = self.spectrum.get() {
            let _ = spectrum.set(s.clone());
        }
        Self { graph: self.graph.clone(), coupling: self.coupling, spectrum }
    }
}

impl Hamiltonian {
    /// `coupling` is `J` in rad/ns.
    pub fn new(graph: QubitGraph, coupling: f64) -> Self {
        Self { graph, coupling, spectrum: OnceLock::new() }
    }

    /// Build from a linear coupling frequency in MHz (`J = 2π·f`).
    pub fn from_mhz(graph: QubitGraph, coupling_mhz: f64) -> Self {
        Self::new(graph, mhz_to_rad_per_ns(coupling_mhz))
    }

    pub fn graph(&self) -> &QubitGraph {
        &self.graph
    }

    pub fn coupling(&self) -> f64 {
        self.coupling
    }

    pub fn n_qubits(&self) -> usize {
        self.graph.n_qubits()
    }

    /// Edge terms `(m, n, J)`; each stands for `J(XX + YY)` on the pair.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.graph.edges().iter().map(move |&(a, b)| (a, b, self.coupling))
    }

    /// Dense `2^N × 2^N` real-symmetric matrix.
    pub fn dense(&self) -> DMatrix<f64> {
        let dim = 1usize << self.n_qubits();
        let mut h = DMatrix::zeros(dim, dim);
        for s in 0..dim {
            for (a, b, j) in self.terms() {
                let pair = (1usize << a) | (1usize << b);
                let bits = s & pair;
                if bits != 0 && bits != pair {
                    h[(s ^ pair, s)] += 2.0 * j;
                }
            }
        }
        h
    }

    fn sector_matrix(&self, basis: &[usize]) -> DMatrix<f64> {
        let n = basis.len();
        let mut m = DMatrix::zeros(n, n);
        for (col, &s) in basis.iter().enumerate() {
            for (a, b, j) in self.terms() {
                let pair = (1usize << a) | (1usize << b);
                let bits = s & pair;
                if bits != 0 && bits != pair {
                    let row = basis.binary_search(&(s ^ pair)).expect("sector closed under hopping");
                    m[(row, col)] += 2.0 * j;
                }
            }
        }
        m
    }

    /// Per-sector spectrum, computed on first call.
    pub fn spectrum(&self) -> Result<&[SectorSpectrum]> {
        if let Some(s) = self.spectrum.get() {
            return Ok(s);
        }
        let n = self.n_qubits();
        let mut sectors: Vec<Vec<usize>> = vec![Vec::new(); n + 1];
        for s in 0..(1usize << n) {
            sectors[s.count_ones() as usize].push(s);
        }
        let mut out = Vec::with_capacity(n + 1);
        for basis in sectors {
            let m = self.sector_matrix(&basis);
            let asym = (&m - m.transpose()).amax();
            if asym > 0.0 {
                return Err(Error::Spectrum(format!("sector matrix not symmetric ({asym:.3e})")));
            }
            let eig = SymmetricEigen::try_new(m, 1e-15, 0)
                .ok_or_else(|| Error::Spectrum("eigensolver did not converge".into()))?;
            out.push(SectorSpectrum {
                basis,
                eigenvalues: eig.eigenvalues.iter().copied().collect(),
                eigenvectors: eig.eigenvectors,
            });
        }
        let _ = self.spectrum.set(out);
        Ok(self.spectrum.get().expect("spectrum just set"))
    }

    /// All eigenvalues, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let mut all: Vec<f64> =
            self.spectrum()?.iter().flat_map(|s| s.eigenvalues.iter().copied()).collect();
        all.sort_by(f64::total_cmp);
        Ok(all)
    }

    /// `|ψ⟩ ← exp(−iHt)|ψ⟩`; `t` in ns and may be negative.
    pub fn evolve(&self, state: &mut StateVector, t: f64, method: EvolutionMethod) -> Result<()> {
        if state.n_qubits() != self.n_qubits() {
            return Err(Error::InvalidArgument(format!(
                "state has {} qubits, Hamiltonian {}",
                state.n_qubits(),
                self.n_qubits()
            )));
        }
        if t == 0.0 || self.graph.edges().is_empty() {
            return Ok(());
        }
        match method {
            EvolutionMethod::ExactEigen => self.evolve_exact(state, t),
            EvolutionMethod::Trotter2 { dt } => {
                if !(dt > 0.0) {
                    return Err(Error::InvalidArgument(format!("Trotter step must be > 0, got {dt}")));
                }
                self.evolve_trotter2(state, t, dt);
                Ok(())
            }
        }
    }

    fn evolve_exact(&self, state: &mut StateVector, t: f64) -> Result<()> {
        let spectrum = self.spectrum()?;
        let amps = state.amplitudes_mut();
        let mut local = Vec::new();
        let mut coeff = Vec::new();
        for sector in spectrum {
            let dim = sector.basis.len();
            local.clear();
            local.extend(sector.basis.iter().map(|&s| amps[s]));
            if local.iter().all(|a| a.re == 0.0 && a.im == 0.0) {
                continue;
            }
            let v = sector.eigenvectors.as_slice();
            coeff.clear();
            for (k, &e) in sector.eigenvalues.iter().enumerate() {
                let col = &v[k * dim..(k + 1) * dim];
                let mut acc = C64::new(0.0, 0.0);
                for (&x, a) in col.iter().zip(&local) {
                    acc += a * x;
                }
                coeff.push(acc * C64::from_polar(1.0, -e * t));
            }
            local.iter_mut().for_each(|a| *a = C64::new(0.0, 0.0));
            for (k, c) in coeff.iter().enumerate() {
                let col = &v[k * dim..(k + 1) * dim];
                for (&x, a) in col.iter().zip(local.iter_mut()) {
                    *a += c * x;
                }
            }
            for (&s, a) in sector.basis.iter().zip(&local) {
                amps[s] = *a;
            }
        }
        Ok(())
    }

    fn evolve_trotter2(&self, state: &mut StateVector, t: f64, dt: f64) {
        let steps = ((t.abs() / dt) - 1e-9).ceil().max(1.0) as usize;
        let tau = t / steps as f64;
        let edges = self.graph.edges();
        for _ in 0..steps {
            for &(a, b) in edges {
                apply_hop(state, a, b, self.coupling * tau / 2.0);
            }
            for &(a, b) in edges.iter().rev() {
                apply_hop(state, a, b, self.coupling * tau / 2.0);
            }
        }
    }
}

/// `exp(−iθ(XX+YY))` on qubits `a`, `b`: a rotation by `2θ` inside the
/// `{|01⟩, |10⟩}` subspace, identity elsewhere.
pub fn apply_hop(state: &mut StateVector, a: usize, b: usize, theta: f64) {
    let (s, c) = (2.0 * theta).sin_cos();
    let off = C64::new(0.0, -s);
    let (ma, mb) = (1usize << a, 1usize << b);
    let amps = state.amplitudes_mut();
    for i in 0..amps.len() {
        if i & ma != 0 && i & mb == 0 {
            let j = i ^ ma ^ mb;
            let (x, y) = (amps[i], amps[j]);
            amps[i] = x * c + y * off;
            amps[j] = y * c + x * off;
        }
    }
}

/// `2π·f` with `f` in MHz, giving rad/ns.
pub fn mhz_to_rad_per_ns(f_mhz: f64) -> f64 {
    2.0 * std::f64::consts::PI * f_mhz * 1e-3
}
