use serde::Serialize;

use crate::engine::StateVector;
use crate::protocol::{apply_scrambled_operator, run_sensing_abstract, InsertGate, ProtocolSpec, XMask};
use crate::{Error, Result, C64};

/// Distribution of the total polarization `S_z` of a state.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarizationDist {
    n_qubits: usize,
    /// `by_excitations[k] = P(S_z = (N − 2k)/2)`.
    by_excitations: Vec<f64>,
}

impl PolarizationDist {
    pub fn from_excitation_probabilities(by_excitations: Vec<f64>) -> Result<Self> {
        if by_excitations.is_empty() || by_excitations.iter().any(|p| *p < 0.0) {
            return Err(Error::InvalidArgument("probabilities must be non-negative".into()));
        }
        Ok(Self { n_qubits: by_excitations.len() - 1, by_excitations })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    /// `P(S_z)` for `S_z = (N − 2k)/2`.
    pub fn prob_excitations(&self, k: usize) -> f64 {
        self.by_excitations[k]
    }

    /// `P(S_z = sz)`; zero for values not on the lattice.
    pub fn prob(&self, sz: f64) -> f64 {
        let k = (self.n_qubits as f64 / 2.0 - sz).round();
        if k < 0.0 || k > self.n_qubits as f64 || ((self.n_qubits as f64 - 2.0 * k) / 2.0 - sz).abs() > 1e-9 {
            return 0.0;
        }
        self.by_excitations[k as usize]
    }

    /// `(S_z, P(S_z))` from `−N/2` to `+N/2`.
    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        let n = self.n_qubits as f64;
        self.by_excitations.iter().enumerate().rev().map(move |(k, &p)| ((n - 2.0 * k as f64) / 2.0, p))
    }

    pub fn total(&self) -> f64 {
        self.by_excitations.iter().sum()
    }

    /// `Σ S_z P(S_z)`.
    pub fn mean(&self) -> f64 {
        self.iter().map(|(s, p)| s * p).sum()
    }
}

/// `P(S_z = (N−2k)/2) = Σ_{popcount(s)=k} |c_s|²`.
pub fn polarization_distribution(state: &StateVector) -> PolarizationDist {
    let n = state.n_qubits();
    let mut by_excitations = vec![0.0; n + 1];
    for (i, a) in state.amplitudes().iter().enumerate() {
        by_excitations[i.count_ones() as usize] += a.norm_sqr();
    }
    PolarizationDist { n_qubits: n, by_excitations }
}

/// Value and slope at zero of `Im[e^{iφN/2} Σ e^{−iφS_z} P(S_z)]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExpectedV {
    pub value: f64,
    /// `N/2 − Σ S_z P(S_z)`.
    pub derivative_at_zero: f64,
}

pub fn expected_v_from_distribution(dist: &PolarizationDist, phi: f64, n_qubits: usize) -> ExpectedV {
    let half_n = n_qubits as f64 / 2.0;
    let sum: C64 = dist.iter().map(|(sz, p)| C64::from_polar(p, phi * (half_n - sz))).sum();
    ExpectedV { value: sum.im, derivative_at_zero: half_n - dist.mean() }
}

/// `η⁻¹_OTOC = N/2 − Σ_j O_j / 2`.
pub fn eta_inv_from_otoc(otocs: &[f64], n_qubits: usize) -> f64 {
    n_qubits as f64 / 2.0 - otocs.iter().sum::<f64>() / 2.0
}

/// Pieces of the expansion of the sensing signal in terms of `V(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Decomposition {
    /// `⟨σx⟩` from the abstract circuit.
    pub direct: f64,
    /// `½(⟨0|V(t)|0⟩ + ⟨0|V(t) e^{iφS_z} V(t) e^{−iφS_z} V(t)|0⟩)`.
    pub first_term: f64,
    /// `Im[e^{iφN/2} ⟨0|V(t) e^{−iφS_z} V(t)|0⟩]`.
    pub im_term: f64,
    /// `first_term ∓ im_term` for `L_V = (I ± iV)/√2`.
    pub expansion: f64,
    pub residual: f64,
}

/// Evaluate the three-term expansion of `⟨σx⟩` directly from `V(t)|0⟩` and
/// compare with the simulated circuit. Requires `V = X`.
///
/// Expanding `⟨ψ_B| e^{iφS_z} V(t) e^{−iφS_z} |ψ_B⟩` with
/// `|ψ_B⟩ = (I + s·iV(t))|0⟩/√2` gives
/// `½(⟨V(t)⟩ + ⟨V(t)e^{iφS_z}V(t)e^{−iφS_z}V(t)⟩) − s·Im[…]`.
pub fn decomposition_check(spec: &ProtocolSpec, t: f64, phi: f64, mask: &XMask) -> Result<Decomposition> {
    if spec.insert != InsertGate::X {
        return Err(Error::InvalidArgument("decomposition requires V = X".into()));
    }
    let n = spec.n_qubits();
    let direct = run_sensing_abstract(spec, t, phi, mask)?;

    let mut v1 = StateVector::zero(n)?;
    apply_scrambled_operator(spec, t, mask, &mut v1)?;
    let a = v1.amplitudes()[0];

    let mut w = v1.clone();
    w.apply_phase_encoding(phi);
    apply_scrambled_operator(spec, t, mask, &mut w)?;
    w.apply_phase_encoding(-phi);
    let b = v1.inner(&w);

    let mut p = v1.clone();
    p.apply_phase_encoding(phi);
    let z = C64::from_polar(1.0, phi * n as f64 / 2.0) * v1.inner(&p);

    let first_term = 0.5 * (a + b).re;
    let im_term = z.im;
    let expansion = first_term - spec.lv_sign.value() * im_term;
    Ok(Decomposition { direct, first_term, im_term, expansion, residual: (direct - expansion).abs() })
}

/// Reference sensitivities for `N` probes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bounds {
    /// Standard quantum limit `√N`.
    pub sql: f64,
    /// Heisenberg limit `N`.
    pub heisenberg: f64,
    /// Protocol saturation value `N/2`.
    pub protocol: f64,
}

pub fn bounds(n_qubits: usize) -> Result<Bounds> {
    if n_qubits == 0 {
        return Err(Error::QubitCount(0));
    }
    let n = n_qubits as f64;
    Ok(Bounds { sql: n.sqrt(), heisenberg: n, protocol: n / 2.0 })
}
