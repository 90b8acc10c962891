use crate::{Error, Result};

use super::model::NoiseModel;

/// Tensor product of single-qubit assignment matrices
/// `M = [[f_gg, 1−f_ee], [1−f_gg, f_ee]]`, one per measured qubit. Qubit `k`
/// of the list is bit `k` of an outcome index.
#[derive(Debug, Clone, PartialEq)]
pub struct AssignmentMatrix {
    fidelities: Vec<(f64, f64)>,
}

/// Readout-corrected quasi-probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct Corrected {
    pub probabilities: Vec<f64>,
    /// Some corrected entry lies outside `[0, 1]` (kept as is).
    pub out_of_range: bool,
}

const SINGULAR_TOLERANCE: f64 = 1e-9;

impl AssignmentMatrix {
    pub fn new(fidelities: Vec<(f64, f64)>) -> Result<Self> {
        if fidelities.is_empty() {
            return Err(Error::InvalidArgument("assignment matrix needs at least one qubit".into()));
        }
        for &(f_gg, f_ee) in &fidelities {
            if !(0.0..=1.0).contains(&f_gg) || !(0.0..=1.0).contains(&f_ee) {
                return Err(Error::InvalidArgument(format!("readout fidelities ({f_gg}, {f_ee}) outside [0, 1]")));
            }
            if f_gg + f_ee - 1.0 <= SINGULAR_TOLERANCE {
                return Err(Error::SingularAssignment(f_gg + f_ee));
            }
        }
        Ok(Self { fidelities })
    }

    pub fn single(f_gg: f64, f_ee: f64) -> Result<Self> {
        Self::new(vec![(f_gg, f_ee)])
    }

    pub fn identity(n_qubits: usize) -> Self {
        Self { fidelities: vec![(1.0, 1.0); n_qubits] }
    }

    /// Assignment matrix for the given measured qubits of a noise model.
    pub fn for_qubits(noise: &NoiseModel, qubits: &[usize]) -> Result<Self> {
        let fid = qubits
            .iter()
            .map(|&q| {
                noise
                    .qubits
                    .get(q)
                    .map(|n| (n.f_gg, n.f_ee))
                    .ok_or(Error::QubitIndex { index: q, n_qubits: noise.n_qubits() })
            })
            .collect::<Result<_>>()?;
        Self::new(fid)
    }

    pub fn n_qubits(&self) -> usize {
        self.fidelities.len()
    }

    /// `p_meas = M p_true`.
    pub fn apply(&self, p: &[f64]) -> Result<Vec<f64>> {
        self.check_len(p)?;
        let mut out = p.to_vec();
        for (q, &(f_gg, f_ee)) in self.fidelities.iter().enumerate() {
            apply_2x2(&mut out, q, [[f_gg, 1.0 - f_ee], [1.0 - f_gg, f_ee]]);
        }
        Ok(out)
    }

    /// `p_cali = M⁻¹ p_meas`.
    pub fn correct(&self, p: &[f64]) -> Result<Corrected> {
        self.check_len(p)?;
        let mut out = p.to_vec();
        for (q, &(f_gg, f_ee)) in self.fidelities.iter().enumerate() {
            let det = f_gg + f_ee - 1.0;
            apply_2x2(&mut out, q, [[f_ee / det, -(1.0 - f_ee) / det], [-(1.0 - f_gg) / det, f_gg / det]]);
        }
        let out_of_range = out.iter().any(|&x| !(-1e-12..=1.0 + 1e-12).contains(&x));
        Ok(Corrected { probabilities: out, out_of_range })
    }

    /// Measured `⟨σz⟩` of a single-qubit matrix given the true value.
    pub fn apply_to_expectation(&self, z: f64) -> Result<f64> {
        let p = self.apply(&[(1.0 + z) / 2.0, (1.0 - z) / 2.0])?;
        Ok(p[0] - p[1])
    }

    /// Readout-corrected `⟨σz⟩` of a single-qubit matrix.
    pub fn correct_expectation(&self, z: f64) -> Result<f64> {
        let p = self.correct(&[(1.0 + z) / 2.0, (1.0 - z) / 2.0])?;
        Ok(p.probabilities[0] - p.probabilities[1])
    }

    fn check_len(&self, p: &[f64]) -> Result<()> {
        if p.len() != 1 << self.n_qubits() {
            return Err(Error::InvalidArgument(format!(
                "distribution of length {} does not match {} measured qubits",
                p.len(),
                self.n_qubits()
            )));
        }
        Ok(())
    }
}

fn apply_2x2(p: &mut [f64], qubit: usize, m: [[f64; 2]; 2]) {
    let bit = 1usize << qubit;
    for i in (0..p.len()).filter(|i| i & bit == 0) {
        let (a, b) = (p[i], p[i | bit]);
        p[i] = m[0][0] * a + m[0][1] * b;
        p[i | bit] = m[1][0] * a + m[1][1] * b;
    }
}
