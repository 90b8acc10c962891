use serde::{Deserialize, Serialize};

use crate::engine::{Circuit, Op, QubitGraph};
use crate::{Error, Result};

/// Coherence and readout parameters of one qubit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QubitNoise {
    /// Energy relaxation time in μs.
    pub t1_us: f64,
    /// Phase coherence time in μs.
    pub t2_us: f64,
    /// Probability of reading 0 when prepared in |0⟩.
    pub f_gg: f64,
    /// Probability of reading 1 when prepared in |1⟩.
    pub f_ee: f64,
}

impl QubitNoise {
    pub const IDEAL: QubitNoise = QubitNoise { t1_us: f64::INFINITY, t2_us: f64::INFINITY, f_gg: 1.0, f_ee: 1.0 };

    pub fn validate(&self) -> Result<()> {
        if !(self.t1_us > 0.0) || !(self.t2_us > 0.0) {
            return Err(Error::InvalidArgument(format!("T1={} μs, T2={} μs must be positive", self.t1_us, self.t2_us)));
        }
        if self.t2_us.is_finite() && self.t2_us > 2.0 * self.t1_us * (1.0 + 1e-12) {
            return Err(Error::InvalidArgument(format!("T2={} μs exceeds 2·T1={} μs", self.t2_us, 2.0 * self.t1_us)));
        }
        for f in [self.f_gg, self.f_ee] {
            if !(f > 0.5 && f <= 1.0) {
                return Err(Error::InvalidArgument(format!("readout fidelity {f} outside (0.5, 1]")));
            }
        }
        Ok(())
    }

    /// `(γ, p)` for an interval of `dt_ns`.
    pub fn channel(&self, dt_ns: f64) -> Result<(f64, f64)> {
        let t1 = self.t1_us * 1e3;
        let t2 = self.t2_us * 1e3;
        Ok((damping_probability(dt_ns, t1)?, dephasing_probability(dt_ns, t1, t2)?))
    }
}

/// Measured per-qubit parameters of the ten-qubit device, in device order
/// Q0…Q9.
pub const TABLE1: [QubitNoise; 10] = [
    QubitNoise { t1_us: 33.9, t2_us: 12.2, f_gg: 0.959, f_ee: 0.939 },
    QubitNoise { t1_us: 24.5, t2_us: 8.8, f_gg: 0.954, f_ee: 0.931 },
    QubitNoise { t1_us: 47.9, t2_us: 4.5, f_gg: 0.943, f_ee: 0.904 },
    QubitNoise { t1_us: 37.7, t2_us: 6.1, f_gg: 0.949, f_ee: 0.914 },
    QubitNoise { t1_us: 31.1, t2_us: 4.6, f_gg: 0.938, f_ee: 0.915 },
    QubitNoise { t1_us: 45.2, t2_us: 4.8, f_gg: 0.959, f_ee: 0.910 },
    QubitNoise { t1_us: 29.7, t2_us: 4.0, f_gg: 0.964, f_ee: 0.887 },
    QubitNoise { t1_us: 39.4, t2_us: 11.0, f_gg: 0.959, f_ee: 0.917 },
    QubitNoise { t1_us: 57.3, t2_us: 3.7, f_gg: 0.953, f_ee: 0.913 },
    QubitNoise { t1_us: 31.1, t2_us: 5.8, f_gg: 0.954, f_ee: 0.886 },
];

/// Markovian single-qubit noise: amplitude damping and pure dephasing
/// applied to every qubit after each time slice, plus readout error.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseModel {
    pub qubits: Vec<QubitNoise>,
    /// Width of the evolution slices after which noise acts, in ns.
    #[serde(default = "default_slice_ns")]
    pub slice_ns: f64,
    /// Duration of a single-qubit gate layer, in ns.
    #[serde(default = "default_gate_ns")]
    pub gate_ns: f64,
}

fn default_slice_ns() -> f64 {
    4.0
}

fn default_gate_ns() -> f64 {
    20.0
}

impl NoiseModel {
    pub fn new(qubits: Vec<QubitNoise>) -> Result<Self> {
        let model = Self { qubits, slice_ns: default_slice_ns(), gate_ns: default_gate_ns() };
        model.validate()?;
        Ok(model)
    }

    /// No decoherence and perfect readout.
    pub fn ideal(n_qubits: usize) -> Self {
        Self { qubits: vec![QubitNoise::IDEAL; n_qubits], slice_ns: default_slice_ns(), gate_ns: default_gate_ns() }
    }

    /// Measured device parameters assigned to a graph: the center takes Q0 and the
    /// remaining qubits take Q1, Q2, … in ascending index order.
    pub fn table1(graph: &QubitGraph) -> Result<Self> {
        let n = graph.n_qubits();
        if n > TABLE1.len() {
            return Err(Error::SizeLimit(format!("table1 preset covers {} qubits, graph has {n}", TABLE1.len())));
        }
        let mut qubits = vec![QubitNoise::IDEAL; n];
        qubits[graph.center()] = TABLE1[0];
        for (k, q) in (0..n).filter(|&q| q != graph.center()).enumerate() {
            qubits[q] = TABLE1[k + 1];
        }
        Self::new(qubits)
    }

    pub fn with_slice_ns(mut self, slice_ns: f64) -> Self {
        self.slice_ns = slice_ns;
        self
    }

    pub fn with_gate_ns(mut self, gate_ns: f64) -> Self {
        self.gate_ns = gate_ns;
        self
    }

    pub fn n_qubits(&self) -> usize {
        self.qubits.len()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.slice_ns > 0.0 && self.slice_ns.is_finite()) {
            return Err(Error::InvalidArgument(format!("slice width {} ns must be positive", self.slice_ns)));
        }
        if !(self.gate_ns >= 0.0 && self.gate_ns.is_finite()) {
            return Err(Error::InvalidArgument(format!("gate duration {} ns must be non-negative", self.gate_ns)));
        }
        self.qubits.iter().try_for_each(QubitNoise::validate)
    }

    pub(crate) fn check_qubits(&self, n_qubits: usize) -> Result<()> {
        self.validate()?;
        if self.n_qubits() != n_qubits {
            return Err(Error::InvalidArgument(format!(
                "noise model covers {} qubits, circuit has {n_qubits}",
                self.n_qubits()
            )));
        }
        Ok(())
    }

    /// Per-qubit `(γ, p)` for an interval of `dt_ns`.
    pub fn channels(&self, dt_ns: f64) -> Result<Vec<(f64, f64)>> {
        self.qubits.iter().map(|q| q.channel(dt_ns)).collect()
    }

    /// The circuit as a list of unitary steps, each followed by a noise
    /// interval of the given duration.
    pub fn schedule(&self, circuit: &Circuit) -> Vec<(Op, f64)> {
        self.schedule_ops(&circuit.ops)
    }

    pub fn schedule_ops(&self, ops: &[Op]) -> Vec<(Op, f64)> {
        let mut steps = Vec::new();
        for op in ops {
            match op {
                Op::Evolve(t) => {
                    if *t == 0.0 {
                        continue;
                    }
                    let n = (t.abs() / self.slice_ns).ceil().max(1.0) as usize;
                    let dt = t / n as f64;
                    steps.extend(std::iter::repeat_n((Op::Evolve(dt), dt.abs()), n));
                }
                other => steps.push((other.clone(), self.gate_ns)),
            }
        }
        steps
    }
}

/// Amplitude-damping probability `γ = 1 − e^{−Δt/T1}` (times in the same unit).
pub fn damping_probability(dt: f64, t1: f64) -> Result<f64> {
    if !(dt >= 0.0) || !(t1 > 0.0) {
        return Err(Error::InvalidArgument(format!("need Δt ≥ 0 and T1 > 0, got Δt={dt}, T1={t1}")));
    }
    Ok(-(-dt / t1).exp_m1())
}

/// Pure-dephasing flip probability `p = (1 − e^{−Δt/Tφ})/2` with
/// `1/Tφ = 1/T2 − 1/(2T1)`.
pub fn dephasing_probability(dt: f64, t1: f64, t2: f64) -> Result<f64> {
    if !(dt >= 0.0) || !(t1 > 0.0) || !(t2 > 0.0) {
        return Err(Error::InvalidArgument(format!("need Δt ≥ 0 and T1, T2 > 0, got Δt={dt}, T1={t1}, T2={t2}")));
    }
    let rate = 1.0 / t2 - 0.5 / t1;
    if rate < -1e-12 / t2 {
        return Err(Error::InvalidArgument(format!("T2={t2} exceeds 2·T1={}", 2.0 * t1)));
    }
    Ok(-0.5 * (-dt * rate.max(0.0)).exp_m1())
}
