//! Butterfly-metrology circuits: sensing, OTOC, reference and butterfly-state
//! preparation, each available in an abstract form (explicit `exp(+iHt)`)
//! and a hardware form (backward evolution realised by `Σ_Z` conjugation).
//!
//! With `U = exp(−iHt)·Π_k X_k` (the random X layer acts first), the sensing
//! circuit prepares `U e^{−iφS_z} U† L_V U |0⟩` and reads `⟨σx⟩` on the
//! center qubit.

mod masks;

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::engine::{Circuit, Color, EvolutionMethod, Gate, Hamiltonian, Observable, Op, QubitGraph, StateVector};
use crate::{Error, Result};

pub use masks::{sample_x_masks, XMask};

/// How backward evolution and the readout basis change are realised.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// `U†` applied directly as `exp(+iHt)`; `⟨σx⟩` read out directly.
    #[default]
    Abstract,
    /// `exp(+iHt) = Σ_Z exp(−iHt) Σ_Z`, four-case Z encoding layer and a
    /// `Y/2` basis change before a `σz` readout.
    Hardware,
}

/// Sign in `L_V = (I ± iV)/√2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LvSign {
    /// `(I + iV)/√2`; gives `⟨σx⟩ = −sin φ` in the single-qubit limit.
    #[default]
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
}

impl LvSign {
    pub fn value(self) -> f64 {
        match self {
            LvSign::Plus => 1.0,
            LvSign::Minus => -1.0,
        }
    }
}

/// The local operation inserted on the center qubit between the forward and
/// backward evolutions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum InsertGate {
    /// `V = X`; sensing uses `L_V = (I ± iX)/√2`, the OTOC uses `X` itself.
    #[default]
    #[serde(rename = "x")]
    X,
    #[serde(rename = "rx+pi/2")]
    RxPlusHalfPi,
    #[serde(rename = "rx-pi/2")]
    RxMinusHalfPi,
    #[serde(rename = "i")]
    Identity,
}

impl InsertGate {
    /// Gate used for the butterfly (`L_V`) insertion.
    pub fn local_operator(self, sign: LvSign) -> Gate {
        match self {
            // (I + iX)/√2 = Rx(−π/2)
            InsertGate::X => Gate::Rx(-sign.value() * FRAC_PI_2),
            InsertGate::RxPlusHalfPi => Gate::Rx(FRAC_PI_2),
            InsertGate::RxMinusHalfPi => Gate::Rx(-FRAC_PI_2),
            InsertGate::Identity => Gate::I,
        }
    }

    /// Gate used as `V` in the OTOC circuit.
    pub fn otoc_operator(self) -> Gate {
        match self {
            InsertGate::X => Gate::X,
            InsertGate::RxPlusHalfPi => Gate::Rx(FRAC_PI_2),
            InsertGate::RxMinusHalfPi => Gate::Rx(-FRAC_PI_2),
            InsertGate::Identity => Gate::I,
        }
    }
}

/// Full description of a sensing experiment.
#[derive(Debug, Clone)]
pub struct ProtocolSpec {
    hamiltonian: Arc<Hamiltonian>,
    pub insert: InsertGate,
    pub lv_sign: LvSign,
    pub mode: Mode,
    pub method: EvolutionMethod,
    /// Evolution times (ns).
    pub times: Vec<f64>,
    /// Encoded phases (rad).
    pub phis: Vec<f64>,
    pub masks: Vec<XMask>,
    pub seed: u64,
}

impl ProtocolSpec {
    /// Defaults: `V = X` with `L_V = (I + iX)/√2`, abstract mode, exact
    /// evolution, t = 0…160 ns in 8 ns steps, 41 phases on `[−π, π]`, and a
    /// single all-zero mask.
    pub fn new(hamiltonian: Arc<Hamiltonian>) -> Self {
        let n = hamiltonian.n_qubits();
        Self {
            hamiltonian,
            insert: InsertGate::X,
            lv_sign: LvSign::Plus,
            mode: Mode::Abstract,
            method: EvolutionMethod::ExactEigen,
            times: (0..=20).map(|k| 8.0 * k as f64).collect(),
            phis: uniform_phis(41),
            masks: vec![XMask::none(n)],
            seed: 0,
        }
    }

    /// Convenience constructor from a graph and `J` in rad/ns.
    pub fn from_graph(graph: QubitGraph, coupling: f64) -> Self {
        Self::new(Arc::new(Hamiltonian::new(graph, coupling)))
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_insert(mut self, insert: InsertGate) -> Self {
        self.insert = insert;
        self
    }

    pub fn with_lv_sign(mut self, sign: LvSign) -> Self {
        self.lv_sign = sign;
        self
    }

    pub fn with_method(mut self, method: EvolutionMethod) -> Self {
        self.method = method;
        self
    }

    /// Draw `n_sets` random masks from `seed`, optionally never flipping the
    /// center qubit.
    pub fn with_random_masks(mut self, n_sets: usize, seed: u64, exclude_center: bool) -> Self {
        let n = self.n_qubits();
        let center = self.graph().center();
        self.seed = seed;
        self.masks = sample_x_masks(n, n_sets, seed)
            .into_iter()
            .map(|m| if exclude_center { m.without(center) } else { m })
            .collect();
        self
    }

    pub fn hamiltonian(&self) -> &Hamiltonian {
        &self.hamiltonian
    }

    pub fn shared_hamiltonian(&self) -> Arc<Hamiltonian> {
        Arc::clone(&self.hamiltonian)
    }

    pub fn graph(&self) -> &QubitGraph {
        self.hamiltonian.graph()
    }

    pub fn n_qubits(&self) -> usize {
        self.hamiltonian.n_qubits()
    }

    pub fn center(&self) -> usize {
        self.graph().center()
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(t) = self.times.iter().find(|t| !(**t >= 0.0) || !t.is_finite()) {
            return Err(Error::InvalidArgument(format!("evolution time {t} must be finite and >= 0")));
        }
        let n = self.n_qubits();
        if let Some(m) = self.masks.iter().find(|m| m.len() != n) {
            return Err(Error::InvalidArgument(format!("mask of length {} for {n} qubits", m.len())));
        }
        Ok(())
    }

    fn check_mask(&self, mask: &XMask) -> Result<()> {
        if mask.len() != self.n_qubits() {
            return Err(Error::InvalidArgument(format!(
                "mask of length {} for {} qubits",
                mask.len(),
                self.n_qubits()
            )));
        }
        Ok(())
    }

    fn x_layer(&self, mask: &XMask) -> Op {
        Op::Layer(mask.iter_set().map(|q| (q, Gate::X)).collect())
    }

    fn sigma_z_layer(&self) -> Vec<(usize, Gate)> {
        let g = self.graph();
        (0..g.n_qubits()).filter(|&q| g.color(q) == Color::Red).map(|q| (q, Gate::Z)).collect()
    }

    /// Ops for `U† G U` minus the trailing X layer, where `G` is `gate` on
    /// the center qubit, using the spec's mode for the backward evolution.
    fn echo_ops(&self, t: f64, gate: Gate, mask: &XMask, mode: Mode) -> Vec<Op> {
        let center = self.center();
        let mut ops = vec![self.x_layer(mask), Op::Evolve(t)];
        match mode {
            Mode::Abstract => {
                ops.push(Op::Layer(vec![(center, gate)]));
                ops.push(Op::Evolve(-t));
            }
            Mode::Hardware => {
                let mut layer = vec![(center, gate)];
                layer.extend(self.sigma_z_layer());
                ops.push(Op::Layer(layer));
                ops.push(Op::Evolve(t));
                ops.push(Op::Layer(self.sigma_z_layer()));
            }
        }
        ops
    }

    /// φ-independent head of the sensing circuit.
    pub fn sensing_prefix(&self, t: f64, mask: &XMask, mode: Mode) -> Result<Vec<Op>> {
        self.check_mask(mask)?;
        let center = self.center();
        let lv = self.insert.local_operator(self.lv_sign);
        Ok(match mode {
            Mode::Abstract => {
                let mut ops = self.echo_ops(t, lv, mask, Mode::Abstract);
                ops.push(self.x_layer(mask));
                ops
            }
            Mode::Hardware => {
                let mut layer = vec![(center, lv)];
                layer.extend(self.sigma_z_layer());
                vec![self.x_layer(mask), Op::Evolve(t), Op::Layer(layer), Op::Evolve(t)]
            }
        })
    }

    /// φ-dependent tail of the sensing circuit.
    pub fn sensing_suffix(&self, t: f64, phi: f64, mask: &XMask, mode: Mode) -> Vec<Op> {
        let center = self.center();
        match mode {
            Mode::Abstract => {
                vec![Op::PhaseEncoding(phi), self.x_layer(mask), Op::Evolve(t)]
            }
            Mode::Hardware => {
                let g = self.graph();
                let encode = (0..g.n_qubits())
                    .map(|q| (q, Gate::Rz(encoding_angle(g.color(q), mask.get(q), phi))))
                    .collect();
                // Y/2 taken as Ry(−π/2) so that the σz readout equals +σx.
                vec![Op::Layer(encode), Op::Evolve(t), Op::Layer(vec![(center, Gate::Ry(-FRAC_PI_2))])]
            }
        }
    }

    pub fn sensing_observable(&self, mode: Mode) -> Observable {
        match mode {
            Mode::Abstract => Observable::SigmaX(self.center()),
            Mode::Hardware => Observable::SigmaZ(self.center()),
        }
    }

    pub fn sensing_circuit(&self, t: f64, phi: f64, mask: &XMask, mode: Mode) -> Result<Circuit> {
        let mut ops = self.sensing_prefix(t, mask, mode)?;
        ops.extend(self.sensing_suffix(t, phi, mask, mode));
        Circuit::new(self.n_qubits(), ops, self.sensing_observable(mode))
    }

    /// OTOC circuit `X_m; e^{−iHt}; V; backward; X_m` measuring `σz` on
    /// `target`. Its value is `⟨0|V(t) σz^j V(t)|0⟩ = O_j(t)`.
    pub fn otoc_circuit(&self, t: f64, target: usize, mask: &XMask, mode: Mode) -> Result<Circuit> {
        self.check_mask(mask)?;
        let mut ops = self.echo_ops(t, self.insert.otoc_operator(), mask, mode);
        ops.push(self.x_layer(mask));
        Circuit::new(self.n_qubits(), ops, Observable::SigmaZ(target))
    }

    /// Reference circuit: a single `U` block of length `1.5t` followed by its
    /// inverse, no insert; ideally returns exactly `⟨σz⟩ = 1` on the center.
    pub fn reference_circuit(&self, t: f64, mask: &XMask, mode: Mode) -> Result<Circuit> {
        self.check_mask(mask)?;
        let mut ops = self.echo_ops(1.5 * t, Gate::I, mask, mode);
        ops.push(self.x_layer(mask));
        Circuit::new(self.n_qubits(), ops, Observable::SigmaZ(self.center()))
    }
}

/// `n` uniformly spaced phases on `[−π, π]`.
pub fn uniform_phis(n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![0.0],
        _ => (0..n).map(|k| -PI + 2.0 * PI * k as f64 / (n - 1) as f64).collect(),
    }
}

/// Rz angle applied on one qubit in the hardware encoding layer.
///
/// The layer realises `X_m e^{−iφS_z} X_m Σ_Z` qubit by qubit: conjugating
/// by `X` flips the sign of the rotation on initially excited qubits and
/// `Σ_Z` adds `π` on red qubits (up to a global phase).
pub fn encoding_angle(color: Color, excited: bool, phi: f64) -> f64 {
    match (color, excited) {
        (Color::Blue, false) => phi,
        (Color::Blue, true) => -phi,
        (Color::Red, false) => PI + phi,
        (Color::Red, true) => PI - phi,
    }
}

/// One evaluated grid point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunRecord {
    pub t: f64,
    pub phi: f64,
    pub mask_index: usize,
    pub value: f64,
    pub observable: &'static str,
}

/// `⟨σx⟩` of the center after the abstract sensing circuit.
pub fn run_sensing_abstract(spec: &ProtocolSpec, t: f64, phi: f64, mask: &XMask) -> Result<f64> {
    spec.sensing_circuit(t, phi, mask, Mode::Abstract)?.expectation(spec.hamiltonian(), spec.method)
}

/// Same quantity via the hardware pulse sequence (`Σ_Z` time reversal,
/// four-case Z encoding, `Y/2` before a `σz` readout).
pub fn run_sensing_hardware(spec: &ProtocolSpec, t: f64, phi: f64, mask: &XMask) -> Result<f64> {
    spec.sensing_circuit(t, phi, mask, Mode::Hardware)?.expectation(spec.hamiltonian(), spec.method)
}

/// Dispatch on `spec.mode`.
pub fn run_sensing(spec: &ProtocolSpec, t: f64, phi: f64, mask: &XMask) -> Result<f64> {
    match spec.mode {
        Mode::Abstract => run_sensing_abstract(spec, t, phi, mask),
        Mode::Hardware => run_sensing_hardware(spec, t, phi, mask),
    }
}

/// `⟨σx⟩(φ)` for every phase in `phis`, sharing the φ-independent prefix.
pub fn sensing_curve(spec: &ProtocolSpec, t: f64, mask: &XMask, phis: &[f64]) -> Result<Vec<f64>> {
    let h = spec.hamiltonian();
    let mut head = StateVector::zero(spec.n_qubits())?;
    for op in spec.sensing_prefix(t, mask, spec.mode)? {
        op.apply(&mut head, h, spec.method)?;
    }
    let observable = spec.sensing_observable(spec.mode);
    phis.iter()
        .map(|&phi| {
            let mut s = head.clone();
            for op in spec.sensing_suffix(t, phi, mask, spec.mode) {
                op.apply(&mut s, h, spec.method)?;
            }
            observable.expectation(&s)
        })
        .collect()
}

/// `O_target(t)` for `V = spec.insert` (normally `X`).
pub fn run_otoc(spec: &ProtocolSpec, t: f64, target: usize, mask: &XMask) -> Result<f64> {
    spec.otoc_circuit(t, target, mask, spec.mode)?.expectation(spec.hamiltonian(), spec.method)
}

/// `O_j(t)` for every qubit `j` from a single simulation.
pub fn run_otoc_all(spec: &ProtocolSpec, t: f64, mask: &XMask) -> Result<Vec<f64>> {
    let state = spec.otoc_circuit(t, 0, mask, spec.mode)?.run(spec.hamiltonian(), spec.method)?;
    (0..spec.n_qubits()).map(|q| state.expect_z(q)).collect()
}

/// Reference-circuit `⟨σz⟩` on the center (block length `1.5t`).
pub fn run_reference(spec: &ProtocolSpec, t: f64, mask: &XMask) -> Result<f64> {
    spec.reference_circuit(t, mask, spec.mode)?.expectation(spec.hamiltonian(), spec.method)
}

/// `|ψ_B⟩ = U† L_V U |0⟩` including the X layers.
pub fn butterfly_state(spec: &ProtocolSpec, t: f64, mask: &XMask) -> Result<StateVector> {
    spec.check_mask(mask)?;
    let lv = spec.insert.local_operator(spec.lv_sign);
    let mut ops = spec.echo_ops(t, lv, mask, spec.mode);
    ops.push(spec.x_layer(mask));
    Circuit::new(spec.n_qubits(), ops, Observable::SigmaZ(spec.center()))?
        .run(spec.hamiltonian(), spec.method)
}

/// `V(t)|ψ⟩` with `V(t) = U† σx^center U` (abstract evolution).
pub fn apply_scrambled_operator(
    spec: &ProtocolSpec,
    t: f64,
    mask: &XMask,
    state: &mut StateVector,
) -> Result<()> {
    spec.check_mask(mask)?;
    let mut ops = spec.echo_ops(t, Gate::X, mask, Mode::Abstract);
    ops.push(spec.x_layer(mask));
    for op in &ops {
        op.apply(state, spec.hamiltonian(), spec.method)?;
    }
    Ok(())
}

/// `V(t)|0⟩`, the scrambled branch of the butterfly state.
pub fn scrambled_state(spec: &ProtocolSpec, t: f64, mask: &XMask) -> Result<StateVector> {
    let mut s = StateVector::zero(spec.n_qubits())?;
    apply_scrambled_operator(spec, t, mask, &mut s)?;
    Ok(s)
}

#[cfg(test)]
mod tests;
