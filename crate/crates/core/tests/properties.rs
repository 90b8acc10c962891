//! Randomized invariants of the public API.

use butterfly::engine::{mhz_to_rad_per_ns, EvolutionMethod, Gate, Hamiltonian, QubitGraph, StateVector};
use butterfly::entanglement::{gme_concurrence_pure, partial_trace_state, purity};
use butterfly::noise::AssignmentMatrix;
use butterfly::protocol::{run_reference, run_sensing_abstract, run_sensing_hardware, ProtocolSpec, XMask};
use butterfly::C64;
use proptest::prelude::*;

fn random_state(n: usize, parts: &[(f64, f64)]) -> StateVector {
    let amps: Vec<C64> = parts.iter().take(1 << n).map(|&(re, im)| C64::new(re, im)).collect();
    let mut s = StateVector::from_amplitudes(amps).unwrap();
    s.normalize();
    s
}

fn amplitudes() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-1.0..1.0f64, -1.0..1.0f64), 16)
        .prop_filter("non-zero vector", |v| v.iter().any(|(a, b)| a.abs() + b.abs() > 1e-3))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn evolution_conserves_norm_and_magnetization(parts in amplitudes(), t in 0.0..200.0f64) {
        let h = Hamiltonian::new(QubitGraph::chain(4).unwrap(), mhz_to_rad_per_ns(3.0));
        let mut s = random_state(4, &parts);
        let sz = s.expect_sz();
        h.evolve(&mut s, t, EvolutionMethod::ExactEigen).unwrap();
        prop_assert!((s.norm() - 1.0).abs() < 1e-12);
        prop_assert!((s.expect_sz() - sz).abs() < 1e-12);
    }

    #[test]
    fn evolution_is_reversible(parts in amplitudes(), t in 0.0..200.0f64) {
        let h = Hamiltonian::new(QubitGraph::grid(2, 2).unwrap(), mhz_to_rad_per_ns(3.0));
        let start = random_state(4, &parts);
        let mut s = start.clone();
        h.evolve(&mut s, t, EvolutionMethod::ExactEigen).unwrap();
        h.evolve(&mut s, -t, EvolutionMethod::ExactEigen).unwrap();
        prop_assert!((s.fidelity(&start) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rotations_are_unitary(theta in -10.0..10.0f64) {
        for g in [Gate::Rx(theta), Gate::Ry(theta), Gate::Rz(theta)] {
            prop_assert!(g.unitarity_error() < 1e-14);
        }
    }

    #[test]
    fn readout_correction_inverts_assignment(
        fid in prop::collection::vec((0.7..1.0f64, 0.7..1.0f64), 3),
        weights in prop::collection::vec(0.0..1.0f64, 8),
    ) {
        let m = AssignmentMatrix::new(fid).unwrap();
        let total: f64 = weights.iter().sum::<f64>() + 1e-9;
        let p: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let back = m.correct(&m.apply(&p).unwrap()).unwrap().probabilities;
        for (a, b) in p.iter().zip(&back) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn hardware_sequence_matches_abstract(t in 0.0..160.0f64, phi in -3.2..3.2f64, bits in 0usize..16) {
        let spec = ProtocolSpec::from_graph(QubitGraph::chain(4).unwrap(), mhz_to_rad_per_ns(3.0));
        let mask = XMask::from_bits(4, bits);
        let a = run_sensing_abstract(&spec, t, phi, &mask).unwrap();
        let h = run_sensing_hardware(&spec, t, phi, &mask).unwrap();
        prop_assert!((a - h).abs() < 1e-10);
        prop_assert!((run_reference(&spec, t, &mask).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn reduced_purity_and_gme_are_bounded(parts in amplitudes()) {
        let s = random_state(4, &parts);
        let p = purity(&partial_trace_state(&s, &[0, 2]).unwrap());
        prop_assert!((0.25 - 1e-12..=1.0 + 1e-12).contains(&p));
        let c = gme_concurrence_pure(&s).value;
        prop_assert!((-1e-12..=1.0).contains(&c));
    }

    #[test]
    fn product_states_have_no_gme(angles in prop::collection::vec(-3.2..3.2f64, 4)) {
        let mut s = StateVector::zero(4).unwrap();
        for (q, a) in angles.iter().enumerate() {
            s.apply_1q(q, &Gate::Ry(*a)).unwrap();
        }
        prop_assert!(gme_concurrence_pure(&s).value.abs() < 1e-9);
    }
}
