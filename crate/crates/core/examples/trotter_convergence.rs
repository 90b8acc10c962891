//! Accuracy of the second-order product formula against exact evolution on
//! a four-qubit chain: the state error shrinks fourfold each time the step
//! is halved.
//!
//! ```text
//! cargo run --release --example trotter_convergence
//! ```

use butterfly::engine::{mhz_to_rad_per_ns, EvolutionMethod, Gate, Hamiltonian, QubitGraph, StateVector};

fn main() -> butterfly::Result<()> {
    let h = Hamiltonian::new(QubitGraph::chain(4)?, mhz_to_rad_per_ns(3.0));
    let mut start = StateVector::zero(4)?;
    start.apply_1q(0, &Gate::X)?;
    start.apply_1q(2, &Gate::Ry(0.9))?;
    let t = 80.0;
    let mut exact = start.clone();
    h.evolve(&mut exact, t, EvolutionMethod::ExactEigen)?;

    println!("{:>6} {:>12} {:>8}", "dt_ns", "error", "ratio");
    let mut previous: Option<f64> = None;
    for dt in [8.0, 4.0, 2.0, 1.0, 0.5, 0.25] {
        let mut s = start.clone();
        h.evolve(&mut s, t, EvolutionMethod::Trotter2 { dt })?;
        let err = s.amplitudes().iter().zip(exact.amplitudes()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
        let ratio = previous.map(|p| format!("{:.3}", p / err)).unwrap_or_default();
        println!("{dt:>6} {err:>12.3e} {ratio:>8}");
        previous = Some(err);
    }
    Ok(())
}
