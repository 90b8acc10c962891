//! The sensing signal `⟨σx⟩(φ)` on a four-qubit chain: the single-qubit
//! Ramsey limit at `t = 0`, the steepening slope at later times, the
//! agreement of the abstract and hardware pulse sequences, and the
//! three-term expansion in terms of the scrambled operator `V(t)`.
//!
//! ```text
//! cargo run --release --example sensing_signal
//! ```

use butterfly::engine::{mhz_to_rad_per_ns, QubitGraph};
use butterfly::metrology::{decomposition_check, slope_at_zero, PhaseCurve};
use butterfly::protocol::{run_sensing_abstract, run_sensing_hardware, sensing_curve, uniform_phis, ProtocolSpec, XMask};

fn main() -> butterfly::Result<()> {
    let spec = ProtocolSpec::from_graph(QubitGraph::chain(4)?, mhz_to_rad_per_ns(3.0));
    let n = spec.n_qubits();
    let mask = XMask::from_bits(n, 0b0101);
    let phis = uniform_phis(41);

    for t in [0.0, 20.0, 40.0, 80.0] {
        let values = sensing_curve(&spec, t, &mask, &phis)?;
        let slope = slope_at_zero(&PhaseCurve::new(phis.clone(), values.clone(), n, t)?)?;
        let sampled: Vec<String> = [10, 18, 20, 22, 30].iter().map(|&k| format!("{:+.3}", values[k])).collect();
        println!(
            "t = {t:>4} ns  slope = {:+.4} (finite difference {:+.4})  <sx> at phi = -pi/2, -0.31, 0, 0.31, pi/2: {}",
            slope.fit,
            slope.finite_difference,
            sampled.join(" ")
        );
    }

    let mut worst = 0.0f64;
    let mut worst_expansion = 0.0f64;
    for t in [0.0, 15.0, 30.0, 45.0, 60.0] {
        for phi in [-1.0, -0.4, 0.0, 0.4, 1.0] {
            let a = run_sensing_abstract(&spec, t, phi, &mask)?;
            let h = run_sensing_hardware(&spec, t, phi, &mask)?;
            worst = worst.max((a - h).abs());
            worst_expansion = worst_expansion.max(decomposition_check(&spec, t, phi, &mask)?.residual);
        }
    }
    println!("max |abstract - hardware| over 25 points: {worst:.2e}");
    println!("max |direct - expansion|  over 25 points: {worst_expansion:.2e}");
    Ok(())
}
