//! Noiseless inverted sensitivity versus evolution time for the 6-, 8- and
//! 10-qubit presets, compared with the OTOC prediction, the standard quantum
//! limit and the `N/2` saturation value.
//!
//! ```text
//! cargo run --release --example sensitivity_scan [seed]
//! ```

use butterfly::engine::{mhz_to_rad_per_ns, QubitGraph};
use butterfly::metrology::{bounds, eta_inv_from_otoc, sensitivity_at_zero, PhaseCurve};
use butterfly::protocol::{run_otoc_all, sensing_curve, uniform_phis, ProtocolSpec};

fn main() -> butterfly::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let phis = uniform_phis(41);
    for preset in ["n6", "n8", "n10"] {
        let graph = QubitGraph::preset(preset)?;
        let n = graph.n_qubits();
        let spec = ProtocolSpec::from_graph(graph, mhz_to_rad_per_ns(3.0)).with_random_masks(10, seed, false);
        let b = bounds(n)?;
        println!("{preset}: N = {n}, SQL = {:.3}, N/2 = {:.1}", b.sql, b.protocol);
        println!("{:>6} {:>9} {:>9}", "t_ns", "eta_inv", "otoc");
        let mut best = 0.0f64;
        for &t in &spec.times {
            let mut curves = Vec::new();
            let mut otoc = vec![0.0; n];
            for mask in &spec.masks {
                curves.push(PhaseCurve::new(phis.clone(), sensing_curve(&spec, t, mask, &phis)?, n, t)?);
                for (acc, o) in otoc.iter_mut().zip(run_otoc_all(&spec, t, mask)?) {
                    *acc += o / spec.masks.len() as f64;
                }
            }
            let point = sensitivity_at_zero(&PhaseCurve::average(&curves)?)?;
            best = best.max(point.eta_inv);
            println!("{t:>6.0} {:>9.4} {:>9.4}", point.eta_inv, eta_inv_from_otoc(&otoc, n));
        }
        println!("max eta_inv = {best:.3} = {:.3} x N/2\n", best / b.protocol);
    }
    Ok(())
}
