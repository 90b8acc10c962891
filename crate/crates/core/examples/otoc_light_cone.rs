//! Information spreading on the six-qubit lattice: mask-averaged OTOCs
//! `O_j(t)` grouped by graph distance from the center, and the first time
//! each qubit's OTOC drops below 0.9.
//!
//! ```text
//! cargo run --release --example otoc_light_cone
//! ```

use butterfly::engine::{mhz_to_rad_per_ns, QubitGraph};
use butterfly::protocol::{run_otoc_all, ProtocolSpec};

fn main() -> butterfly::Result<()> {
    let graph = QubitGraph::preset("n6")?;
    let n = graph.n_qubits();
    let spec = ProtocolSpec::from_graph(graph, mhz_to_rad_per_ns(3.0)).with_random_masks(10, 1, false);
    let distance = spec.graph().graph_distance(spec.center())?;
    let times: Vec<f64> = (0..=40).map(|k| 4.0 * k as f64).collect();

    let mut onset: Vec<Option<f64>> = vec![None; n];
    println!("center = {}, distances = {distance:?}", spec.center());
    print!("{:>6}", "t_ns");
    (0..n).for_each(|q| print!("  O_{q}(d={})", distance[q]));
    println!();
    for &t in &times {
        let mut mean = vec![0.0; n];
        for mask in &spec.masks {
            for (m, o) in mean.iter_mut().zip(run_otoc_all(&spec, t, mask)?) {
                *m += o / spec.masks.len() as f64;
            }
        }
        print!("{t:>6.0}");
        mean.iter().for_each(|o| print!("  {o:>9.4}"));
        println!();
        for q in 0..n {
            if onset[q].is_none() && mean[q] < 0.9 {
                onset[q] = Some(t);
            }
        }
    }
    println!("\nonset (first t with O_j < 0.9):");
    for q in 0..n {
        println!("  qubit {q}, distance {}: {:?} ns", distance[q], onset[q]);
    }
    Ok(())
}
