//! Sensing under the measured decoherence of the ten-qubit device on the
//! six-qubit lattice: trajectory-averaged inverted sensitivity, raw and
//! divided by the reference-circuit signal, against the noiseless curve.
//!
//! ```text
//! cargo run --release --example noisy_sensing [n_trajectories]
//! ```

use butterfly::harness::{cmd_sensitivity, parse_config};

fn main() -> butterfly::Result<()> {
    let n_traj: usize = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(300);
    let base = r#""graph": "n6", "times_ns": [0, 32, 64, 96], "phis": [-0.3, -0.2, -0.1, 0, 0.1, 0.2, 0.3], "n_mask_sets": 4"#;
    let noiseless = cmd_sensitivity(&parse_config(&format!("{{{base}}}"))?, None)?;
    let noisy_config = parse_config(&format!(r#"{{{base}, "noise": "table1", "n_trajectories": {n_traj}}}"#))?;
    let noisy = cmd_sensitivity(&noisy_config, None)?;

    let col = |t: &butterfly::harness::ResultTable, name: &str| t.column_f64(name).expect("numeric column");
    let times = col(&noiseless, "t_ns");
    let ideal = col(&noiseless, "eta_inv_raw");
    let (raw, norm) = (col(&noisy, "eta_inv_raw"), col(&noisy, "eta_inv_norm"));
    println!("{n_traj} trajectories per point, measured device coherence on 6 qubits");
    println!("{:>6} {:>10} {:>10} {:>12}", "t_ns", "noiseless", "noisy raw", "noisy norm");
    for k in 0..times.len() {
        println!("{:>6} {:>10.4} {:>10.4} {:>12.4}", times[k], ideal[k], raw[k], norm[k]);
    }
    Ok(())
}
