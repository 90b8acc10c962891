//! Drive the sweep harness from a JSON configuration, as the `butterfly`
//! binary does: write the OTOC, sensing, sensitivity and GME tables for a
//! small lattice and show that the bytes do not depend on the worker count.
//!
//! ```text
//! cargo run --release --example config_sweep [out_dir]
//! ```

use std::path::PathBuf;

use butterfly::harness::{parse_config, run_and_write, Command};

fn main() -> butterfly::Result<()> {
    let out_dir = std::env::args().nth(1).map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("butterfly_example"));
    let config = parse_config(
        r#"{
            "graph": {"n_qubits": 5, "edges": [[0, 1], [1, 2], [2, 3], [3, 4]]},
            "times_ns": {"start": 0, "stop": 96, "step": 16},
            "phis": {"count": 21},
            "n_mask_sets": 4,
            "seed": 3
        }"#,
    )?;
    println!("config hash {}", config.hash());
    for command in [Command::Otoc, Command::Sense, Command::Sensitivity, Command::Gme] {
        let path = run_and_write(command, &config, Some(1), &out_dir)?;
        let one = std::fs::read(&path)?;
        let again = command.run(&config, Some(3))?.to_csv()?;
        println!("{} ({} bytes, identical with 3 workers: {})", path.display(), one.len(), one == again.as_bytes());
    }
    println!("\n{}", std::fs::read_to_string(out_dir.join("sensitivity.csv"))?);
    Ok(())
}
