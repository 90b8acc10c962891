//! Readout-error mitigation: push a two-qubit outcome distribution through
//! the per-qubit assignment matrices of two device qubits, sample finite
//! shots, and undo the assignment errors by inverting the matrix.
//!
//! ```text
//! cargo run --release --example readout_mitigation
//! ```

use butterfly::noise::{AssignmentMatrix, QubitNoise, TABLE1};
use rand::SeedableRng;
use rand_distr::{Distribution, WeightedIndex};

fn main() -> butterfly::Result<()> {
    let qubits: [QubitNoise; 2] = [TABLE1[0], TABLE1[6]];
    let m = AssignmentMatrix::new(qubits.iter().map(|q| (q.f_gg, q.f_ee)).collect())?;
    // outcome probabilities indexed by bitstring (qubit 0 = least significant bit)
    let truth = [0.5, 0.0, 0.1, 0.4];
    let measured = m.apply(&truth)?;
    let exact = m.correct(&measured)?;
    println!("true      {truth:?}");
    println!("measured  {:?}", rounded(&measured));
    println!("corrected {:?}  (round-trip error {:.1e})", rounded(&exact.probabilities), max_diff(&exact.probabilities, &truth));

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
    let dist = WeightedIndex::new(&measured).expect("valid distribution");
    for shots in [1000usize, 10_000, 100_000] {
        let mut counts = [0.0; 4];
        for _ in 0..shots {
            counts[dist.sample(&mut rng)] += 1.0 / shots as f64;
        }
        let corrected = m.correct(&counts)?;
        println!(
            "{shots:>7} shots: corrected {:?}, max error {:.4}, outside [0, 1]: {}",
            rounded(&corrected.probabilities),
            max_diff(&corrected.probabilities, &truth),
            corrected.out_of_range
        );
    }

    let single = AssignmentMatrix::single(TABLE1[0].f_gg, TABLE1[0].f_ee)?;
    let z = single.apply_to_expectation(0.8)?;
    println!("<sz> = 0.8 reads as {z:.4} and corrects back to {:.4}", single.correct_expectation(z)?);
    Ok(())
}

fn rounded(p: &[f64]) -> Vec<f64> {
    p.iter().map(|x| (x * 1e4).round() / 1e4).collect()
}

fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
