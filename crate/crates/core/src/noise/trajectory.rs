use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::engine::{Circuit, EvolutionMethod, Hamiltonian, Observable, Op, StateVector};
use crate::{Error, Result};

use super::model::NoiseModel;

/// Number of trajectories and the master seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrajectoryConfig {
    pub n_trajectories: usize,
    pub seed: u64,
}

impl TrajectoryConfig {
    pub fn new(n_trajectories: usize, seed: u64) -> Result<Self> {
        if n_trajectories == 0 {
            return Err(Error::InvalidArgument("need at least one trajectory".into()));
        }
        Ok(Self { n_trajectories, seed })
    }
}

/// Sample mean over trajectories and its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisyEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub n_trajectories: usize,
}

impl NoisyEstimate {
    pub fn from_samples(samples: &[f64]) -> Result<Self> {
        let n = samples.len();
        if n == 0 {
            return Err(Error::InsufficientData("no trajectory samples".into()));
        }
        let mean = pairwise_sum(samples) / n as f64;
        let std_error = if n > 1 {
            let dev: Vec<f64> = samples.iter().map(|x| (x - mean) * (x - mean)).collect();
            (pairwise_sum(&dev) / (n - 1) as f64 / n as f64).sqrt()
        } else {
            0.0
        };
        Ok(Self { mean, std_error, n_trajectories: n })
    }
}

/// Summation in a fixed binary tree, independent of execution order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        1 => values[0],
        n if n <= 8 => values.iter().sum(),
        n => pairwise_sum(&values[..n / 2]) + pairwise_sum(&values[n / 2..]),
    }
}

/// Random stream of trajectory `index`: ChaCha8 keyed by the master seed,
/// with the trajectory index as the stream number.
pub fn trajectory_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// A circuit tail evaluated after a shared prefix.
#[derive(Debug, Clone, PartialEq)]
pub struct Branch {
    pub ops: Vec<Op>,
    pub observable: Observable,
}

/// Noisy trajectories of a family of circuits that share their first ops.
///
/// Each trajectory runs the prefix once and continues every branch from a
/// copy of the prefix state and random stream, so the branches see common
/// noise up to the branch point. A single branch with an empty prefix is an
/// ordinary circuit run.
pub fn run_noisy_branches(
    n_qubits: usize,
    prefix: &[Op],
    branches: &[Branch],
    h: &Hamiltonian,
    method: EvolutionMethod,
    noise: &NoiseModel,
    config: TrajectoryConfig,
) -> Result<Vec<NoisyEstimate>> {
    noise.check_qubits(n_qubits)?;
    if config.n_trajectories == 0 {
        return Err(Error::InvalidArgument("need at least one trajectory".into()));
    }
    for b in branches {
        if b.observable.qubit() >= n_qubits {
            return Err(Error::QubitIndex { index: b.observable.qubit(), n_qubits });
        }
    }
    let mut memo: Vec<(f64, Vec<(f64, f64)>)> = Vec::new();
    let mut compile = |ops: &[Op]| -> Result<Vec<(Op, usize)>> {
        noise
            .schedule_ops(ops)
            .into_iter()
            .map(|(op, dt)| {
                let idx = match memo.iter().position(|(d, _)| *d == dt) {
                    Some(i) => i,
                    None => {
                        memo.push((dt, noise.channels(dt)?));
                        memo.len() - 1
                    }
                };
                Ok((op, idx))
            })
            .collect()
    };
    let head = compile(prefix)?;
    let tails: Vec<Vec<(Op, usize)>> = branches.iter().map(|b| compile(&b.ops)).collect::<Result<_>>()?;
    let channels: Vec<Vec<(f64, f64)>> = memo.into_iter().map(|(_, c)| c).collect();

    let run = |state: &mut StateVector, steps: &[(Op, usize)], rng: &mut ChaCha8Rng| -> Result<()> {
        for (op, c) in steps {
            op.apply(state, h, method)?;
            apply_noise_jumps(state, &channels[*c], rng);
        }
        Ok(())
    };
    let per_trajectory: Vec<Vec<f64>> = (0..config.n_trajectories)
        .into_par_iter()
        .map(|index| {
            let mut rng = trajectory_rng(config.seed, index);
            let mut state = StateVector::zero(n_qubits)?;
            run(&mut state, &head, &mut rng)?;
            tails
                .iter()
                .zip(branches)
                .map(|(steps, branch)| {
                    let mut s = state.clone();
                    let mut r = rng.clone();
                    run(&mut s, steps, &mut r)?;
                    branch.observable.expectation(&s)
                })
                .collect()
        })
        .collect::<Result<_>>()?;
    (0..branches.len())
        .map(|b| NoisyEstimate::from_samples(&per_trajectory.iter().map(|v| v[b]).collect::<Vec<_>>()))
        .collect()
}

/// Monte-Carlo unravelling of the noisy circuit; returns the mean of the
/// circuit observable with its standard error.
pub fn run_noisy_trajectories(
    circuit: &Circuit,
    h: &Hamiltonian,
    method: EvolutionMethod,
    noise: &NoiseModel,
    config: TrajectoryConfig,
) -> Result<NoisyEstimate> {
    let branch = Branch { ops: circuit.ops.clone(), observable: circuit.observable };
    Ok(run_noisy_branches(circuit.n_qubits, &[], &[branch], h, method, noise, config)?.remove(0))
}

/// One stochastic noise step on every qubit: amplitude-damping jump or
/// no-jump evolution with Born probabilities, then a random Z flip.
pub(crate) fn apply_noise_jumps<R: Rng>(state: &mut StateVector, channels: &[(f64, f64)], rng: &mut R) {
    for (q, &(gamma, p)) in channels.iter().enumerate() {
        if gamma > 0.0 {
            let p1 = state.excited_population(q);
            let jump = rng.gen::<f64>() < gamma * p1;
            let m = 1usize << q;
            let amps = state.amplitudes_mut();
            if jump {
                for i in (0..amps.len()).filter(|i| i & m == 0) {
                    amps[i] = amps[i | m];
                    amps[i | m] = Default::default();
                }
            } else {
                let damp = (1.0 - gamma).sqrt();
                for i in (0..amps.len()).filter(|i| i & m != 0) {
                    amps[i] *= damp;
                }
            }
            state.normalize();
        }
        if p > 0.0 && rng.gen::<f64>() < p {
            state.apply_z_mask(1 << q);
        }
    }
}
