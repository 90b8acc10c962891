//! Calibration analyses on synthetic data: a four-term flux-distortion fit,
//! a Z-gate amplitude spline and its inverse, the coupler-mediated effective
//! coupling, and the exchange coupling from a chevron oscillation.
//!
//! ```text
//! cargo run --release --example calibration_fits
//! ```

use std::f64::consts::PI;

use butterfly::calibration::{
    coupling_from_oscillation, distortion_phase, effective_coupling, fit_distortion, log_spaced, zgate_calibrate,
    zgate_invert, DistortionModel, PulseContext,
};
use butterfly::engine::mhz_to_rad_per_ns;
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};

fn main() -> butterfly::Result<()> {
    // flux-pulse distortion: δφ(t_d) from a known four-term tail, then refit
    let truth = DistortionModel::new(
        vec![-0.0085, -0.0199, -0.0146, -0.0356],
        vec![1400.0, 460.0, 65.5, 14.4],
        PulseContext::default(),
    )?;
    let t_d = log_spaced(1.0, 5000.0, 80);
    let clean: Vec<f64> = t_d.iter().map(|&t| distortion_phase(t, &truth)).collect::<butterfly::Result<_>>()?;
    let sigma = 0.01 * clean.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let noise = Normal::new(0.0, sigma).expect("positive width");
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let noisy: Vec<f64> = clean.iter().map(|v| v + noise.sample(&mut rng)).collect();
    for (label, data) in [("noiseless", &clean), ("1% noise", &noisy)] {
        let fit = fit_distortion(&t_d, data, 4, PulseContext::default())?;
        println!("distortion fit ({label}): rms {:.2e} rad, converged {}", fit.rms, fit.converged);
        for (a, tau) in fit.model.amplitudes.iter().zip(&fit.model.taus) {
            println!("    a = {:+.5}  tau = {:>8.2} ns", a, tau);
        }
    }

    // Z-gate: phase versus pulse amplitude, interpolated and inverted
    let knots: Vec<(f64, f64)> = (0..9).map(|k| k as f64 / 8.0).map(|z| (z, 2.6 * z + 0.9 * z * z)).collect();
    let cal = zgate_calibrate(&knots)?;
    let (lo, hi) = cal.monotone_range();
    println!("\nZ-gate spline covers phases [{lo:.3}, {hi:.3}] rad");
    for phi in [PI / 4.0, PI / 2.0, PI] {
        let z = zgate_invert(&cal, phi)?;
        println!("    phase {phi:.4} rad -> amplitude {z:.6} (spline gives back {:.6})", cal.phase(z));
    }

    // coupler-mediated exchange between two qubits at 4.5 GHz, coupler at 5.5 GHz
    let w = |f_mhz: f64| 2.0 * PI * f_mhz;
    let g = effective_coupling(0.0, w(100.0), w(100.0), w(4500.0), w(4500.0), w(5500.0))?;
    println!("\neffective coupling: {:.3} MHz", g / (2.0 * PI));

    // chevron: excited population exchanged at 4J
    let j = mhz_to_rad_per_ns(3.0);
    let times: Vec<f64> = (0..=250).map(|k| 2.0 * k as f64).collect();
    let population: Vec<f64> = times.iter().map(|t| (2.0 * j * t).cos().powi(2)).collect();
    let fitted = coupling_from_oscillation(&times, &population)?;
    println!("chevron: J/2pi = {:.4} MHz (true 3 MHz)", fitted / (2.0 * PI) * 1e3);
    Ok(())
}
