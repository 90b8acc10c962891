use crate::{Error, Result};

/// Detunings smaller than this fraction of `|ω_c|` count as resonant.
pub const RESONANCE_TOLERANCE: f64 = 1e-9;

/// Coupler-mediated exchange `g_eff = g12 + (g1c g2c / 2)(1/(ω1−ωc) + 1/(ω2−ωc))`,
/// all in the same angular-frequency unit.
pub fn effective_coupling(g12: f64, g1c: f64, g2c: f64, omega1: f64, omega2: f64, omega_c: f64) -> Result<f64> {
    let tol = RESONANCE_TOLERANCE * omega_c.abs().max(1.0);
    for (qubit, omega) in [(1, omega1), (2, omega2)] {
        let detuning = omega - omega_c;
        if !(detuning.abs() > tol) {
            return Err(Error::Resonance { qubit, detuning });
        }
    }
    Ok(g12 + 0.5 * g1c * g2c * (1.0 / (omega1 - omega_c) + 1.0 / (omega2 - omega_c)))
}

/// Angular frequency (rad per time unit) of the dominant oscillation in a
/// uniformly sampled series.
///
/// The mean is removed, the discrete-time Fourier magnitude is scanned on a
/// grid 16× finer than the FFT bins up to Nyquist, and the best grid point
/// is refined by golden-section search on the magnitude between its
/// neighbours.
pub fn fit_oscillation_frequency(times: &[f64], values: &[f64]) -> Result<f64> {
    let n = times.len();
    if n != values.len() {
        return Err(Error::InvalidArgument(format!("{n} times but {} values", values.len())));
    }
    if n < 8 {
        return Err(Error::InsufficientData(format!("{n} samples; need at least 8")));
    }
    let dt = (times[n - 1] - times[0]) / (n - 1) as f64;
    if !(dt > 0.0) || times.windows(2).any(|w| ((w[1] - w[0]) - dt).abs() > 1e-6 * dt) {
        return Err(Error::InvalidArgument("times must be increasing and uniformly spaced".into()));
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    let centered: Vec<f64> = values.iter().map(|v| v - mean).collect();
    let spread = centered.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if !(spread > 1e-12 * mean.abs().max(1.0)) {
        return Err(Error::NoPeak("series is constant".into()));
    }
    let power = |omega: f64| -> f64 {
        let (mut re, mut im) = (0.0, 0.0);
        for (k, v) in centered.iter().enumerate() {
            let (s, c) = (omega * k as f64 * dt).sin_cos();
            re += v * c;
            im += v * s;
        }
        re * re + im * im
    };
    let nyquist = std::f64::consts::PI / dt;
    let oversample = 16;
    let grid = n * oversample / 2;
    let step = nyquist / grid as f64;
    let powers: Vec<f64> = (0..=grid).map(|k| power(k as f64 * step)).collect();
    let best = (1..=grid).max_by(|&a, &b| powers[a].total_cmp(&powers[b])).expect("grid is nonempty");
    // the peak must sit clear of the mean-removal dip at zero frequency
    let resolution = 2.0 * std::f64::consts::PI / (n as f64 * dt);
    if best as f64 * step < resolution {
        return Err(Error::NoPeak("no oscillation resolved above the zero-frequency bin".into()));
    }
    let total: f64 = centered.iter().map(|v| v * v).sum::<f64>() * n as f64;
    if powers[best] < 0.05 * total {
        return Err(Error::NoPeak(format!("peak holds only {:.1}% of the signal power", 100.0 * powers[best] / total)));
    }
    let (mut a, mut b) = ((best as f64 - 1.0) * step, ((best + 1).min(grid) as f64) * step);
    let golden = 0.5 * (5f64.sqrt() - 1.0);
    let (mut c, mut d) = (b - golden * (b - a), a + golden * (b - a));
    let (mut fc, mut fd) = (power(c), power(d));
    while b - a > 1e-12 * nyquist {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - golden * (b - a);
            fc = power(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + golden * (b - a);
            fd = power(d);
        }
    }
    Ok(0.5 * (a + b))
}

/// Exchange coupling `J` from a chevron trace: under `J(XX+YY)` the excited
/// population oscillates as `cos²(2Jt)`, at angular frequency `4J`.
pub fn coupling_from_oscillation(times: &[f64], population: &[f64]) -> Result<f64> {
    Ok(fit_oscillation_frequency(times, population)? / 4.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::mhz_to_rad_per_ns;
    use rand::SeedableRng;
    use rand_distr::{Distribution, Normal};
    use std::f64::consts::PI;

    #[test]
    fn effective_coupling_examples() {
        let tau = 2.0 * PI;
        let g = effective_coupling(0.0, tau * 100.0, tau * 100.0, tau * 4500.0, tau * 4500.0, tau * 5500.0).unwrap();
        assert!((g - (-tau * 10.0)).abs() < 1e-9);
        assert_eq!(effective_coupling(1.5, 0.0, 3.0, 1.0, 2.0, 5.0).unwrap(), 1.5);
        assert!(matches!(effective_coupling(0.0, 1.0, 1.0, 5.0, 4.0, 5.0), Err(Error::Resonance { qubit: 1, .. })));
        assert!(matches!(effective_coupling(0.0, 1.0, 1.0, 4.0, 5.0, 5.0), Err(Error::Resonance { qubit: 2, .. })));
    }

    #[test]
    fn effective_coupling_symmetry() {
        let a = effective_coupling(0.3, 1.1, 0.7, 4.2, 4.9, 6.0).unwrap();
        let b = effective_coupling(0.3, 0.7, 1.1, 4.9, 4.2, 6.0).unwrap();
        assert!((a - b).abs() < 1e-15);
    }

    fn chevron(j: f64) -> (Vec<f64>, Vec<f64>) {
        let t: Vec<f64> = (0..=250).map(|k| 2.0 * k as f64).collect();
        let p = t.iter().map(|t| (2.0 * j * t).cos().powi(2)).collect();
        (t, p)
    }

    #[test]
    fn recovers_coupling_from_chevron() {
        let j = mhz_to_rad_per_ns(3.0);
        let (t, p) = chevron(j);
        let got = coupling_from_oscillation(&t, &p).unwrap();
        assert!(((got - j) / j).abs() < 0.01, "{got} vs {j}");
    }

    #[test]
    fn noisy_chevron_median() {
        let j = mhz_to_rad_per_ns(3.0);
        let (t, clean) = chevron(j);
        let noise = Normal::new(0.0, 0.05).unwrap();
        let mut errs: Vec<f64> = (0..20)
            .map(|seed| {
                let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
                let p: Vec<f64> = clean.iter().map(|v| v + noise.sample(&mut rng)).collect();
                ((coupling_from_oscillation(&t, &p).unwrap() - j) / j).abs()
            })
            .collect();
        errs.sort_by(f64::total_cmp);
        assert!(errs[10] < 0.03, "median error {}", errs[10]);
    }

    #[test]
    fn constant_series_has_no_peak() {
        let t: Vec<f64> = (0..50).map(|k| k as f64).collect();
        assert!(matches!(fit_oscillation_frequency(&t, &[0.7; 50]), Err(Error::NoPeak(_))));
        assert!(fit_oscillation_frequency(&t[..5], &[0.0; 5]).is_err());
    }
}
