use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

use super::lm::levenberg_marquardt;

/// Pulse context of a distortion measurement: `z0` (pulse amplitude),
/// `D(z_p)` (rad/ns per amplitude unit) and pulse length `t_p` (ns).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseContext {
    pub z0: f64,
    pub d_zp: f64,
    pub t_p: f64,
}

impl Default for PulseContext {
    fn default() -> Self {
        Self { z0: 1.0, d_zp: 1.0, t_p: 100.0 }
    }
}

/// Multi-exponential flux-pulse tail `z0 Σ a_i e^{−t/τ_i}`; amplitudes are
/// fractions (−0.85 % is −0.0085), time constants in ns, sorted decreasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistortionModel {
    pub amplitudes: Vec<f64>,
    pub taus: Vec<f64>,
    pub context: PulseContext,
}

impl DistortionModel {
    pub fn new(amplitudes: Vec<f64>, taus: Vec<f64>, context: PulseContext) -> Result<Self> {
        if amplitudes.is_empty() || amplitudes.len() != taus.len() {
            return Err(Error::InvalidArgument(format!(
                "need equal, nonzero numbers of amplitudes ({}) and time constants ({})",
                amplitudes.len(),
                taus.len()
            )));
        }
        if taus.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
            return Err(Error::InvalidArgument("time constants must be positive and finite".into()));
        }
        let mut terms: Vec<(f64, f64)> = amplitudes.into_iter().zip(taus).collect();
        terms.sort_by(|a, b| b.1.total_cmp(&a.1));
        let (amplitudes, taus) = terms.into_iter().unzip();
        Ok(Self { amplitudes, taus, context })
    }

    pub fn n_terms(&self) -> usize {
        self.taus.len()
    }

    /// Ramsey phase error `δφ(t_d)` a delay `t_d` after the pulse.
    pub fn phase(&self, t_d: f64) -> f64 {
        self.amplitudes.iter().zip(&self.taus).map(|(&a, &tau)| a * basis(t_d, tau, &self.context)).sum()
    }
}

/// `δφ(t_d) = z0 D(z_p) Σ τ_i a_i (e^{−(t_d+t_p)/τ_i} − e^{−t_d/τ_i})`.
pub fn distortion_phase(t_d: f64, model: &DistortionModel) -> Result<f64> {
    if !(t_d >= 0.0) {
        return Err(Error::InvalidArgument(format!("delay {t_d} must be >= 0")));
    }
    Ok(model.phase(t_d))
}

/// Contribution of a unit amplitude with time constant `tau`.
fn basis(t_d: f64, tau: f64, ctx: &PulseContext) -> f64 {
    ctx.z0 * ctx.d_zp * tau * ((-(t_d + ctx.t_p) / tau).exp() - (-t_d / tau).exp())
}

/// Fitted model with its residual.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistortionFit {
    pub model: DistortionModel,
    /// Root-mean-square residual, rad.
    pub rms: f64,
    /// `rms` divided by the root-mean-square of the data.
    pub relative_rms: f64,
    pub converged: bool,
}

/// Lower and upper ends of the multi-start grid of time constants, ns.
pub const TAU_START_RANGE: (f64, f64) = (1.0, 1e4);

/// Unweighted least-squares fit of an `n_terms` distortion model.
///
/// The amplitudes enter linearly, so for any trial set of time constants
/// they are solved exactly (variable projection); the time constants are
/// optimized in log space by damped Gauss-Newton. Starts are all `n_terms`
/// subsets of a log-spaced grid over [`TAU_START_RANGE`]; the lowest-residual
/// result wins (earliest start on ties).
pub fn fit_distortion(t_d: &[f64], delta_phi: &[f64], n_terms: usize, context: PulseContext) -> Result<DistortionFit> {
    if t_d.len() != delta_phi.len() {
        return Err(Error::InvalidArgument(format!("{} delays but {} phases", t_d.len(), delta_phi.len())));
    }
    if n_terms == 0 || n_terms > 6 {
        return Err(Error::InvalidArgument(format!("n_terms = {n_terms} outside 1..=6")));
    }
    if t_d.len() < 4 * n_terms {
        return Err(Error::InsufficientData(format!("{} samples for {n_terms} terms (need {})", t_d.len(), 4 * n_terms)));
    }
    if t_d.iter().chain(delta_phi).any(|v| !v.is_finite()) || t_d.iter().any(|t| *t < 0.0) {
        return Err(Error::InvalidArgument("samples must be finite with t_d >= 0".into()));
    }
    let positive: Vec<f64> = t_d.iter().copied().filter(|t| *t > 0.0).collect();
    let (lo, hi) = positive.iter().fold((f64::INFINITY, 0.0f64), |(l, h), &t| (l.min(t), h.max(t)));
    if positive.is_empty() || hi / lo < 100.0 {
        return Err(Error::InsufficientData("delays must span at least two decades".into()));
    }

    let y = DVector::from_column_slice(delta_phi);
    let design = |log_tau: &DVector<f64>| -> DMatrix<f64> {
        DMatrix::from_fn(t_d.len(), log_tau.len(), |i, k| basis(t_d[i], log_tau[k].exp(), &context))
    };
    let solve = |log_tau: &DVector<f64>| -> Option<(DVector<f64>, DVector<f64>)> {
        if log_tau.iter().any(|v| !v.is_finite() || v.abs() > 30.0) {
            return None;
        }
        let phi = design(log_tau);
        // scale columns so the tolerance of the pseudo-inverse is meaningful
        let norms: Vec<f64> = phi.column_iter().map(|c| c.norm().max(1e-300)).collect();
        let scaled = DMatrix::from_fn(phi.nrows(), phi.ncols(), |i, k| phi[(i, k)] / norms[k]);
        let coef = scaled.svd(true, true).solve(&y, 1e-13).ok()?;
        let amps = DVector::from_iterator(coef.len(), coef.iter().zip(&norms).map(|(c, n)| c / n));
        let resid = &phi * &amps - &y;
        Some((amps, resid))
    };

    let grid_size = (n_terms + 3).max(7);
    let (g0, g1) = (TAU_START_RANGE.0.ln(), TAU_START_RANGE.1.ln());
    let grid: Vec<f64> = (0..grid_size).map(|k| g0 + (g1 - g0) * k as f64 / (grid_size - 1) as f64).collect();
    let starts = combinations(grid_size, n_terms);

    let results: Vec<Option<(f64, DVector<f64>, bool)>> = starts
        .par_iter()
        .map(|combo| {
            let x0 = DVector::from_iterator(n_terms, combo.iter().map(|&k| grid[k]));
            let res = levenberg_marquardt(|x| solve(x).map(|(_, r)| r), x0, 300)?;
            Some((res.cost, res.x, res.converged))
        })
        .collect();
    let best = results
        .into_iter()
        .flatten()
        .filter(|(c, _, _)| c.is_finite())
        .fold(None::<(f64, DVector<f64>, bool)>, |acc, cand| match acc {
            Some(a) if a.0 <= cand.0 => Some(a),
            _ => Some(cand),
        })
        .ok_or_else(|| Error::NonConvergence("no start produced a finite residual".into()))?;

    let (amps, resid) = solve(&best.1).ok_or_else(|| Error::NonConvergence("best start became singular".into()))?;
    let taus: Vec<f64> = best.1.iter().map(|v| v.exp()).collect();
    let model = DistortionModel::new(amps.iter().copied().collect(), taus, context)?;
    let m = t_d.len() as f64;
    let rms = (resid.norm_squared() / m).sqrt();
    let data_rms = (y.norm_squared() / m).sqrt();
    Ok(DistortionFit { model, rms, relative_rms: if data_rms > 0.0 { rms / data_rms } else { rms }, converged: best.2 })
}

/// All `k`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Delays log-spaced over `[lo, hi]` ns.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|k| (lo.ln() + (hi.ln() - lo.ln()) * k as f64 / (n - 1) as f64).exp()).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_distr::{Distribution, Normal};

    fn device_model() -> DistortionModel {
        DistortionModel::new(
            vec![-0.0085, -0.0199, -0.0146, -0.0356],
            vec![1400.0, 460.0, 65.5, 14.4],
            PulseContext::default(),
        )
        .unwrap()
    }

    #[test]
    fn single_term_example() {
        let m = DistortionModel::new(vec![-0.0356], vec![14.4], PulseContext::default()).unwrap();
        let want = 14.4 * -0.0356 * ((-100.0f64 / 14.4).exp() - 1.0);
        assert!((distortion_phase(0.0, &m).unwrap() - want).abs() < 1e-15);
        assert!((want - 0.512).abs() < 1e-3);
        assert!(distortion_phase(1e6, &m).unwrap().abs() < 1e-300);
        assert!(distortion_phase(-1.0, &m).is_err());
        let zero = DistortionModel::new(vec![0.0], vec![14.4], PulseContext::default()).unwrap();
        assert_eq!(distortion_phase(3.0, &zero).unwrap(), 0.0);
    }

    #[test]
    fn phase_is_linear_in_amplitudes() {
        let ctx = PulseContext { z0: 0.7, d_zp: 1.3, t_p: 80.0 };
        let a = DistortionModel::new(vec![0.01, -0.02], vec![300.0, 20.0], ctx).unwrap();
        let b = DistortionModel::new(vec![-0.005, 0.03], vec![300.0, 20.0], ctx).unwrap();
        let sum = DistortionModel::new(vec![0.005, 0.01], vec![300.0, 20.0], ctx).unwrap();
        let scaled = DistortionModel::new(vec![0.01, -0.02], vec![300.0, 20.0], PulseContext { z0: 1.4, ..ctx }).unwrap();
        for t in [0.0, 5.0, 50.0, 700.0] {
            assert!((a.phase(t) + b.phase(t) - sum.phase(t)).abs() < 1e-12);
            assert!((2.0 * a.phase(t) - scaled.phase(t)).abs() < 1e-12);
        }
    }

    #[test]
    fn canonical_order() {
        let m = DistortionModel::new(vec![1.0, 2.0], vec![5.0, 50.0], PulseContext::default()).unwrap();
        assert_eq!(m.taus, vec![50.0, 5.0]);
        assert_eq!(m.amplitudes, vec![2.0, 1.0]);
        assert!(DistortionModel::new(vec![1.0], vec![-5.0], PulseContext::default()).is_err());
    }

    #[test]
    fn single_exponential_fit_is_exact() {
        let truth = DistortionModel::new(vec![-0.02], vec![120.0], PulseContext::default()).unwrap();
        let t = log_spaced(1.0, 1e4, 60);
        let y: Vec<f64> = t.iter().map(|&x| truth.phase(x)).collect();
        let fit = fit_distortion(&t, &y, 1, PulseContext::default()).unwrap();
        assert!(((fit.model.taus[0] - 120.0) / 120.0).abs() < 1e-6);
        assert!(((fit.model.amplitudes[0] + 0.02) / 0.02).abs() < 1e-6);
    }

    #[test]
    fn four_term_noiseless_recovery() {
        let truth = device_model();
        let t = log_spaced(1.0, 1e4, 200);
        let y: Vec<f64> = t.iter().map(|&x| truth.phase(x)).collect();
        let fit = fit_distortion(&t, &y, 4, PulseContext::default()).unwrap();
        assert!(fit.relative_rms < 1e-8, "{}", fit.relative_rms);
        for k in 0..4 {
            assert!(((fit.model.taus[k] - truth.taus[k]) / truth.taus[k]).abs() < 0.05);
            assert!(((fit.model.amplitudes[k] - truth.amplitudes[k]) / truth.amplitudes[k]).abs() < 0.05);
        }
    }

    #[test]
    fn noisy_fit_runs() {
        let truth = device_model();
        let t = log_spaced(1.0, 1e4, 200);
        let scale = t.iter().map(|&x| truth.phase(x).abs()).fold(0.0, f64::max);
        let noise = Normal::new(0.0, 0.01 * scale).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        let y: Vec<f64> = t.iter().map(|&x| truth.phase(x) + noise.sample(&mut rng)).collect();
        let fit = fit_distortion(&t, &y, 4, PulseContext::default()).unwrap();
        assert!(fit.rms < 2.0 * 0.01 * scale);
    }

    #[test]
    fn preconditions() {
        let t = log_spaced(1.0, 50.0, 40);
        let y = vec![0.0; 40];
        assert!(matches!(fit_distortion(&t, &y, 1, PulseContext::default()), Err(Error::InsufficientData(_))));
        let t = log_spaced(1.0, 1e4, 10);
        assert!(matches!(fit_distortion(&t, &y[..10], 4, PulseContext::default()), Err(Error::InsufficientData(_))));
        assert!(fit_distortion(&t, &y[..9], 1, PulseContext::default()).is_err());
    }

    #[test]
    fn combination_enumeration() {
        assert_eq!(combinations(7, 4).len(), 35);
        assert_eq!(combinations(3, 1), vec![vec![0], vec![1], vec![2]]);
        assert_eq!(combinations(2, 3).len(), 0);
    }
}
