//! From `⟨σx⟩(φ)` curves to slopes, Fisher information and inverted
//! sensitivity, plus the polarization-distribution route to the same
//! quantities.

mod fit;
mod theory;

pub use fit::polyfit_odd;
pub use theory::{
    bounds, decomposition_check, eta_inv_from_otoc, expected_v_from_distribution, polarization_distribution,
    Bounds, Decomposition, ExpectedV, PolarizationDist,
};

use crate::{Error, Result};

/// Half-width (rad) of the window used for the odd-polynomial slope fit.
pub const SLOPE_WINDOW: f64 = 0.5;
/// Highest odd power in the slope fit.
pub const SLOPE_DEGREE: usize = 5;
/// Relative tolerance between fit and finite-difference slopes.
pub const SLOPE_AGREEMENT: f64 = 0.02;
/// `|⟨σx⟩|` at or above `1 − SATURATION_GUARD` carries no phase information.
pub const SATURATION_GUARD: f64 = 1e-6;

/// `⟨σx⟩` sampled on a uniform, zero-centred phase grid.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseCurve {
    pub phis: Vec<f64>,
    pub values: Vec<f64>,
    pub n_qubits: usize,
    pub t: f64,
}

impl PhaseCurve {
    pub fn new(phis: Vec<f64>, values: Vec<f64>, n_qubits: usize, t: f64) -> Result<Self> {
        if phis.len() != values.len() {
            return Err(Error::InvalidArgument(format!(
                "{} phases but {} values",
                phis.len(),
                values.len()
            )));
        }
        Ok(Self { phis, values, n_qubits, t })
    }

    /// Pointwise mean of several curves on the same grid.
    pub fn average(curves: &[PhaseCurve]) -> Result<Self> {
        let first = curves.first().ok_or_else(|| Error::InsufficientData("no curves to average".into()))?;
        if curves.iter().any(|c| c.phis != first.phis) {
            return Err(Error::InvalidArgument("curves use different phase grids".into()));
        }
        let n = curves.len() as f64;
        let values = (0..first.phis.len())
            .map(|i| curves.iter().map(|c| c.values[i]).sum::<f64>() / n)
            .collect();
        Ok(Self { phis: first.phis.clone(), values, n_qubits: first.n_qubits, t: first.t })
    }

    /// Scale every value, e.g. by `1/⟨σz⟩_ref`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self { values: self.values.iter().map(|v| v * factor).collect(), ..self.clone() }
    }

    fn zero_index(&self) -> Result<usize> {
        self.phis
            .iter()
            .position(|p| p.abs() < 1e-12)
            .ok_or_else(|| Error::InsufficientData("phase grid does not contain 0".into()))
    }

    fn is_uniform(&self) -> bool {
        if self.phis.len() < 3 {
            return true;
        }
        let h = self.phis[1] - self.phis[0];
        self.phis.windows(2).all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs().max(1.0))
    }
}

/// Slope of `⟨σx⟩` at `φ = 0` from two estimators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlopeEstimate {
    /// Odd-polynomial least-squares fit on `|φ| ≤ SLOPE_WINDOW` (primary).
    pub fit: f64,
    /// Central difference between the two points nearest zero.
    pub finite_difference: f64,
}

impl SlopeEstimate {
    pub fn value(&self) -> f64 {
        self.fit
    }

    /// Whether both estimators agree within [`SLOPE_AGREEMENT`]. Strongly
    /// curved signals on coarse grids legitimately disagree, so this is
    /// reported rather than enforced.
    pub fn consistent(&self) -> bool {
        let scale = self.fit.abs().max(self.finite_difference.abs());
        scale < 1e-12 || (self.fit - self.finite_difference).abs() <= SLOPE_AGREEMENT * scale
    }
}

/// `s = ∂⟨σx⟩/∂φ` at zero.
pub fn slope_at_zero(curve: &PhaseCurve) -> Result<SlopeEstimate> {
    let zero = curve.zero_index()?;
    let left = curve.phis.iter().filter(|p| **p < -1e-12).count();
    let right = curve.phis.iter().filter(|p| **p > 1e-12).count();
    if left < 2 || right < 2 {
        return Err(Error::InsufficientData(format!(
            "need at least 2 phases on each side of zero (have {left} and {right})"
        )));
    }
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for (&p, &v) in curve.phis.iter().zip(&curve.values) {
        if p.abs() <= SLOPE_WINDOW + 1e-12 {
            xs.push(p);
            ys.push(v - curve.values[zero]);
        }
    }
    let mut distinct: Vec<f64> = xs.iter().map(|x| x.abs()).filter(|x| *x > 1e-12).collect();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let n_terms = distinct.len().min(SLOPE_DEGREE.div_ceil(2));
    let fit = if n_terms == 0 {
        // window narrower than the grid spacing
        central_difference(curve, zero)
    } else {
        polyfit_odd(&xs, &ys, n_terms)?[0]
    };
    Ok(SlopeEstimate { fit, finite_difference: central_difference(curve, zero) })
}

fn central_difference(curve: &PhaseCurve, zero: usize) -> f64 {
    let (l, r) = (zero - 1, zero + 1);
    (curve.values[r] - curve.values[l]) / (curve.phis[r] - curve.phis[l])
}

/// Fisher information along a curve.
#[derive(Debug, Clone, PartialEq)]
pub struct FisherProfile {
    /// `F(φ_i)`; `None` at saturated points.
    pub pointwise: Vec<Option<f64>>,
    /// `F(0)` from the fitted slope.
    pub at_zero: f64,
    /// Largest finite pointwise value.
    pub max: f64,
}

/// `F = (∂⟨σx⟩/∂φ)² / (1 − ⟨σx⟩²)`.
///
/// The derivative at zero is the fitted slope; elsewhere a local five-point
/// (three-point near the ends) polynomial derivative on the uniform grid.
pub fn fisher_information(curve: &PhaseCurve) -> Result<FisherProfile> {
    if !curve.is_uniform() {
        return Err(Error::InvalidArgument("phase grid must be uniform".into()));
    }
    let zero = curve.zero_index()?;
    let v0 = curve.values[zero];
    if v0.abs() >= 1.0 - SATURATION_GUARD {
        return Err(Error::Saturated(v0));
    }
    let slope = slope_at_zero(curve)?.value();
    let at_zero = slope * slope / (1.0 - v0 * v0);
    let n = curve.phis.len();
    let h = curve.phis[1] - curve.phis[0];
    let y = &curve.values;
    let pointwise: Vec<Option<f64>> = (0..n)
        .map(|i| {
            if y[i].abs() >= 1.0 - SATURATION_GUARD {
                return None;
            }
            let d = if i == zero {
                slope
            } else if i >= 2 && i + 2 < n {
                (y[i - 2] - 8.0 * y[i - 1] + 8.0 * y[i + 1] - y[i + 2]) / (12.0 * h)
            } else if i >= 1 && i + 1 < n {
                (y[i + 1] - y[i - 1]) / (2.0 * h)
            } else if i == 0 {
                (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * h)
            } else {
                (3.0 * y[i] - 4.0 * y[i - 1] + y[i - 2]) / (2.0 * h)
            };
            Some(d * d / (1.0 - y[i] * y[i]))
        })
        .collect();
    let max = pointwise.iter().flatten().copied().fold(at_zero, f64::max);
    Ok(FisherProfile { pointwise, at_zero, max })
}

/// `η⁻¹ = √F`.
pub fn inverted_sensitivity(fisher: f64) -> Result<f64> {
    if !(fisher >= 0.0) {
        return Err(Error::InvalidArgument(format!("Fisher information {fisher} must be >= 0")));
    }
    Ok(fisher.sqrt())
}

/// Inverted sensitivity at `φ = 0` of a curve, with the ingredients.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SensitivityPoint {
    pub slope: SlopeEstimate,
    pub fisher_at_zero: f64,
    pub eta_inv: f64,
}

pub fn sensitivity_at_zero(curve: &PhaseCurve) -> Result<SensitivityPoint> {
    let slope = slope_at_zero(curve)?;
    let fisher = fisher_information(curve)?;
    Ok(SensitivityPoint { slope, fisher_at_zero: fisher.at_zero, eta_inv: inverted_sensitivity(fisher.at_zero)? })
}

/// `η⁻¹` versus time for one system size.
#[derive(Debug, Clone, PartialEq)]
pub struct SensitivityCurve {
    pub n_qubits: usize,
    pub times: Vec<f64>,
    pub raw: Vec<f64>,
    pub normalized: Vec<f64>,
    pub otoc: Vec<f64>,
}

impl SensitivityCurve {
    pub fn max_raw(&self) -> f64 {
        self.raw.iter().copied().filter(|v| v.is_finite()).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Sample standard deviation (`n − 1`); zero for fewer than two samples.
pub fn std_dev(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return 0.0;
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::uniform_phis;

    fn curve(f: impl Fn(f64) -> f64) -> PhaseCurve {
        let phis = uniform_phis(41);
        let values = phis.iter().map(|&p| f(p)).collect();
        PhaseCurve::new(phis, values, 1, 0.0).unwrap()
    }

    #[test]
    fn slope_examples() {
        let s = slope_at_zero(&curve(|p| -p.sin())).unwrap();
        assert!((s.fit + 1.0).abs() < 1e-3, "{s:?}");
        assert!(s.consistent());
        let s = slope_at_zero(&curve(|p| 2.0 * p)).unwrap();
        assert!((s.fit - 2.0).abs() < 1e-12);
        assert!((s.finite_difference - 2.0).abs() < 1e-12);
        let s = slope_at_zero(&curve(|_| 0.3)).unwrap();
        assert_eq!(s.fit, 0.0);
    }

    #[test]
    fn slope_needs_points_around_zero() {
        let c = PhaseCurve::new(vec![-0.1, 0.0, 0.1], vec![0.0; 3], 1, 0.0).unwrap();
        assert!(matches!(slope_at_zero(&c), Err(Error::InsufficientData(_))));
        let c = PhaseCurve::new(vec![0.1, 0.2, 0.3, 0.4, 0.5], vec![0.0; 5], 1, 0.0).unwrap();
        assert!(slope_at_zero(&c).is_err());
    }

    #[test]
    fn sharp_curves_fit_better_than_difference() {
        // η⁻¹ = 5 curve: the central difference is 10% low on a 41-point grid
        let s = slope_at_zero(&curve(|p| -(5.0 * p).sin())).unwrap();
        assert!((s.fit + 5.0).abs() / 5.0 < 0.02, "{s:?}");
        assert!(!s.consistent());
    }

    #[test]
    fn fisher_of_sine_is_one() {
        let c = curve(|p| -p.sin());
        let f = fisher_information(&c).unwrap();
        assert!((f.at_zero - 1.0).abs() < 2e-3);
        for (i, v) in f.pointwise.iter().enumerate() {
            if (2..39).contains(&i) {
                if let Some(v) = v {
                    assert!((v - 1.0).abs() < 1e-3, "phi={} F={v}", c.phis[i]);
                }
            }
        }
    }

    #[test]
    fn fisher_at_zero_is_slope_squared() {
        let c = curve(|p| 0.8 * (3.0 * p).sin() * (-p * p).exp());
        let s = slope_at_zero(&c).unwrap().fit;
        let f = fisher_information(&c).unwrap();
        assert!((f.at_zero - s * s).abs() < 1e-12);
    }

    #[test]
    fn saturated_curve_is_rejected() {
        assert!(matches!(fisher_information(&curve(|_| 0.9999999)), Err(Error::Saturated(_))));
        let f = fisher_information(&curve(|_| 0.9999)).unwrap();
        assert_eq!(f.at_zero, 0.0);
    }

    #[test]
    fn inverted_sensitivity_values() {
        assert_eq!(inverted_sensitivity(1.0).unwrap(), 1.0);
        assert_eq!(inverted_sensitivity(9.0).unwrap(), 3.0);
        assert!(inverted_sensitivity(-1.0).is_err());
    }

    #[test]
    fn averaging_and_std() {
        let a = curve(|p| p);
        let b = curve(|p| 3.0 * p);
        let m = PhaseCurve::average(&[a, b]).unwrap();
        assert!((slope_at_zero(&m).unwrap().fit - 2.0).abs() < 1e-12);
        assert!((std_dev(&[1.0, 3.0]) - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(std_dev(&[1.0]), 0.0);
    }
}
