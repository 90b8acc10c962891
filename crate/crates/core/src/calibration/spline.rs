use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Bisection stops once the amplitude bracket is narrower than this.
pub const INVERSION_TOLERANCE: f64 = 1e-12;

/// Smooth phase–amplitude relation `φ = f(Z_amp)` from calibration knots,
/// interpolated by a not-a-knot cubic spline.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplineCalibration {
    pub amplitudes: Vec<f64>,
    pub phases: Vec<f64>,
    /// Second derivatives at the knots.
    second: Vec<f64>,
    /// Knot index range `[0, end]` on which `f` is strictly monotone.
    pub monotone_end: usize,
}

/// Build the calibration from `(Z_amp, φ)` knots (at least four).
pub fn zgate_calibrate(knots: &[(f64, f64)]) -> Result<SplineCalibration> {
    if knots.len() < 4 {
        return Err(Error::InsufficientData(format!("{} knots; a cubic calibration needs at least 4", knots.len())));
    }
    let mut pts = knots.to_vec();
    if pts.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return Err(Error::InvalidArgument("knots must be finite".into()));
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    if pts.windows(2).any(|w| w[1].0 - w[0].0 <= 0.0) {
        return Err(Error::InvalidArgument("knot amplitudes must be distinct".into()));
    }
    let (x, y): (Vec<f64>, Vec<f64>) = pts.into_iter().unzip();
    let second = not_a_knot_second_derivatives(&x, &y)?;
    let mut cal = SplineCalibration { amplitudes: x, phases: y, second, monotone_end: 0 };
    cal.monotone_end = cal.monotone_prefix();
    Ok(cal)
}

fn not_a_knot_second_derivatives(x: &[f64], y: &[f64]) -> Result<Vec<f64>> {
    let n = x.len();
    let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let mut a = DMatrix::<f64>::zeros(n, n);
    let mut rhs = DVector::<f64>::zeros(n);
    // continuity of the third derivative across the first and last interior knots
    a[(0, 0)] = h[1];
    a[(0, 1)] = -(h[0] + h[1]);
    a[(0, 2)] = h[0];
    a[(n - 1, n - 3)] = h[n - 2];
    a[(n - 1, n - 2)] = -(h[n - 3] + h[n - 2]);
    a[(n - 1, n - 1)] = h[n - 3];
    for i in 1..n - 1 {
        a[(i, i - 1)] = h[i - 1];
        a[(i, i)] = 2.0 * (h[i - 1] + h[i]);
        a[(i, i + 1)] = h[i];
        rhs[i] = 6.0 * ((y[i + 1] - y[i]) / h[i] - (y[i] - y[i - 1]) / h[i - 1]);
    }
    let m = a.lu().solve(&rhs).ok_or_else(|| Error::InvalidArgument("spline system is singular".into()))?;
    Ok(m.iter().copied().collect())
}

impl SplineCalibration {
    fn segment(&self, z: f64) -> usize {
        let x = &self.amplitudes;
        match x.partition_point(|&k| k <= z) {
            0 => 0,
            i if i >= x.len() => x.len() - 2,
            i => i - 1,
        }
    }

    fn eval_segment(&self, i: usize, z: f64) -> (f64, f64) {
        let (x, y, m) = (&self.amplitudes, &self.phases, &self.second);
        let h = x[i + 1] - x[i];
        let a = (x[i + 1] - z) / h;
        let b = (z - x[i]) / h;
        let value = a * y[i] + b * y[i + 1] + ((a * a * a - a) * m[i] + (b * b * b - b) * m[i + 1]) * h * h / 6.0;
        let slope = (y[i + 1] - y[i]) / h - (3.0 * a * a - 1.0) / 6.0 * h * m[i] + (3.0 * b * b - 1.0) / 6.0 * h * m[i + 1];
        (value, slope)
    }

    /// `f(Z_amp)` (extrapolated by the end cubics outside the knots).
    pub fn phase(&self, z: f64) -> f64 {
        self.eval_segment(self.segment(z), z).0
    }

    pub fn derivative(&self, z: f64) -> f64 {
        self.eval_segment(self.segment(z), z).1
    }

    /// Sign of `f'` on segment `i` if it does not change there.
    fn segment_sign(&self, i: usize) -> Option<f64> {
        let (x0, x1) = (self.amplitudes[i], self.amplitudes[i + 1]);
        // f' is quadratic on the segment: check both ends and the vertex
        let d0 = self.eval_segment(i, x0).1;
        let d1 = self.eval_segment(i, x1).1;
        let dm = self.eval_segment(i, 0.5 * (x0 + x1)).1;
        // f'(mid + u) = dm + s·u + c·u² with half width w
        let w = 0.5 * (x1 - x0);
        let (s1, c) = ((d1 - d0) / (2.0 * w), (d0 + d1 - 2.0 * dm) / (2.0 * w * w));
        let mut samples = vec![d0, d1, dm];
        if c != 0.0 && (s1 / (2.0 * c)).abs() < w {
            samples.push(self.eval_segment(i, 0.5 * (x0 + x1) - s1 / (2.0 * c)).1);
        }
        let s = d0.signum();
        (s != 0.0 && samples.iter().all(|d| d.signum() == s && *d != 0.0)).then_some(s)
    }

    fn monotone_prefix(&self) -> usize {
        let mut end = 0;
        let Some(sign) = self.segment_sign(0) else { return 0 };
        for i in 0..self.amplitudes.len() - 1 {
            match self.segment_sign(i) {
                Some(s) if s == sign => end = i + 1,
                _ => break,
            }
        }
        end
    }

    /// Phase range covered by the monotone branch.
    pub fn monotone_range(&self) -> (f64, f64) {
        let (a, b) = (self.phases[0], self.phases[self.monotone_end]);
        (a.min(b), a.max(b))
    }
}

/// Pulse amplitude that produces the target phase, by bisection on the
/// monotone branch starting at the first knot.
pub fn zgate_invert(cal: &SplineCalibration, phi_target: f64) -> Result<f64> {
    let all_lo = cal.phases.iter().copied().fold(f64::INFINITY, f64::min);
    let all_hi = cal.phases.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if cal.monotone_end == 0 {
        return Err(Error::NonMonotone(0, 1));
    }
    let (lo, hi) = cal.monotone_range();
    if !(phi_target >= lo && phi_target <= hi) {
        if phi_target >= all_lo && phi_target <= all_hi {
            return Err(Error::NonMonotone(cal.monotone_end, cal.monotone_end + 1));
        }
        return Err(Error::OutOfRange(phi_target, lo, hi));
    }
    let increasing = cal.phases[cal.monotone_end] > cal.phases[0];
    let (mut a, mut b) = (cal.amplitudes[0], cal.amplitudes[cal.monotone_end]);
    while b - a > INVERSION_TOLERANCE {
        let mid = 0.5 * (a + b);
        if (cal.phase(mid) < phi_target) == increasing {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(0.5 * (a + b))
}
