use nalgebra::{DMatrix, DVector};

use crate::{Error, Result};

/// Least-squares fit of `y ≈ Σ_k c_k x^{2k+1}` for `k < n_terms`; returns
/// `[c_1, c_3, c_5, …]`. Columns are scaled to unit maximum before the SVD
/// solve.
pub fn polyfit_odd(xs: &[f64], ys: &[f64], n_terms: usize) -> Result<Vec<f64>> {
    if xs.len() != ys.len() || n_terms == 0 || xs.len() < n_terms {
        return Err(Error::InsufficientData(format!(
            "{} points for {n_terms} odd terms",
            xs.len()
        )));
    }
    let xmax = xs.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if xmax == 0.0 {
        return Err(Error::InsufficientData("all abscissae are zero".into()));
    }
    let a = DMatrix::from_fn(xs.len(), n_terms, |i, k| (xs[i] / xmax).powi(2 * k as i32 + 1));
    let b = DVector::from_column_slice(ys);
    let svd = a.svd(true, true);
    let c = svd.solve(&b, 1e-12).map_err(|e| Error::NonConvergence(e.to_string()))?;
    Ok((0..n_terms).map(|k| c[k] / xmax.powi(2 * k as i32 + 1)).collect())
}
