use nalgebra::{DMatrix, DVector};

/// Outcome of a damped Gauss-Newton minimization of `½‖r(x)‖²`.
#[derive(Debug, Clone)]
pub(crate) struct LmResult {
    pub x: DVector<f64>,
    pub cost: f64,
    pub converged: bool,
}

/// Levenberg-Marquardt iteration with forward-difference Jacobians.
///
/// Each step solves `(JᵀJ + λ·diag(JᵀJ)) δ = −Jᵀr`. A step that lowers the
/// cost is accepted and `λ` shrinks by 3; otherwise `λ` grows by 10 and the
/// step is retried. Iteration stops when the relative cost decrease or the
/// relative step falls below `1e-14`, or after `max_iter` Jacobians.
pub(crate) fn levenberg_marquardt<F>(residual: F, x0: DVector<f64>, max_iter: usize) -> Option<LmResult>
where
    F: Fn(&DVector<f64>) -> Option<DVector<f64>>,
{
    let cost_of = |r: &DVector<f64>| 0.5 * r.norm_squared();
    let mut x = x0;
    let mut r = residual(&x)?;
    let mut cost = cost_of(&r);
    let mut lambda = 1e-3;
    let n = x.len();
    for _ in 0..max_iter {
        let mut jac = DMatrix::zeros(r.len(), n);
        for k in 0..n {
            let h = 1e-7 * x[k].abs().max(1.0);
            let mut xp = x.clone();
            xp[k] += h;
            let rp = residual(&xp)?;
            jac.set_column(k, &((rp - &r) / h));
        }
        let jtj = jac.transpose() * &jac;
        let g = jac.transpose() * &r;
        let mut improved = false;
        while lambda < 1e16 {
            let mut a = jtj.clone();
            for k in 0..n {
                a[(k, k)] += lambda * jtj[(k, k)].max(1e-300);
            }
            let Some(step) = a.lu().solve(&(-&g)) else {
                lambda *= 10.0;
                continue;
            };
            let xn = &x + &step;
            match residual(&xn) {
                Some(rn) if cost_of(&rn) < cost => {
                    let new_cost = cost_of(&rn);
                    let rel_drop = (cost - new_cost) / cost.max(1e-300);
                    let rel_step = step.norm() / x.norm().max(1e-12);
                    x = xn;
                    r = rn;
                    cost = new_cost;
                    lambda = (lambda / 3.0).max(1e-12);
                    improved = true;
                    if rel_drop < 1e-14 || rel_step < 1e-14 || cost == 0.0 {
                        return Some(LmResult { x, cost, converged: true });
                    }
                    break;
                }
                _ => lambda *= 10.0,
            }
        }
        if !improved {
            // no descent direction left at any damping: a stationary point
            return Some(LmResult { x, cost, converged: true });
        }
    }
    Some(LmResult { x, cost, converged: false })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rosenbrock_minimum() {
        let res = levenberg_marquardt(
            |x| Some(DVector::from_vec(vec![10.0 * (x[1] - x[0] * x[0]), 1.0 - x[0]])),
            DVector::from_vec(vec![-1.2, 1.0]),
            500,
        )
        .unwrap();
        assert!(res.converged);
        assert!((res.x[0] - 1.0).abs() < 1e-8 && (res.x[1] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn exponential_rate() {
        let ts: Vec<f64> = (0..40).map(|i| i as f64 * 0.25).collect();
        let ys: Vec<f64> = ts.iter().map(|t| 2.0 * (-0.7 * t).exp()).collect();
        let res = levenberg_marquardt(
            |p| Some(DVector::from_iterator(ts.len(), ts.iter().zip(&ys).map(|(t, y)| p[0] * (-p[1] * t).exp() - y))),
            DVector::from_vec(vec![1.0, 0.2]),
            200,
        )
        .unwrap();
        assert!((res.x[0] - 2.0).abs() < 1e-9 && (res.x[1] - 0.7).abs() < 1e-9);
    }
}
