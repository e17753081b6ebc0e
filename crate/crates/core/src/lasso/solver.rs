//! Cyclic coordinate descent on the sufficient statistics (XᵀX, Xᵀy).

use super::{Design, ModelSignPair};
use crate::error::{Error, Result};

const UPDATE_TOL: f64 = 1e-10;
const MAX_SWEEPS: usize = 100_000;
const KKT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct LassoFit {
    pub beta: Vec<f64>,
    pub pair: ModelSignPair,
    pub sweeps: usize,
}

/// argmin_β ½‖y − Xβ‖² + λ‖β‖₁.
pub fn lasso_solve(design: &Design, y: &[f64], lambda: f64) -> Result<LassoFit> {
    let c = design.xt(y)?;
    lasso_solve_stats(design, &c, lambda, None)
}

/// The same problem written as ½βᵀGβ − cᵀβ + λ‖β‖₁ with c = Xᵀy.
pub fn lasso_solve_stats(design: &Design, c: &[f64], lambda: f64, warm: Option<&[f64]>) -> Result<LassoFit> {
    let d = design.d();
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::domain(format!("lambda = {lambda} must be positive")));
    }
    if c.len() != d {
        return Err(Error::domain(format!("Xᵀy has length {}, design has {d} columns", c.len())));
    }
    let g = design.gram();
    if (0..d).any(|j| !(g[(j, j)] > 0.0)) {
        return Err(Error::Degenerate("design has a zero column".into()));
    }
    let mut beta = match warm {
        Some(w) if w.len() == d => w.to_vec(),
        _ => vec![0.0; d],
    };
    // grad = c − Gβ, maintained incrementally.
    let mut grad: Vec<f64> = (0..d).map(|j| c[j] - (0..d).map(|k| g[(j, k)] * beta[k]).sum::<f64>()).collect();
    let mut sweeps = 0;
    loop {
        if sweeps >= MAX_SWEEPS {
            return Err(Error::Solver(format!("coordinate descent did not converge in {MAX_SWEEPS} sweeps")));
        }
        sweeps += 1;
        let mut max_update = 0.0f64;
        for j in 0..d {
            let gjj = g[(j, j)];
            let z = grad[j] + gjj * beta[j];
            let new = soft_threshold(z, lambda) / gjj;
            let delta = new - beta[j];
            if delta != 0.0 {
                for k in 0..d {
                    grad[k] -= g[(k, j)] * delta;
                }
                beta[j] = new;
                max_update = max_update.max(delta.abs());
            }
        }
        if max_update < UPDATE_TOL {
            break;
        }
    }
    let pair = ModelSignPair::from_beta(&beta);
    polish(design, c, lambda, &mut beta, &pair)?;
    check_kkt(design, c, lambda, &beta, &pair)?;
    Ok(LassoFit { beta, pair, sweeps })
}

fn soft_threshold(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

/// Replaces β_M by the exact local solution G_MM⁻¹(c_M − λs) when its signs agree.
fn polish(design: &Design, c: &[f64], lambda: f64, beta: &mut [f64], pair: &ModelSignPair) -> Result<()> {
    if pair.model.is_empty() {
        return Ok(());
    }
    let inv = design.gram_inverse(&pair.model)?;
    let local = super::local_solution(&inv, &pair.model, &pair.signs, c, lambda);
    if local.iter().zip(&pair.signs).all(|(b, &s)| b * f64::from(s) > 0.0) {
        for (k, &j) in pair.model.iter().enumerate() {
            beta[j] = local[k];
        }
    }
    Ok(())
}

/// KKT residuals of a candidate solution: |c_j − G_jβ| ≤ λ off the support and
/// c_j − G_jβ = λ s_j on it.
pub fn check_kkt(design: &Design, c: &[f64], lambda: f64, beta: &[f64], pair: &ModelSignPair) -> Result<()> {
    let g = design.gram();
    let d = design.d();
    let tol = KKT_TOL * lambda.max(1.0);
    let mut k = 0;
    for j in 0..d {
        let r = c[j] - (0..d).map(|i| g[(j, i)] * beta[i]).sum::<f64>();
        if k < pair.model.len() && pair.model[k] == j {
            if (r - lambda * f64::from(pair.signs[k])).abs() > tol {
                return Err(Error::Solver(format!("KKT violated on active variable {j}: residual {r}")));
            }
            k += 1;
        } else if r.abs() > lambda * (1.0 + KKT_TOL) {
            return Err(Error::Solver(format!("KKT violated on inactive variable {j}: |{r}| > {lambda}")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngSpec;
    use nalgebra::DMatrix;

    #[test]
    fn orthonormal_soft_threshold() {
        let x = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        let d = Design::new(x).unwrap();
        let fit = lasso_solve(&d, &[3.0, 0.1, 5.0], 1.0).unwrap();
        assert!((fit.beta[0] - 2.0).abs() < 1e-12);
        assert_eq!(fit.beta[1], 0.0);
        assert_eq!(fit.pair, ModelSignPair::new(vec![0], vec![1]).unwrap());
    }

    #[test]
    fn large_lambda_gives_empty_model() {
        let d = Design::gaussian_normalized(20, 4, RngSpec::new(3, 0)).unwrap();
        let y: Vec<f64> = (0..20).map(|i| (i as f64).sin()).collect();
        let c = d.xt(&y).unwrap();
        let lmax = c.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let fit = lasso_solve(&d, &y, lmax * 1.01).unwrap();
        assert!(fit.pair.model.is_empty());
        let fit = lasso_solve(&d, &y, lmax * 0.9).unwrap();
        assert_eq!(fit.pair.model.len(), 1);
    }

    #[test]
    fn rejects_bad_lambda() {
        let d = Design::gaussian_normalized(5, 2, RngSpec::new(4, 0)).unwrap();
        assert!(lasso_solve(&d, &[0.0; 5], 0.0).is_err());
        assert!(lasso_solve(&d, &[0.0; 4], 1.0).is_err());
    }
}
