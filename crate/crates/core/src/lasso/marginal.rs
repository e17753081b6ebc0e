use super::Design;
use crate::error::{Error, Result};

/// Candidate variables for marginal screening of the top `k` inner products:
/// {i : |X_iᵀy| ≥ c_(k) − 2·s_ν}. Every k-subset of the result is plausible.
pub fn marginal_screening_plausible(design: &Design, y: &[f64], k: usize, s_nu: f64) -> Result<Vec<usize>> {
    let d = design.d();
    if k == 0 || k > d {
        return Err(Error::domain(format!("k = {k} must lie in 1..={d}")));
    }
    if !(s_nu >= 0.0) {
        return Err(Error::domain(format!("box radius {s_nu} must be nonnegative")));
    }
    let c: Vec<f64> = design.xt(y)?.into_iter().map(f64::abs).collect();
    let mut sorted = c.clone();
    sorted.sort_unstable_by(|a, b| b.total_cmp(a));
    let cut = sorted[k - 1] - 2.0 * s_nu;
    Ok((0..d).filter(|&i| c[i] >= cut).collect())
}
