//! Simultaneous inference over the coefficients of a set of models.
//!
//! With W = XᵀZ ~ N(0, σ²XᵀX), the standardized contrast for (j, M) is
//! e_jᵀ(X_MᵀX_M)⁻¹W_M / σ̂_{j·M}, so every quantile is computed from draws of
//! W alone.

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};

use super::{Design, ModelSignPair, PlausibleModels};
use crate::error::{Error, Result};
use crate::rng::RngSpec;
use crate::stats::mc::check_alpha;
use crate::stats::{upper_quantile_estimate, Interval, IntervalSet, QuantileEstimate, MIN_N_DRAWS};
use crate::theory::BudgetSplit;

const CHUNK: usize = 1024;
/// Largest d for which every submodel is materialized.
pub const MAX_FULL_D: usize = 16;

/// Draws of N(0, XᵀX) through a square-root factor of the Gram matrix.
#[derive(Debug, Clone)]
pub struct GramSampler {
    factor: DMatrix<f64>,
}

impl GramSampler {
    pub fn new(design: &Design) -> Self {
        let eig = design.gram().clone().symmetric_eigen();
        let d = design.d();
        let mut factor = eig.eigenvectors.clone();
        for k in 0..d {
            let s = eig.eigenvalues[k].max(0.0).sqrt();
            for i in 0..d {
                factor[(i, k)] *= s;
            }
        }
        Self { factor }
    }

    /// Quantile of max_k |(C W)_k| for unit noise, with C given row-wise.
    pub fn max_abs_quantile(&self, contrasts: &DMatrix<f64>, alpha: f64, rng: RngSpec, n_draws: usize) -> Result<QuantileEstimate> {
        check_alpha(alpha, "max_abs_quantile")?;
        if n_draws < MIN_N_DRAWS {
            return Err(Error::domain(format!("n_draws = {n_draws} below the minimum of {MIN_N_DRAWS}")));
        }
        if contrasts.nrows() == 0 {
            return Err(Error::domain("empty contrast set"));
        }
        let d = self.factor.nrows();
        let cl = contrasts * &self.factor;
        let mut r = rng.rng();
        let mut sups = Vec::with_capacity(n_draws);
        let mut done = 0;
        while done < n_draws {
            let b = CHUNK.min(n_draws - done);
            let xi = DMatrix::from_fn(d, b, |_, _| StandardNormal.sample(&mut r));
            let v = &cl * xi;
            for col in v.column_iter() {
                sups.push(col.iter().fold(0.0f64, |m, x| m.max(x.abs())));
            }
            done += b;
        }
        Ok(upper_quantile_estimate(&mut sups, alpha))
    }

    /// q^α({X_j}) for unit noise.
    pub fn column_quantile(&self, alpha: f64, rng: RngSpec, n_draws: usize) -> Result<QuantileEstimate> {
        let d = self.factor.nrows();
        self.max_abs_quantile(&DMatrix::identity(d, d), alpha, rng, n_draws)
    }
}

fn push_model_contrasts(design: &Design, model: &[usize], rows: &mut Vec<Vec<f64>>) -> Result<()> {
    if model.is_empty() {
        return Ok(());
    }
    let inv = design.gram_inverse(model)?;
    for a in 0..model.len() {
        let scale = inv[(a, a)].sqrt();
        let mut row = vec![0.0; design.d()];
        for (b, &mb) in model.iter().enumerate() {
            row[mb] = inv[(a, b)] / scale;
        }
        rows.push(row);
    }
    Ok(())
}

/// Contrast coefficients on W for every (j, M) with j ∈ M and M in `models`.
fn contrast_matrix(design: &Design, models: &PlausibleModels, extra: &[usize]) -> Result<DMatrix<f64>> {
    let d = design.d();
    let mut rows = Vec::new();
    match models {
        PlausibleModels::Listed(set) => {
            for m in set {
                push_model_contrasts(design, m, &mut rows)?;
            }
            if !set.contains(extra) {
                push_model_contrasts(design, extra, &mut rows)?;
            }
        }
        PlausibleModels::All { d } => {
            if *d > MAX_FULL_D {
                return Err(Error::domain(format!("inference over all submodels needs d <= {MAX_FULL_D}, got {d}")));
            }
            for mask in 1u32..(1u32 << d) {
                let m: Vec<usize> = (0..*d).filter(|j| mask >> j & 1 == 1).collect();
                push_model_contrasts(design, &m, &mut rows)?;
            }
        }
    }
    if rows.is_empty() {
        return Err(Error::domain("no coefficients to cover"));
    }
    Ok(DMatrix::from_fn(rows.len(), d, |i, j| rows[i][j]))
}

/// q^α(V) over the standardized coefficients of `models`, for unit noise.
pub fn posi_quantile(design: &Design, models: &PlausibleModels, alpha: f64, rng: RngSpec, n_draws: usize) -> Result<QuantileEstimate> {
    let c = contrast_matrix(design, models, &[])?;
    GramSampler::new(design).max_abs_quantile(&c, alpha, rng, n_draws)
}

/// θ̂_{j·M̂} ± q·σ·σ̂_{j·M̂} for j ∈ M̂, with q taken over `models` at level α − ν.
#[allow(clippy::too_many_arguments)]
pub fn posi_intervals(
    design: &Design,
    y: &[f64],
    selected: &ModelSignPair,
    models: &PlausibleModels,
    budget: BudgetSplit,
    sigma: f64,
    rng: RngSpec,
    n_draws: usize,
) -> Result<IntervalSet> {
    if selected.is_empty() {
        return Ok(IntervalSet::empty(budget.alpha()));
    }
    let c = contrast_matrix(design, models, &selected.model)?;
    let q = GramSampler::new(design).max_abs_quantile(&c, budget.inference_level(), rng, n_draws)?;
    intervals_with_quantile(design, y, &selected.model, q.value, sigma, budget.alpha())
}

/// Least-squares intervals on model `model` with a given standardized quantile.
pub fn intervals_with_quantile(
    design: &Design,
    y: &[f64],
    model: &[usize],
    q: f64,
    sigma: f64,
    alpha: f64,
) -> Result<IntervalSet> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::domain(format!("sigma = {sigma} must be positive")));
    }
    if model.is_empty() {
        return Ok(IntervalSet::empty(alpha));
    }
    let c = design.xt(y)?;
    let inv = design.gram_inverse(model)?;
    let k = model.len();
    let entries = (0..k)
        .map(|a| {
            let theta: f64 = (0..k).map(|b| inv[(a, b)] * c[model[b]]).sum();
            (model[a], Interval::symmetric(theta, q * sigma * inv[(a, a)].sqrt()))
        })
        .collect();
    Ok(IntervalSet { entries, alpha })
}

/// Projection parameter θ_M = X_M⁺μ.
pub fn projection_parameter(design: &Design, mu: &[f64], model: &[usize]) -> Result<Vec<f64>> {
    let c = design.xt(mu)?;
    let inv = design.gram_inverse(model)?;
    let k = model.len();
    Ok((0..k).map(|a| (0..k).map(|b| inv[(a, b)] * c[model[b]]).sum()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    #[test]
    fn single_contrast_is_nominal() {
        let design = Design::gaussian_normalized(40, 3, RngSpec::new(1, 0)).unwrap();
        let models = PlausibleModels::Listed(BTreeSet::from([vec![1]]));
        let q = posi_quantile(&design, &models, 0.09, RngSpec::new(2, 0), 200_000).unwrap();
        let exact = crate::stats::nominal_quantile(0.09).unwrap();
        assert!((q.value - exact).abs() < 0.01, "{} vs {exact}", q.value);
    }

    #[test]
    fn orthonormal_singletons_match_iid() {
        let design = Design::new(DMatrix::identity(6, 4)).unwrap();
        let models = PlausibleModels::Listed((0..4).map(|j| vec![j]).collect());
        let q = posi_quantile(&design, &models, 0.09, RngSpec::new(3, 0), 200_000).unwrap();
        let exact = crate::stats::max_abs_quantile_iid(4, 0.09, 1.0).unwrap();
        assert!((q.value - exact).abs() < 0.015, "{} vs {exact}", q.value);
    }

    #[test]
    fn full_set_dominates_listed() {
        let design = Design::gaussian_normalized(30, 4, RngSpec::new(4, 0)).unwrap();
        let small = PlausibleModels::Listed(BTreeSet::from([vec![0, 1]]));
        let all = PlausibleModels::All { d: 4 };
        let a = posi_quantile(&design, &small, 0.1, RngSpec::new(5, 0), 20_000).unwrap();
        let b = posi_quantile(&design, &all, 0.1, RngSpec::new(5, 0), 20_000).unwrap();
        assert!(a.value <= b.value);
    }

    #[test]
    fn intervals_center_on_least_squares() {
        let design = Design::new(DMatrix::identity(3, 2)).unwrap();
        let y = [1.5, -2.0, 0.3];
        let iv = intervals_with_quantile(&design, &y, &[0, 1], 2.0, 0.5, 0.1).unwrap();
        assert_eq!(iv.entries[0].0, 0);
        assert!((iv.entries[0].1.center() - 1.5).abs() < 1e-12);
        assert!((iv.entries[1].1.half_width() - 1.0).abs() < 1e-12);
    }
}
