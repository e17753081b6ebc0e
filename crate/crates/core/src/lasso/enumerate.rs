//! Breadth-first enumeration of the model-sign pairs meeting the box.

use std::collections::{BTreeSet, HashSet, VecDeque};

use serde::Serialize;

use super::screening::{exact_screening, meets_box, safe_screening, LassoProblem};
use super::{Design, GramSampler, ModelSignPair};
use crate::error::{Error, Result};
use crate::rng::RngSpec;
use crate::theory::BudgetSplit;

/// Default cap on visited plus queued pairs.
pub const DEFAULT_P_MAX: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationOptions {
    pub p_max: usize,
    pub use_safe: bool,
}

impl Default for EnumerationOptions {
    fn default() -> Self {
        Self { p_max: DEFAULT_P_MAX, use_safe: true }
    }
}

/// Search state after enumeration stops.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelFrontier {
    /// Visited pairs in visiting order.
    pub visited: Vec<ModelSignPair>,
    /// Pairs still queued when the search stopped (empty unless capped).
    pub queue: Vec<ModelSignPair>,
    pub capped: bool,
    /// Box radius s_ν.
    pub radius: f64,
    /// Redundancy LPs solved.
    pub lp_count: usize,
}

/// Models selected somewhere in the box.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum PlausibleModels {
    /// Distinct supports, sorted.
    Listed(BTreeSet<Vec<usize>>),
    /// Every subset of the d variables; the result of a capped search.
    All { d: usize },
}

impl PlausibleModels {
    pub fn is_all(&self) -> bool {
        matches!(self, PlausibleModels::All { .. })
    }

    pub fn contains(&self, model: &[usize]) -> bool {
        match self {
            PlausibleModels::Listed(set) => set.contains(model),
            PlausibleModels::All { d } => model.iter().all(|&j| j < *d),
        }
    }

    /// Number of models, counting the empty model when listed.
    pub fn len(&self) -> usize {
        match self {
            PlausibleModels::Listed(set) => set.len(),
            PlausibleModels::All { d } => 1usize.checked_shl(*d as u32).unwrap_or(usize::MAX),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// s_ν = 2·q^ν({X_j}) for noise N(0, σ²I).
pub fn screening_radius(design: &Design, sigma: f64, nu: f64, rng: RngSpec, n_draws: usize) -> Result<f64> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::domain(format!("sigma = {sigma} must be positive")));
    }
    let q = GramSampler::new(design).column_quantile(nu, rng, n_draws)?;
    Ok(2.0 * sigma * q.value)
}

/// Solves the LASSO at y, computes s_ν, and enumerates the plausible models.
#[allow(clippy::too_many_arguments)]
pub fn enumerate_plausible_models(
    design: &Design,
    y: &[f64],
    lambda: f64,
    budget: BudgetSplit,
    sigma: f64,
    rng: RngSpec,
    n_draws: usize,
    p_max: usize,
) -> Result<(PlausibleModels, ModelFrontier)> {
    let s_nu = screening_radius(design, sigma, budget.nu(), rng, n_draws)?;
    let problem = LassoProblem::new(design, y, lambda)?;
    let start = problem.solve()?.pair;
    enumerate_models_in_box(&problem, start, s_nu, EnumerationOptions { p_max, use_safe: true })
}

/// Flood fill from `start` over pairs whose polyhedra meet the box of radius `s_nu`.
pub fn enumerate_models_in_box(
    problem: &LassoProblem,
    start: ModelSignPair,
    s_nu: f64,
    options: EnumerationOptions,
) -> Result<(PlausibleModels, ModelFrontier)> {
    let d = problem.design().d();
    let mut seen: HashSet<ModelSignPair> = HashSet::new();
    let mut queue = VecDeque::new();
    let mut visited = Vec::new();
    let mut lp_count = 0;
    let mut capped = false;
    seen.insert(start.clone());
    queue.push_back(start);
    while let Some(pair) = queue.pop_front() {
        let named = |e: Error| match e {
            Error::Degenerate(msg) => Error::Degenerate(format!("pair {pair}: {msg}")),
            other => other,
        };
        debug_assert!(meets_box(problem, &pair, s_nu).map_err(named)?, "pair {pair} does not meet the box");
        let safe = if options.use_safe { Some(safe_screening(problem, &pair, s_nu).map_err(named)?) } else { None };
        let exact = exact_screening(problem, &pair, s_nu, safe.as_ref()).map_err(named)?;
        lp_count += exact.lp_count;
        visited.push(pair);
        for nb in exact.neighbors {
            if seen.insert(nb.clone()) {
                queue.push_back(nb);
            }
        }
        if visited.len() + queue.len() > options.p_max {
            capped = true;
            break;
        }
    }
    let models = if capped {
        PlausibleModels::All { d }
    } else {
        PlausibleModels::Listed(visited.iter().map(|p| p.model.clone()).collect())
    };
    let frontier = ModelFrontier { visited, queue: queue.into_iter().collect(), capped, radius: s_nu, lp_count };
    Ok((models, frontier))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn listed(models: &[&[usize]]) -> PlausibleModels {
        PlausibleModels::Listed(models.iter().map(|m| m.to_vec()).collect())
    }

    #[test]
    fn one_dimensional_fixtures() {
        let d = Design::new(DMatrix::from_row_slice(2, 1, &[1.0, 0.0])).unwrap();
        let p = LassoProblem::from_stats(&d, vec![1.2], 1.0).unwrap();
        let start = p.solve().unwrap().pair;
        let (m, f) = enumerate_models_in_box(&p, start.clone(), 0.5, EnumerationOptions::default()).unwrap();
        assert_eq!(m, listed(&[&[], &[0]]));
        assert!(!f.capped);
        let (m, _) = enumerate_models_in_box(&p, start, 0.0, EnumerationOptions::default()).unwrap();
        assert_eq!(m, listed(&[&[0]]));
    }

    #[test]
    fn cap_returns_all_models() {
        let design = Design::gaussian_normalized(30, 4, RngSpec::new(9, 0)).unwrap();
        let p = LassoProblem::from_stats(&design, vec![1.0, -1.0, 0.9, 1.1], 1.0).unwrap();
        let start = p.solve().unwrap().pair;
        let opts = EnumerationOptions { p_max: 2, use_safe: true };
        let (m, f) = enumerate_models_in_box(&p, start, 3.0, opts).unwrap();
        assert!(f.capped);
        assert!(m.is_all());
        assert_eq!(m.len(), 16);
    }

    #[test]
    fn radius_matches_iid_closed_form_for_orthonormal_columns() {
        let x = DMatrix::<f64>::identity(5, 3);
        let d = Design::new(x).unwrap();
        let s = screening_radius(&d, 1.0, 0.05, RngSpec::new(1, 0), 200_000).unwrap();
        let exact = crate::stats::max_abs_quantile_iid(3, 0.05, 1.0).unwrap();
        assert!((s - 2.0 * exact).abs() < 0.03, "{s} vs {}", 2.0 * exact);
    }
}
