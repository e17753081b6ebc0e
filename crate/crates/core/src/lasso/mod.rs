//! Post-LASSO inference over the plausible models.
//!
//! The plausible models are those the LASSO selects for some y′ with
//! ‖Xᵀy − Xᵀy′‖∞ ≤ s_ν. They are enumerated by walking across faces of the
//! model-sign polyhedra that tile this box, starting from the observed pair.

mod design;
mod enumerate;
mod marginal;
mod polyhedron;
mod posi;
mod screening;
mod solver;

use std::fmt;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};

pub use design::{Design, RANK_TOL};
pub use enumerate::{
    enumerate_models_in_box, enumerate_plausible_models, screening_radius, EnumerationOptions, ModelFrontier,
    PlausibleModels, DEFAULT_P_MAX,
};
pub use marginal::marginal_screening_plausible;
pub use polyhedron::{selection_polyhedron, selection_rows, RowLabel, SelectionRows};
pub use posi::{
    intervals_with_quantile, posi_intervals, posi_quantile, projection_parameter, GramSampler, MAX_FULL_D,
};
pub use screening::{exact_screening, safe_screening, ExactScreening, LassoProblem, SafeSets};
pub use solver::{check_kkt, lasso_solve, lasso_solve_stats, LassoFit};

/// A LASSO support with the signs of its coefficients, stored with the
/// support sorted ascending.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ModelSignPair {
    pub model: Vec<usize>,
    pub signs: Vec<i8>,
}

impl ModelSignPair {
    pub fn new(model: Vec<usize>, signs: Vec<i8>) -> Result<Self> {
        if model.len() != signs.len() {
            return Err(Error::domain(format!("{} variables but {} signs", model.len(), signs.len())));
        }
        if signs.iter().any(|&s| s != 1 && s != -1) {
            return Err(Error::domain("signs must be +1 or -1"));
        }
        let mut pairs: Vec<(usize, i8)> = model.into_iter().zip(signs).collect();
        pairs.sort_unstable();
        if pairs.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::domain("model has repeated variables"));
        }
        let (model, signs) = pairs.into_iter().unzip();
        Ok(Self { model, signs })
    }

    pub fn empty() -> Self {
        Self { model: Vec::new(), signs: Vec::new() }
    }

    /// Support and signs of a coefficient vector.
    pub fn from_beta(beta: &[f64]) -> Self {
        let (model, signs) = beta
            .iter()
            .enumerate()
            .filter(|(_, b)| **b != 0.0)
            .map(|(j, b)| (j, if *b > 0.0 { 1 } else { -1 }))
            .unzip();
        Self { model, signs }
    }

    pub fn len(&self) -> usize {
        self.model.len()
    }

    pub fn is_empty(&self) -> bool {
        self.model.is_empty()
    }

    pub fn position(&self, j: usize) -> Option<usize> {
        self.model.binary_search(&j).ok()
    }

    pub fn with_added(&self, j: usize, sign: i8) -> Self {
        let pos = self.model.binary_search(&j).unwrap_or_else(|p| p);
        let mut out = self.clone();
        if self.position(j).is_none() {
            out.model.insert(pos, j);
            out.signs.insert(pos, sign);
        }
        out
    }

    pub fn without(&self, j: usize) -> Self {
        let mut out = self.clone();
        if let Some(p) = self.position(j) {
            out.model.remove(p);
            out.signs.remove(p);
        }
        out
    }
}

impl fmt::Display for ModelSignPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (k, (j, s)) in self.model.iter().zip(&self.signs).enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}{}", j, if *s > 0 { '+' } else { '-' })?;
        }
        write!(f, "}}")
    }
}

/// β_(M,s) = (X_MᵀX_M)⁻¹(c_M − λs), the LASSO solution continued linearly.
pub(crate) fn local_solution(inv: &DMatrix<f64>, model: &[usize], signs: &[i8], c: &[f64], lambda: f64) -> Vec<f64> {
    let k = model.len();
    (0..k)
        .map(|a| (0..k).map(|b| inv[(a, b)] * (c[model[b]] - lambda * f64::from(signs[b]))).sum())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_ordering() {
        let a = ModelSignPair::new(vec![3, 1], vec![-1, 1]).unwrap();
        assert_eq!(a.model, vec![1, 3]);
        assert_eq!(a.signs, vec![1, -1]);
        assert_eq!(a.to_string(), "{1+,3-}");
        assert_eq!(a.with_added(2, 1).model, vec![1, 2, 3]);
        assert_eq!(a.without(1).model, vec![3]);
        assert!(ModelSignPair::new(vec![1, 1], vec![1, 1]).is_err());
        assert!(ModelSignPair::new(vec![1], vec![0]).is_err());
    }
}
