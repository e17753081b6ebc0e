use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};

use super::ModelSignPair;
use crate::error::{Error, Result};
use crate::rng::RngSpec;

/// Relative singular-value floor below which X_M is treated as rank deficient.
pub const RANK_TOL: f64 = 1e-8;

/// Fixed design matrix with its Gram matrix.
#[derive(Debug, Clone)]
pub struct Design {
    x: DMatrix<f64>,
    xtx: DMatrix<f64>,
    column_norms: Vec<f64>,
}

impl Design {
    pub fn new(x: DMatrix<f64>) -> Result<Self> {
        if x.ncols() == 0 || x.nrows() == 0 {
            return Err(Error::domain("design matrix must be non-empty"));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("design matrix entries must be finite"));
        }
        let xtx = x.transpose() * &x;
        let column_norms = x.column_iter().map(|c| c.norm()).collect();
        Ok(Self { x, xtx, column_norms })
    }

    /// i.i.d. N(0, 1) entries with every column rescaled to unit norm.
    pub fn gaussian_normalized(n: usize, d: usize, rng: RngSpec) -> Result<Self> {
        let mut r = rng.rng();
        let mut x = DMatrix::from_fn(n, d, |_, _| StandardNormal.sample(&mut r));
        for mut col in x.column_iter_mut() {
            let norm = col.norm();
            if norm > 0.0 {
                col /= norm;
            }
        }
        Self::new(x)
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.xtx
    }

    pub fn column_norms(&self) -> &[f64] {
        &self.column_norms
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn d(&self) -> usize {
        self.x.ncols()
    }

    /// Xᵀy.
    pub fn xt(&self, y: &[f64]) -> Result<Vec<f64>> {
        if y.len() != self.n() {
            return Err(Error::domain(format!("outcome has length {}, design has {} rows", y.len(), self.n())));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("outcomes must be finite"));
        }
        Ok((self.x.transpose() * DVector::from_column_slice(y)).as_slice().to_vec())
    }

    /// Xβ.
    pub fn predict(&self, beta: &[f64]) -> Vec<f64> {
        (&self.x * DVector::from_column_slice(beta)).as_slice().to_vec()
    }

    /// True when every column subset may be used for inference, i.e. X has
    /// full column rank.
    pub fn is_full_rank(&self) -> bool {
        let all: Vec<usize> = (0..self.d()).collect();
        self.gram_inverse(&all).is_ok()
    }

    /// (X_Mᵀ X_M)⁻¹ for the sorted index set `model`.
    pub fn gram_inverse(&self, model: &[usize]) -> Result<DMatrix<f64>> {
        let k = model.len();
        let sub = DMatrix::from_fn(k, k, |a, b| self.xtx[(model[a], model[b])]);
        if k == 0 {
            return Ok(sub);
        }
        let eig = sub.clone().symmetric_eigen();
        let max = eig.eigenvalues.max();
        let min = eig.eigenvalues.min();
        if !(max > 0.0) || min <= RANK_TOL * RANK_TOL * max {
            return Err(Error::Degenerate(format!("columns {model:?} of the design are rank deficient")));
        }
        sub.cholesky()
            .map(|c| c.inverse())
            .ok_or_else(|| Error::Degenerate(format!("columns {model:?} of the design are rank deficient")))
    }

    pub(crate) fn check_pair(&self, pair: &ModelSignPair) -> Result<()> {
        if pair.model.iter().any(|&j| j >= self.d()) {
            return Err(Error::domain(format!("model {:?} has indices beyond d = {}", pair.model, self.d())));
        }
        Ok(())
    }
}
