//! The selection event {M̂ = M, ŝ = s} as a polyhedron.
//!
//! Every row a satisfies a = Xv for a d-vector v, so aᵀy′ = vᵀXᵀy′ and the
//! event depends on y′ only through Xᵀy′. [`selection_rows`] stores the
//! v-coefficients; [`selection_polyhedron`] expands them to outcome space.

use nalgebra::DVector;
use serde::Serialize;

use super::{Design, ModelSignPair};
use crate::error::{Error, Result};
use crate::lp::Polyhedron;

/// What crossing a row's boundary does to the model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RowLabel {
    /// An inactive variable reaches |X_jᵀr| = λ and enters with `sign`.
    Enter { var: usize, sign: i8 },
    /// An active coefficient reaches zero.
    Exit { var: usize },
}

/// Rows vᵀ(Xᵀy′) < rhs, ordered as: entry with + sign, entry with − sign, exit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectionRows {
    pub labels: Vec<RowLabel>,
    pub coef: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
}

impl SelectionRows {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// vᵀc for every row.
    pub fn values(&self, c: &[f64]) -> Vec<f64> {
        self.coef.iter().map(|v| v.iter().zip(c).map(|(a, b)| a * b).sum()).collect()
    }

    /// Strict membership of the statistic c = Xᵀy′.
    pub fn contains_stats(&self, c: &[f64]) -> bool {
        self.values(c).iter().zip(&self.rhs).all(|(v, b)| v < b)
    }
}

pub fn selection_rows(design: &Design, pair: &ModelSignPair, lambda: f64) -> Result<SelectionRows> {
    design.check_pair(pair)?;
    if !(lambda > 0.0) {
        return Err(Error::domain(format!("lambda = {lambda} must be positive")));
    }
    let d = design.d();
    let g = design.gram();
    let model = &pair.model;
    let k = model.len();
    let inv = design.gram_inverse(model)?;
    let s: Vec<f64> = pair.signs.iter().map(|&v| f64::from(v)).collect();
    let inv_s: Vec<f64> = (0..k).map(|a| (0..k).map(|b| inv[(a, b)] * s[b]).sum()).collect();
    let inactive: Vec<usize> = (0..d).filter(|j| pair.position(*j).is_none()).collect();

    let mut plus = Vec::with_capacity(inactive.len());
    let mut minus_rhs = Vec::with_capacity(inactive.len());
    let mut plus_rhs = Vec::with_capacity(inactive.len());
    for &j in &inactive {
        // w = G_jM (X_MᵀX_M)⁻¹
        let w: Vec<f64> = (0..k).map(|b| (0..k).map(|a| g[(j, model[a])] * inv[(a, b)]).sum()).collect();
        let mut v = vec![0.0; d];
        v[j] = 1.0 / lambda;
        for (b, &mb) in model.iter().enumerate() {
            v[mb] -= w[b] / lambda;
        }
        let ws: f64 = w.iter().zip(&s).map(|(a, b)| a * b).sum();
        plus.push(v);
        plus_rhs.push(1.0 - ws);
        minus_rhs.push(1.0 + ws);
    }

    let mut rows = SelectionRows { labels: Vec::new(), coef: Vec::new(), rhs: Vec::new() };
    for (i, &j) in inactive.iter().enumerate() {
        rows.labels.push(RowLabel::Enter { var: j, sign: 1 });
        rows.coef.push(plus[i].clone());
        rows.rhs.push(plus_rhs[i]);
    }
    for (i, &j) in inactive.iter().enumerate() {
        rows.labels.push(RowLabel::Enter { var: j, sign: -1 });
        rows.coef.push(plus[i].iter().map(|x| -x).collect());
        rows.rhs.push(minus_rhs[i]);
    }
    for (a, &j) in model.iter().enumerate() {
        let mut v = vec![0.0; d];
        for (b, &mb) in model.iter().enumerate() {
            v[mb] = -s[a] * inv[(a, b)];
        }
        rows.labels.push(RowLabel::Exit { var: j });
        rows.coef.push(v);
        rows.rhs.push(-lambda * s[a] * inv_s[a]);
    }
    Ok(rows)
}

/// The selection event in outcome space; every row is strict.
pub fn selection_polyhedron(design: &Design, pair: &ModelSignPair, lambda: f64) -> Result<Polyhedron> {
    let rows = selection_rows(design, pair, lambda)?;
    let mut p = Polyhedron::new(design.n());
    for (v, &b) in rows.coef.iter().zip(&rows.rhs) {
        let a = design.x() * DVector::from_column_slice(v);
        p.push(a.as_slice().to_vec(), b, true)?;
    }
    Ok(p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lasso::lasso_solve;
    use crate::rng::RngSpec;
    use nalgebra::DMatrix;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn observed_point_is_interior() {
        let d = Design::gaussian_normalized(20, 4, RngSpec::new(1, 0)).unwrap();
        let mut r = RngSpec::new(1, 1).rng();
        for _ in 0..20 {
            let y: Vec<f64> = (0..20).map(|_| 2.0 * Distribution::<f64>::sample(&StandardNormal, &mut r)).collect();
            let fit = lasso_solve(&d, &y, 1.0).unwrap();
            let p = selection_polyhedron(&d, &fit.pair, 1.0).unwrap();
            assert_eq!(p.len(), 2 * (4 - fit.pair.len()) + fit.pair.len());
            assert!(p.contains(&y, 0.0), "pair {}", fit.pair);
        }
    }

    #[test]
    fn empty_model_is_correlation_box() {
        let d = Design::gaussian_normalized(10, 3, RngSpec::new(2, 0)).unwrap();
        let rows = selection_rows(&d, &ModelSignPair::empty(), 2.0).unwrap();
        let c = [1.0, -1.5, 1.9];
        assert!(rows.contains_stats(&c));
        assert!(!rows.contains_stats(&[1.0, -2.1, 0.0]));
        assert_eq!(rows.len(), 6);
    }

    #[test]
    fn membership_matches_solver_d2() {
        let x = DMatrix::from_row_slice(3, 2, &[1.0, 0.0, 0.0, 1.0, 0.0, 0.0]);
        let d = Design::new(x).unwrap();
        let mut r = RngSpec::new(3, 0).rng();
        let pairs: Vec<ModelSignPair> = [
            (vec![], vec![]),
            (vec![0], vec![1]),
            (vec![0], vec![-1]),
            (vec![1], vec![1]),
            (vec![1], vec![-1]),
            (vec![0, 1], vec![1, 1]),
            (vec![0, 1], vec![1, -1]),
            (vec![0, 1], vec![-1, 1]),
            (vec![0, 1], vec![-1, -1]),
        ]
        .into_iter()
        .map(|(m, s)| ModelSignPair::new(m, s).unwrap())
        .collect();
        let polys: Vec<Polyhedron> = pairs.iter().map(|p| selection_polyhedron(&d, p, 1.0).unwrap()).collect();
        for _ in 0..1000 {
            let y: Vec<f64> = (0..3).map(|_| 2.0 * Distribution::<f64>::sample(&StandardNormal, &mut r)).collect();
            let fit = lasso_solve(&d, &y, 1.0).unwrap();
            for (p, poly) in pairs.iter().zip(&polys) {
                assert_eq!(poly.contains(&y, 0.0), *p == fit.pair);
            }
        }
    }
}
