//! Neighbors of a model-sign polyhedron inside the box
//! B = {y′ : ‖Xᵀy − Xᵀy′‖∞ ≤ s_ν}.
//!
//! Exact screening solves one LP per candidate row in the coordinates t of
//! Xᵀy′ = Xᵀy + Bt, where B = I when X has full column rank and B = XᵀX
//! otherwise (so that Xᵀy′ stays in the row space of X).

use nalgebra::DMatrix;

use super::polyhedron::{selection_rows, RowLabel};
use super::{local_solution, Design, LassoFit, ModelSignPair};
use crate::error::{Error, Result};
use crate::lp::{row_support, Polyhedron, RowSupport};

/// LASSO data reduced to the sufficient statistic c = Xᵀy.
#[derive(Debug, Clone)]
pub struct LassoProblem<'a> {
    design: &'a Design,
    c: Vec<f64>,
    lambda: f64,
    basis: Option<DMatrix<f64>>,
}

impl<'a> LassoProblem<'a> {
    pub fn new(design: &'a Design, y: &[f64], lambda: f64) -> Result<Self> {
        let c = design.xt(y)?;
        Self::from_stats(design, c, lambda)
    }

    pub fn from_stats(design: &'a Design, c: Vec<f64>, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::domain(format!("lambda = {lambda} must be positive")));
        }
        if c.len() != design.d() || c.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("Xᵀy must be a finite d-vector"));
        }
        let basis = if design.is_full_rank() { None } else { Some(design.gram().clone()) };
        Ok(Self { design, c, lambda, basis })
    }

    pub fn design(&self) -> &Design {
        self.design
    }

    pub fn stats(&self) -> &[f64] {
        &self.c
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn solve(&self) -> Result<LassoFit> {
        super::lasso_solve_stats(self.design, &self.c, self.lambda, None)
    }

    /// The box B in t-coordinates.
    fn box_region(&self, s_nu: f64) -> Result<Polyhedron> {
        let d = self.design.d();
        match &self.basis {
            None => Polyhedron::axis_box(&vec![-s_nu; d], &vec![s_nu; d]),
            Some(b) => {
                let mut p = Polyhedron::new(d);
                for j in 0..d {
                    let row: Vec<f64> = (0..d).map(|k| b[(j, k)]).collect();
                    p.push(row.clone(), s_nu, false)?;
                    p.push(row.iter().map(|v| -v).collect(), s_nu, false)?;
                }
                Ok(p)
            }
        }
    }

    /// A d-vector v acting on Xᵀy′, mapped to t-coordinates as Bᵀv.
    fn to_t(&self, v: &[f64]) -> Vec<f64> {
        match &self.basis {
            None => v.to_vec(),
            Some(b) => {
                let d = v.len();
                (0..d).map(|k| (0..d).map(|j| b[(j, k)] * v[j]).sum()).collect()
            }
        }
    }
}

/// Variables whose status provably cannot change anywhere in the box.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SafeSets {
    /// Active variables that stay active.
    pub safe_in: Vec<usize>,
    /// Inactive variables that stay inactive.
    pub safe_out: Vec<usize>,
}

impl SafeSets {
    pub fn contains(&self, j: usize) -> bool {
        self.safe_in.contains(&j) || self.safe_out.contains(&j)
    }
}

pub fn safe_screening(problem: &LassoProblem, pair: &ModelSignPair, s_nu: f64) -> Result<SafeSets> {
    check_radius(s_nu)?;
    let design = problem.design;
    design.check_pair(pair)?;
    let g = design.gram();
    let model = &pair.model;
    let k = model.len();
    let inv = design.gram_inverse(model)?;
    let beta = local_solution(&inv, model, &pair.signs, &problem.c, problem.lambda);
    let mut out = SafeSets::default();
    for (a, &j) in model.iter().enumerate() {
        let row_l1: f64 = (0..k).map(|b| inv[(a, b)].abs()).sum();
        if beta[a].abs() > s_nu * row_l1 {
            out.safe_in.push(j);
        }
    }
    for j in (0..design.d()).filter(|j| pair.position(*j).is_none()) {
        let resid = problem.c[j] - (0..k).map(|a| g[(j, model[a])] * beta[a]).sum::<f64>();
        let w_l1: f64 = (0..k).map(|b| (0..k).map(|a| g[(j, model[a])] * inv[(a, b)]).sum::<f64>().abs()).sum();
        if resid.abs() < problem.lambda - s_nu * (1.0 + w_l1) {
            out.safe_out.push(j);
        }
    }
    Ok(out)
}

/// Neighboring pairs reachable through non-redundant rows of P(M, s) ∩ B.
#[derive(Debug, Clone, PartialEq)]
pub struct ExactScreening {
    pub neighbors: Vec<ModelSignPair>,
    pub lp_count: usize,
}

pub fn exact_screening(
    problem: &LassoProblem,
    pair: &ModelSignPair,
    s_nu: f64,
    safe: Option<&SafeSets>,
) -> Result<ExactScreening> {
    check_radius(s_nu)?;
    let rows = selection_rows(problem.design, pair, problem.lambda)?;
    let values = rows.values(&problem.c);
    let d = problem.design.d();
    let mut region = Polyhedron::new(d);
    for ((v, &b), &val) in rows.coef.iter().zip(&rows.rhs).zip(&values) {
        region.push(problem.to_t(v), b - val, true)?;
    }
    let bx = problem.box_region(s_nu)?;
    let mut neighbors = Vec::new();
    let mut lp_count = 0;
    for (i, label) in rows.labels.iter().enumerate() {
        let var = match *label {
            RowLabel::Enter { var, .. } | RowLabel::Exit { var } => var,
        };
        if safe.is_some_and(|s| s.contains(var)) {
            continue;
        }
        lp_count += 1;
        if let RowSupport::Exceeds(_) = row_support(&region, i, &bx)? {
            neighbors.push(match *label {
                RowLabel::Enter { var, sign } => pair.with_added(var, sign),
                RowLabel::Exit { var } => pair.without(var),
            });
        }
    }
    Ok(ExactScreening { neighbors, lp_count })
}

/// True when P(M, s) meets the box; used to certify visited pairs.
pub(crate) fn meets_box(problem: &LassoProblem, pair: &ModelSignPair, s_nu: f64) -> Result<bool> {
    let rows = selection_rows(problem.design, pair, problem.lambda)?;
    let values = rows.values(&problem.c);
    let mut region = problem.box_region(s_nu)?;
    for ((v, &b), &val) in rows.coef.iter().zip(&rows.rhs).zip(&values) {
        region.push(problem.to_t(v), b - val, true)?;
    }
    let res = crate::lp::lp_maximize(&vec![0.0; problem.design.d()], &region)?;
    Ok(res.status != crate::lp::LpStatus::Infeasible)
}

fn check_radius(s_nu: f64) -> Result<()> {
    if s_nu >= 0.0 && s_nu.is_finite() {
        Ok(())
    } else {
        Err(Error::domain(format!("box radius {s_nu} must be finite and nonnegative")))
    }
}
