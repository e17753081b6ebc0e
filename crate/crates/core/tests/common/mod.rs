#![allow(dead_code)]

pub mod props;

use std::collections::{BTreeSet, HashMap};

use locsim::lasso::{lasso_solve_stats, Design, ModelSignPair};
use locsim::RngSpec;
use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

/// Random LASSO instance: unit-norm Gaussian design, y = Xβ + ξ, λ in [2, 10].
pub fn lasso_instance(seed: u64, n: usize, d: usize) -> (Design, Vec<f64>, f64) {
    let design = Design::gaussian_normalized(n, d, RngSpec::new(seed, 0)).unwrap();
    let mut r = RngSpec::new(seed, 1).rng();
    let lambda = r.random_range(2.0..10.0);
    let beta: Vec<f64> = (0..d).map(|_| lambda * r.random_range(-2.0..2.0)).collect();
    let mut y = design.predict(&beta);
    for v in y.iter_mut() {
        *v += Distribution::<f64>::sample(&StandardNormal, &mut r);
    }
    (design, y, lambda)
}

/// Closed-form local solution and KKT certificate for one model-sign pair.
struct Certificate {
    pair: ModelSignPair,
    inv: DMatrix<f64>,
}

impl Certificate {
    fn new(design: &Design, pair: ModelSignPair) -> Self {
        let inv = design.gram_inverse(&pair.model).unwrap();
        Self { pair, inv }
    }

    /// True iff the KKT conditions for this pair hold at statistic u.
    fn holds(&self, g: &DMatrix<f64>, u: &[f64], lambda: f64, beta: &mut Vec<f64>) -> bool {
        let m = &self.pair.model;
        let k = m.len();
        beta.clear();
        for a in 0..k {
            let v: f64 = (0..k).map(|b| self.inv[(a, b)] * (u[m[b]] - lambda * f64::from(self.pair.signs[b]))).sum();
            if v * f64::from(self.pair.signs[a]) <= 0.0 {
                return false;
            }
            beta.push(v);
        }
        let mut next = 0;
        for j in 0..u.len() {
            if next < k && m[next] == j {
                next += 1;
                continue;
            }
            let r = u[j] - (0..k).map(|a| g[(j, m[a])] * beta[a]).sum::<f64>();
            if r.abs() > lambda {
                return false;
            }
        }
        true
    }
}

/// Models the LASSO selects on the grid {c + h·k : k ∈ {−steps..steps}^d},
/// h = s/steps. Each grid point is solved by KKT certification of a cached
/// pair, falling back to coordinate descent.
pub fn grid_models(design: &Design, c: &[f64], lambda: f64, s: f64, steps: i64) -> BTreeSet<Vec<usize>> {
    let d = design.d();
    let g = design.gram().clone();
    let h = s / steps as f64;
    let mut certs: Vec<Certificate> = Vec::new();
    let mut index: HashMap<ModelSignPair, usize> = HashMap::new();
    let mut last = usize::MAX;
    let mut beta = Vec::with_capacity(d);
    let mut idx = vec![-steps; d];
    let mut u = vec![0.0; d];
    loop {
        for j in 0..d {
            u[j] = c[j] + h * idx[j] as f64;
        }
        let hit = if last != usize::MAX && certs[last].holds(&g, &u, lambda, &mut beta) {
            Some(last)
        } else {
            (0..certs.len()).find(|&i| certs[i].holds(&g, &u, lambda, &mut beta))
        };
        last = match hit {
            Some(i) => i,
            None => {
                let pair = lasso_solve_stats(design, &u, lambda, None).unwrap().pair;
                *index.entry(pair.clone()).or_insert_with(|| {
                    certs.push(Certificate::new(design, pair));
                    certs.len() - 1
                })
            }
        };
        let mut j = 0;
        loop {
            if j == d {
                return certs.iter().map(|c| c.pair.model.clone()).collect();
            }
            idx[j] += 1;
            if idx[j] <= steps {
                break;
            }
            idx[j] = -steps;
            j += 1;
        }
    }
}
