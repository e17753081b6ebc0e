//! Localized generalization bounds for empirical risk minimization over a
//! finite hypothesis class.
//!
//! The complexity term is the symmetrized gap Gap_n(F) = 2·E sup_f |(1/n)Σσ_i ℓ(f, z_i)|,
//! estimated by Monte Carlo over Rademacher signs. The localized bound only
//! pays for the hypotheses whose empirical risk is close to the minimum.

use std::io::Read;
use std::path::Path;

use nalgebra::DMatrix;
use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::RngSpec;
use crate::theory::BudgetSplit;

/// Losses ℓ(f, z_i) with samples as rows and hypotheses as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct LossMatrix {
    losses: DMatrix<f64>,
    labels: Vec<String>,
}

impl LossMatrix {
    pub fn new(losses: DMatrix<f64>, labels: Vec<String>) -> Result<Self> {
        if losses.nrows() == 0 || losses.ncols() == 0 {
            return Err(Error::domain("loss matrix must have at least one sample and one hypothesis"));
        }
        if labels.len() != losses.ncols() {
            return Err(Error::domain(format!("{} labels for {} hypotheses", labels.len(), losses.ncols())));
        }
        if let Some(v) = losses.iter().find(|v| !(-1.0..=1.0).contains(*v)) {
            return Err(Error::domain(format!("loss {v} outside [-1, 1]")));
        }
        Ok(Self { losses, labels })
    }

    /// Hypotheses labelled `f0`, `f1`, ….
    pub fn unlabeled(losses: DMatrix<f64>) -> Result<Self> {
        let labels = (0..losses.ncols()).map(|j| format!("f{j}")).collect();
        Self::new(losses, labels)
    }

    /// CSV with a header row of hypothesis labels and one row per sample.
    pub fn from_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
        let labels: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
        let mut values = Vec::new();
        let mut n = 0;
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            for field in rec.iter() {
                let v: f64 = field
                    .parse()
                    .map_err(|_| Error::domain(format!("row {}: cannot parse loss {field:?}", i + 2)))?;
                values.push(v);
            }
            n += 1;
        }
        let k = labels.len();
        Self::new(DMatrix::from_row_slice(n, k, &values), labels)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_csv(std::fs::File::open(path)?)
    }

    pub fn n(&self) -> usize {
        self.losses.nrows()
    }

    pub fn n_hypotheses(&self) -> usize {
        self.losses.ncols()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn losses(&self) -> &DMatrix<f64> {
        &self.losses
    }

    /// R_n(f) for every hypothesis.
    pub fn empirical_risks(&self) -> Vec<f64> {
        let n = self.n() as f64;
        self.losses.column_iter().map(|c| c.sum() / n).collect()
    }
}

/// Rademacher draws of |(1/n)Σσ_i ℓ(f, z_i)| for every hypothesis, stored
/// draw-major so that sup over any subset reuses the same signs.
#[derive(Debug, Clone)]
pub struct RademacherDraws {
    values: DMatrix<f64>,
}

const SIGN_CHUNK: usize = 256;

impl RademacherDraws {
    pub fn new(losses: &LossMatrix, rng: RngSpec, n_draws: usize) -> Result<Self> {
        if n_draws < 2 {
            return Err(Error::domain("at least two Rademacher draws are needed"));
        }
        let n = losses.n();
        let mut r = rng.rng();
        let mut values = DMatrix::zeros(n_draws, losses.n_hypotheses());
        let mut done = 0;
        while done < n_draws {
            let b = SIGN_CHUNK.min(n_draws - done);
            let signs = DMatrix::from_fn(b, n, |_, _| if r.random::<bool>() { 1.0 } else { -1.0 });
            let block = signs * losses.losses();
            values.rows_mut(done, b).copy_from(&block.map(|v: f64| v.abs() / n as f64));
            done += b;
        }
        Ok(Self { values })
    }

    /// 2·(mean + 3·SE) of sup over `subset`; an upper estimate of Gap_n.
    pub fn gap(&self, subset: &[usize]) -> Result<f64> {
        if subset.is_empty() {
            return Err(Error::domain("Rademacher complexity of an empty class"));
        }
        if let Some(&bad) = subset.iter().find(|&&j| j >= self.values.ncols()) {
            return Err(Error::domain(format!("hypothesis {bad} out of range")));
        }
        let sups: Vec<f64> = self
            .values
            .row_iter()
            .map(|row| subset.iter().map(|&j| row[j]).fold(0.0, f64::max))
            .collect();
        let n = sups.len() as f64;
        let mean = sups.iter().sum::<f64>() / n;
        let var = sups.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0);
        Ok(2.0 * (mean + 3.0 * (var / n).sqrt()))
    }
}

/// Monte-Carlo upper estimate of Gap_n over the hypotheses in `subset`.
pub fn rademacher_mc(losses: &LossMatrix, subset: &[usize], rng: RngSpec, n_draws: usize) -> Result<f64> {
    RademacherDraws::new(losses, rng, n_draws)?.gap(subset)
}

/// Slack 4·Gap + 4√((2/n) log(1/ν)) above the minimal empirical risk.
pub fn plausible_slack(n: usize, gap_full: f64, nu: f64) -> f64 {
    4.0 * gap_full + 4.0 * (2.0 / n as f64 * (1.0 / nu).ln()).sqrt()
}

/// {f : R_n(f) ≤ min R_n + 4·Gap_n(F) + 4√((2/n) log(1/ν))}.
pub fn plausible_hypotheses(losses: &LossMatrix, gap_full: f64, nu: f64) -> Result<Vec<usize>> {
    if !(gap_full >= 0.0) {
        return Err(Error::domain(format!("gap {gap_full} must be nonnegative")));
    }
    if !(nu > 0.0 && nu < 1.0) {
        return Err(Error::domain(format!("nu = {nu} not in (0, 1)")));
    }
    let risks = losses.empirical_risks();
    let min = risks.iter().copied().fold(f64::INFINITY, f64::min);
    let cut = min + plausible_slack(losses.n(), gap_full, nu);
    Ok((0..risks.len()).filter(|&j| risks[j] == min || risks[j] <= cut).collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalizedBound {
    /// Lowest-index empirical risk minimizer.
    pub erm_index: usize,
    pub erm_risk: f64,
    pub gap_full: f64,
    pub gap_local: f64,
    pub plausible_count: usize,
    /// Upper confidence bound on the population risk of the minimizer.
    pub bound: f64,
    /// The same bound with the full-class gap at level α.
    pub bound_full: f64,
    pub alpha: f64,
    pub nu: f64,
}

/// R_n(f̂) + Gap_n(F̂⁺) + √((2/n) log(1/(α−ν))), with both gaps computed on
/// shared Rademacher draws.
pub fn erm_risk_bound(losses: &LossMatrix, budget: BudgetSplit, rng: RngSpec, n_draws: usize) -> Result<LocalizedBound> {
    let draws = RademacherDraws::new(losses, rng, n_draws)?;
    let all: Vec<usize> = (0..losses.n_hypotheses()).collect();
    let gap_full = draws.gap(&all)?;
    let plausible = plausible_hypotheses(losses, gap_full, budget.nu())?;
    let gap_local = draws.gap(&plausible)?;
    let risks = losses.empirical_risks();
    let erm_index = (0..risks.len()).fold(0, |b, j| if risks[j] < risks[b] { j } else { b });
    let erm_risk = risks[erm_index];
    let n = losses.n() as f64;
    let deviation = |level: f64| (2.0 / n * (1.0 / level).ln()).sqrt();
    Ok(LocalizedBound {
        erm_index,
        erm_risk,
        gap_full,
        gap_local,
        plausible_count: plausible.len(),
        bound: erm_risk + gap_local + deviation(budget.inference_level()),
        bound_full: erm_risk + gap_full + deviation(budget.alpha()),
        alpha: budget.alpha(),
        nu: budget.nu(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::{Bernoulli, Distribution};

    fn bernoulli_losses(n: usize, means: &[f64], rng: RngSpec) -> LossMatrix {
        let mut r = rng.rng();
        let dists: Vec<Bernoulli> = means.iter().map(|&p| Bernoulli::new(p).unwrap()).collect();
        let m = DMatrix::from_fn(n, means.len(), |_, j| if dists[j].sample(&mut r) { 1.0 } else { 0.0 });
        LossMatrix::unlabeled(m).unwrap()
    }

    #[test]
    fn zero_losses_have_zero_gap() {
        let l = LossMatrix::unlabeled(DMatrix::zeros(10, 3)).unwrap();
        assert_eq!(rademacher_mc(&l, &[0, 1, 2], RngSpec::new(1, 0), 100).unwrap(), 0.0);
    }

    #[test]
    fn constant_loss_matches_binomial_mean_absolute_value() {
        // E|Σσ_i| for n = 16 by enumerating the binomial distribution.
        let n = 16usize;
        let c = 0.7;
        let mut binom = vec![1.0f64];
        for _ in 0..n {
            let mut next = vec![0.0; binom.len() + 1];
            for (k, &p) in binom.iter().enumerate() {
                next[k] += 0.5 * p;
                next[k + 1] += 0.5 * p;
            }
            binom = next;
        }
        let mean_abs: f64 = binom.iter().enumerate().map(|(k, p)| p * (2.0 * k as f64 - n as f64).abs()).sum();
        let exact = 2.0 * c * mean_abs / n as f64;
        let l = LossMatrix::unlabeled(DMatrix::from_element(n, 1, c)).unwrap();
        let draws = RademacherDraws::new(&l, RngSpec::new(2, 0), 100_000).unwrap();
        let est = draws.gap(&[0]).unwrap();
        // The estimate carries a +6·SE margin on the doubled scale.
        assert!(est >= exact && est - exact < 0.02, "{est} vs {exact}");
    }

    #[test]
    fn duplicate_columns_do_not_change_the_gap() {
        let base = bernoulli_losses(50, &[0.3, 0.6], RngSpec::new(3, 0));
        let dup = DMatrix::from_fn(50, 3, |i, j| base.losses()[(i, j.min(1))]);
        let dup = LossMatrix::unlabeled(dup).unwrap();
        let a = rademacher_mc(&base, &[0, 1], RngSpec::new(4, 0), 5000).unwrap();
        let b = rademacher_mc(&dup, &[0, 1, 2], RngSpec::new(4, 0), 5000).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn slack_formula() {
        assert!((plausible_slack(400, 0.05, 0.01) - 0.806971).abs() < 1e-6);
    }

    #[test]
    fn plausible_set_extremes() {
        let l = bernoulli_losses(40, &[0.1, 0.5, 0.9], RngSpec::new(5, 0));
        assert_eq!(plausible_hypotheses(&l, 10.0, 0.01).unwrap(), vec![0, 1, 2]);
        let one = bernoulli_losses(40, &[0.4], RngSpec::new(6, 0));
        assert_eq!(plausible_hypotheses(&one, 0.0, 0.5).unwrap(), vec![0]);
        assert!(plausible_hypotheses(&l, -1.0, 0.01).is_err());
    }

    #[test]
    fn dominant_hypothesis_localizes() {
        let mut means = vec![0.95; 30];
        means[7] = 0.02;
        let l = bernoulli_losses(4000, &means, RngSpec::new(7, 0));
        let b = erm_risk_bound(&l, BudgetSplit::new(0.1, 0.01).unwrap(), RngSpec::new(8, 0), 2000).unwrap();
        assert_eq!(b.erm_index, 7);
        assert_eq!(b.plausible_count, 1);
        assert!(b.gap_local < b.gap_full);
    }

    #[test]
    fn csv_round_trip() {
        let text = "a,b\n0.5,1\n-0.25,0\n";
        let l = LossMatrix::from_csv(text.as_bytes()).unwrap();
        assert_eq!(l.labels(), &["a".to_string(), "b".to_string()]);
        assert_eq!(l.empirical_risks(), vec![0.125, 0.5]);
        assert!(LossMatrix::from_csv("a\n2\n".as_bytes()).is_err());
        assert!(LossMatrix::from_csv("a,b\n1\n".as_bytes()).is_err());
    }
}
