//! Gaussian observations y = μ + Z, Z ~ N(0, Σ) with Σ known.
//!
//! Screening uses the ℓ∞ acceptance region {y : |y_i − μ_i| ≤ q^ν([m])·σ_i},
//! which collapses to a margin of 4q^ν (winner) or 2q^ν (file drawer) around
//! the observed data. The final correction is q^{α−ν} over the plausible
//! set, computed on the covariance sub-block of that set.

use super::{argmax, check_finite, IntervalSet, LocalInference, PlausibleSet};
use crate::error::{Error, Result};
use crate::rng::RngSpec;
use crate::stats::{GaussianNoise, Interval, MaxStatSampler};
use crate::theory::BudgetSplit;

/// Inference on μ_γ̂ for γ̂ = argmax y.
#[derive(Debug, Clone)]
pub struct WinnerProblem {
    pub y: Vec<f64>,
    pub noise: GaussianNoise,
    pub budget: BudgetSplit,
}

impl WinnerProblem {
    pub fn new(y: Vec<f64>, noise: GaussianNoise, budget: BudgetSplit) -> Result<Self> {
        check_finite(&y, "winner problem")?;
        if noise.dim() != y.len() {
            return Err(Error::domain(format!("noise dimension {} != observations {}", noise.dim(), y.len())));
        }
        Ok(Self { y, noise, budget })
    }
}

/// Simultaneous inference on {μ_γ : y_γ ≥ T}.
#[derive(Debug, Clone)]
pub struct FileDrawerProblem {
    pub y: Vec<f64>,
    pub threshold: f64,
    pub noise: GaussianNoise,
    pub budget: BudgetSplit,
}

impl FileDrawerProblem {
    pub fn new(y: Vec<f64>, threshold: f64, noise: GaussianNoise, budget: BudgetSplit) -> Result<Self> {
        check_finite(&y, "file-drawer problem")?;
        if noise.dim() != y.len() {
            return Err(Error::domain(format!("noise dimension {} != observations {}", noise.dim(), y.len())));
        }
        if threshold.is_nan() {
            return Err(Error::domain("threshold is NaN"));
        }
        Ok(Self { y, threshold, noise, budget })
    }

    pub fn selection(&self) -> Vec<usize> {
        (0..self.y.len()).filter(|&i| self.y[i] >= self.threshold).collect()
    }
}

/// {γ : y_γ ≥ max y − 4·q_nu}, with `q_nu` in outcome units.
pub fn plausible_winner_set(y: &[f64], q_nu: f64) -> Result<PlausibleSet> {
    check_finite(y, "plausible_winner_set")?;
    let ones = vec![1.0; y.len()];
    plausible_winner_set_scaled(y, &ones, q_nu, f64::NAN)
}

/// Winner screening with per-coordinate scales: γ is plausible iff
/// y_γ + 2qσ_γ ≥ max_k (y_k − 2qσ_k). Reduces to the 4q margin for equal σ.
pub fn plausible_winner_set_scaled(y: &[f64], scales: &[f64], q: f64, nu: f64) -> Result<PlausibleSet> {
    if !(q >= 0.0) {
        return Err(Error::domain(format!("screening quantile {q} must be nonnegative")));
    }
    let top = y
        .iter()
        .zip(scales)
        .map(|(v, s)| v - 2.0 * q * s)
        .fold(f64::NEG_INFINITY, f64::max);
    let winner = argmax(y)?;
    let indices: Vec<usize> = (0..y.len())
        .filter(|&i| i == winner || y[i] == y[winner] || y[i] + 2.0 * q * scales[i] >= top)
        .collect();
    Ok(PlausibleSet { indices, nu_used: nu, margin: 4.0 * q })
}

/// {γ : y_γ ≥ T − 2·q_nu}.
pub fn plausible_filedrawer_set(y: &[f64], threshold: f64, q_nu: f64) -> Result<PlausibleSet> {
    let ones = vec![1.0; y.len()];
    plausible_filedrawer_set_scaled(y, &ones, threshold, q_nu, f64::NAN)
}

pub fn plausible_filedrawer_set_scaled(
    y: &[f64],
    scales: &[f64],
    threshold: f64,
    q: f64,
    nu: f64,
) -> Result<PlausibleSet> {
    if !(q >= 0.0) {
        return Err(Error::domain(format!("screening quantile {q} must be nonnegative")));
    }
    let indices = (0..y.len())
        .filter(|&i| y[i] >= threshold || y[i] + 2.0 * q * scales[i] >= threshold)
        .collect();
    Ok(PlausibleSet { indices, nu_used: nu, margin: 2.0 * q })
}

/// Locally simultaneous interval for the winner.
pub fn winner_interval(problem: &WinnerProblem, rng: RngSpec, n_draws: usize) -> Result<LocalInference> {
    let sampler = MaxStatSampler::new(&problem.noise, rng, n_draws)?;
    winner_interval_with(problem, &sampler)
}

/// As [`winner_interval`], reusing a pre-built quantile bank for `problem.noise`.
pub fn winner_interval_with(problem: &WinnerProblem, sampler: &MaxStatSampler) -> Result<LocalInference> {
    local_winner(&problem.y, problem.noise.scales(), problem.budget, sampler)
}

/// Winner inference from observations, marginal scales σ_i and a quantile
/// source for the standardized noise.
pub fn local_winner(y: &[f64], scales: &[f64], budget: BudgetSplit, sampler: &MaxStatSampler) -> Result<LocalInference> {
    check_dims(y, scales, sampler)?;
    let q_nu = sampler.quantile_all(budget.nu())?.value;
    let plausible = plausible_winner_set_scaled(y, scales, q_nu, budget.nu())?;
    let winner = argmax(y)?;
    let q = sampler.quantile(&plausible.indices, budget.inference_level())?.value;
    let interval = Interval::symmetric(y[winner], q * scales[winner]);
    Ok(LocalInference {
        selection: vec![winner],
        plausible,
        intervals: IntervalSet { entries: vec![(winner, interval)], alpha: budget.alpha() },
    })
}

/// Locally simultaneous region for every index above the threshold.
pub fn filedrawer_region(problem: &FileDrawerProblem, rng: RngSpec, n_draws: usize) -> Result<LocalInference> {
    let sampler = MaxStatSampler::new(&problem.noise, rng, n_draws)?;
    filedrawer_region_with(problem, &sampler)
}

pub fn filedrawer_region_with(problem: &FileDrawerProblem, sampler: &MaxStatSampler) -> Result<LocalInference> {
    local_filedrawer(&problem.y, problem.noise.scales(), problem.threshold, problem.budget, sampler)
}

/// File-drawer inference from observations, scales and a quantile source.
pub fn local_filedrawer(
    y: &[f64],
    scales: &[f64],
    threshold: f64,
    budget: BudgetSplit,
    sampler: &MaxStatSampler,
) -> Result<LocalInference> {
    check_dims(y, scales, sampler)?;
    let q_nu = sampler.quantile_all(budget.nu())?.value;
    let plausible = plausible_filedrawer_set_scaled(y, scales, threshold, q_nu, budget.nu())?;
    let selection: Vec<usize> = (0..y.len()).filter(|&i| y[i] >= threshold).collect();
    if selection.is_empty() {
        return Ok(LocalInference { selection, plausible, intervals: IntervalSet::empty(budget.alpha()) });
    }
    let q = sampler.quantile(&plausible.indices, budget.inference_level())?.value;
    let entries = selection.iter().map(|&i| (i, Interval::symmetric(y[i], q * scales[i]))).collect();
    Ok(LocalInference { selection, plausible, intervals: IntervalSet { entries, alpha: budget.alpha() } })
}

fn check_dims(y: &[f64], scales: &[f64], sampler: &MaxStatSampler) -> Result<()> {
    check_finite(y, "parametric inference")?;
    if scales.len() != y.len() || sampler.dim() != y.len() {
        return Err(Error::domain(format!(
            "dimension mismatch: {} observations, {} scales, sampler of dimension {}",
            y.len(),
            scales.len(),
            sampler.dim()
        )));
    }
    Ok(())
}

/// Fully simultaneous baseline: correction over all m coordinates at level α.
pub fn simultaneous_intervals(
    y: &[f64],
    selection: &[usize],
    scales: &[f64],
    sampler: &MaxStatSampler,
    alpha: f64,
) -> Result<IntervalSet> {
    if selection.is_empty() {
        return Ok(IntervalSet::empty(alpha));
    }
    let q = sampler.quantile_all(alpha)?.value;
    let entries = selection.iter().map(|&i| (i, Interval::symmetric(y[i], q * scales[i]))).collect();
    Ok(IntervalSet { entries, alpha })
}

/// Unadjusted y_γ ± Φ⁻¹(1−α/2)σ_γ for each selected index.
pub fn nominal_intervals(y: &[f64], selection: &[usize], scales: &[f64], alpha: f64) -> Result<IntervalSet> {
    let z = crate::stats::nominal_quantile(alpha)?;
    let entries = selection.iter().map(|&i| (i, Interval::symmetric(y[i], z * scales[i]))).collect();
    Ok(IntervalSet { entries, alpha })
}
