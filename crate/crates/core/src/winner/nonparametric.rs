//! Bounded observations in [0, 1] with n i.i.d. samples per candidate.
//!
//! Screening uses a uniform concentration width w at level ν/m; the final
//! intervals are nominal CIs at level (α−ν)/|Γ̂⁺|.

use super::{argmax, IntervalSet, LocalInference, PlausibleSet};
use crate::error::{Error, Result};
use crate::stats::{bentkus_width, betting_ci, hoeffding_width, Interval};
use crate::theory::BudgetSplit;

/// Concentration bound used for the screening margin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    Hoeffding,
    Bentkus,
}

/// Confidence interval used for the final per-candidate inference.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CiKind {
    Hoeffding,
    Betting,
}

impl BoundKind {
    /// Half-width w with P(|ȳ − μ| > w) ≤ delta for one mean of n samples.
    pub fn width(self, n: usize, delta: f64) -> Result<f64> {
        match self {
            BoundKind::Hoeffding => hoeffding_width(n, delta),
            BoundKind::Bentkus => bentkus_width(n, delta),
        }
    }
}

impl CiKind {
    pub fn interval(self, samples: &[f64], alpha: f64) -> Result<Interval> {
        match self {
            CiKind::Hoeffding => {
                let mean = samples.iter().sum::<f64>() / samples.len() as f64;
                Ok(Interval::symmetric(mean, hoeffding_width(samples.len(), alpha)?))
            }
            CiKind::Betting => betting_ci(samples, alpha),
        }
    }
}

/// n × m samples stored column by column.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    n: usize,
    columns: Vec<Vec<f64>>,
}

impl SampleMatrix {
    /// One inner vector per candidate.
    pub fn from_columns(columns: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = columns.first() else {
            return Err(Error::domain("sample matrix needs at least one candidate"));
        };
        let n = first.len();
        if n < 2 {
            return Err(Error::domain(format!("sample matrix needs n >= 2 samples, got {n}")));
        }
        for (j, col) in columns.iter().enumerate() {
            if col.len() != n {
                return Err(Error::domain(format!("column {j} has {} samples, expected {n}", col.len())));
            }
            if let Some(v) = col.iter().find(|v| !(0.0..=1.0).contains(*v)) {
                return Err(Error::domain(format!("entry {v} in column {j} is outside [0, 1]")));
            }
        }
        Ok(Self { n, columns })
    }

    /// Row-major input: `rows[t][j]` is sample t of candidate j.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let m = rows.first().map_or(0, Vec::len);
        if let Some(r) = rows.iter().position(|r| r.len() != m) {
            return Err(Error::domain(format!("row {r} has {} entries, expected {m}", rows[r].len())));
        }
        let columns = (0..m).map(|j| rows.iter().map(|r| r[j]).collect()).collect();
        Self::from_columns(columns)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &[f64] {
        &self.columns[j]
    }

    pub fn means(&self) -> Vec<f64> {
        self.columns.iter().map(|c| c.iter().sum::<f64>() / self.n as f64).collect()
    }
}

/// Screening margin unit w_n^{ν/m}.
pub fn screening_width(n: usize, m: usize, nu: f64, bound: BoundKind) -> Result<f64> {
    bound.width(n, nu / m as f64)
}

pub fn np_winner_interval(
    samples: &SampleMatrix,
    budget: BudgetSplit,
    bound: BoundKind,
    ci: CiKind,
) -> Result<LocalInference> {
    let means = samples.means();
    let w = screening_width(samples.n(), samples.m(), budget.nu(), bound)?;
    let winner = argmax(&means)?;
    let cut = means[winner] - 4.0 * w;
    let indices = (0..means.len()).filter(|&i| means[i] >= cut).collect();
    let plausible = PlausibleSet { indices, nu_used: budget.nu(), margin: 4.0 * w };
    let level = budget.inference_level() / plausible.len() as f64;
    let interval = ci.interval(samples.column(winner), level)?;
    Ok(LocalInference {
        selection: vec![winner],
        plausible,
        intervals: IntervalSet { entries: vec![(winner, interval)], alpha: budget.alpha() },
    })
}

pub fn np_filedrawer_region(
    samples: &SampleMatrix,
    threshold: f64,
    budget: BudgetSplit,
    bound: BoundKind,
    ci: CiKind,
) -> Result<LocalInference> {
    if threshold.is_nan() {
        return Err(Error::domain("threshold is NaN"));
    }
    let means = samples.means();
    let w = screening_width(samples.n(), samples.m(), budget.nu(), bound)?;
    let indices = (0..means.len()).filter(|&i| means[i] >= threshold - 2.0 * w).collect();
    let plausible = PlausibleSet { indices, nu_used: budget.nu(), margin: 2.0 * w };
    let selection: Vec<usize> = (0..means.len()).filter(|&i| means[i] >= threshold).collect();
    if selection.is_empty() {
        return Ok(LocalInference { selection, plausible, intervals: IntervalSet::empty(budget.alpha()) });
    }
    let level = budget.inference_level() / plausible.len() as f64;
    let entries = selection
        .iter()
        .map(|&i| ci.interval(samples.column(i), level).map(|iv| (i, iv)))
        .collect::<Result<Vec<_>>>()?;
    Ok(LocalInference { selection, plausible, intervals: IntervalSet { entries, alpha: budget.alpha() } })
}

/// Bonferroni over all m candidates at level α.
pub fn np_simultaneous(samples: &SampleMatrix, selection: &[usize], alpha: f64, ci: CiKind) -> Result<IntervalSet> {
    let level = alpha / samples.m() as f64;
    let entries = selection
        .iter()
        .map(|&i| ci.interval(samples.column(i), level).map(|iv| (i, iv)))
        .collect::<Result<Vec<_>>>()?;
    Ok(IntervalSet { entries, alpha })
}

/// Unadjusted CIs at level α.
pub fn np_nominal(samples: &SampleMatrix, selection: &[usize], alpha: f64, ci: CiKind) -> Result<IntervalSet> {
    let entries = selection
        .iter()
        .map(|&i| ci.interval(samples.column(i), alpha).map(|iv| (i, iv)))
        .collect::<Result<Vec<_>>>()?;
    Ok(IntervalSet { entries, alpha })
}
