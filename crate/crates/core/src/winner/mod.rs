//! Inference on the winner and the file-drawer problem.
//!
//! Gaussian observations with known covariance ([`parametric`]), bounded
//! samples ([`nonparametric`]), the closed-form two-candidate case
//! ([`two_candidate`]) and the truncated-Gaussian conditional baseline
//! ([`conditional`]).

pub mod conditional;
pub mod nonparametric;
pub mod parametric;
pub mod two_candidate;

use serde::Serialize;

use crate::error::{Error, Result};
pub use crate::stats::IntervalSet;

pub use conditional::conditional_winner_interval;
pub use nonparametric::{np_filedrawer_region, np_winner_interval, BoundKind, CiKind, SampleMatrix};
pub use parametric::{
    filedrawer_region, filedrawer_region_with, local_filedrawer, local_winner, plausible_filedrawer_set,
    plausible_filedrawer_set_scaled, plausible_winner_set, plausible_winner_set_scaled, winner_interval,
    winner_interval_with, FileDrawerProblem, WinnerProblem,
};
pub use two_candidate::two_candidate_interval;

/// Indices that survive screening.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlausibleSet {
    /// Sorted ascending.
    pub indices: Vec<usize>,
    pub nu_used: f64,
    /// Additive slack applied to form the set.
    pub margin: f64,
}

impl PlausibleSet {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }
}

/// Intervals together with the plausible set that produced them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalInference {
    pub selection: Vec<usize>,
    pub plausible: PlausibleSet,
    pub intervals: IntervalSet,
}

/// Lowest index attaining the maximum.
pub fn argmax(y: &[f64]) -> Result<usize> {
    if y.is_empty() {
        return Err(Error::domain("argmax of an empty vector"));
    }
    let mut best = 0;
    for (i, &v) in y.iter().enumerate().skip(1) {
        if v > y[best] {
            best = i;
        }
    }
    Ok(best)
}

pub(crate) fn check_finite(y: &[f64], what: &str) -> Result<()> {
    if y.is_empty() {
        return Err(Error::domain(format!("{what}: empty observation vector")));
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::domain(format!("{what}: observations must be finite")));
    }
    Ok(())
}
