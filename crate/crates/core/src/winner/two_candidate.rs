//! Two candidates with i.i.d. N(0, σ²) noise, screened on the difference.

use super::{argmax, check_finite, IntervalSet, LocalInference, PlausibleSet};
use crate::error::{Error, Result};
use crate::stats::{max_abs_quantile_iid, nominal_quantile, Interval};
use crate::theory::BudgetSplit;

/// |y₂ − y₁| above which the runner-up is screened out: 2√2·σ·q^ν(1).
pub fn switching_threshold(nu: f64, sigma: f64) -> Result<f64> {
    Ok(2.0 * std::f64::consts::SQRT_2 * sigma * nominal_quantile(nu)?)
}

pub fn two_candidate_interval(y: [f64; 2], budget: BudgetSplit, sigma: f64) -> Result<LocalInference> {
    check_finite(&y, "two_candidate_interval")?;
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::domain(format!("noise scale {sigma} must be positive")));
    }
    let threshold = switching_threshold(budget.nu(), sigma)?;
    let winner = argmax(&y)?;
    let indices = if (y[1] - y[0]).abs() <= threshold { vec![0, 1] } else { vec![winner] };
    let q = max_abs_quantile_iid(indices.len(), budget.inference_level(), 1.0)?;
    let plausible = PlausibleSet { indices, nu_used: budget.nu(), margin: threshold };
    Ok(LocalInference {
        selection: vec![winner],
        plausible,
        intervals: IntervalSet {
            entries: vec![(winner, Interval::symmetric(y[winner], sigma * q))],
            alpha: budget.alpha(),
        },
    })
}
