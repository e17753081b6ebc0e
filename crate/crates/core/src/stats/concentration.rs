//! Concentration widths and confidence intervals for means of [0, 1]-valued
//! samples.

use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use super::interval::Interval;
use super::mc::check_alpha;
use crate::error::{Error, Result};

/// Hoeffding half-width √(log(2/α)/(2n)).
pub fn hoeffding_width(n: usize, alpha: f64) -> Result<f64> {
    check_alpha(alpha, "hoeffding_width")?;
    if n == 0 {
        return Err(Error::domain("hoeffding_width needs n >= 1"));
    }
    Ok(((2.0 / alpha).ln() / (2.0 * n as f64)).sqrt())
}

/// Two-sided Bentkus half-width for the mean of n variables in [0, 1].
///
/// Each side uses the bound P(X̄ ≤ μ − t) ≤ e·P(Bin(n, μ) ≤ ⌈n(μ − t)⌉) at
/// level α/2, maximized over the unknown mean μ; the lower and upper tails are
/// mirror images under x ↦ 1 − x. The maximum over μ is exact: on each piece
/// where the ceiling is constant the binomial CDF decreases in μ, so only the
/// left end of every piece needs checking. The result is capped at the
/// Hoeffding width, so `bentkus_width <= hoeffding_width` always holds.
///
/// The search costs O(n²) per bisection step, so results are memoized per
/// process by (n, α).
pub fn bentkus_width(n: usize, alpha: f64) -> Result<f64> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, u64), f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let key = (n, alpha.to_bits());
    if let Some(&w) = cache.lock().expect("bentkus cache poisoned").get(&key) {
        return Ok(w);
    }
    let w = bentkus_width_uncached(n, alpha)?;
    cache.lock().expect("bentkus cache poisoned").insert(key, w);
    Ok(w)
}

fn bentkus_width_uncached(n: usize, alpha: f64) -> Result<f64> {
    let hoeffding = hoeffding_width(n, alpha)?;
    let level = alpha / 2.0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    if bentkus_tail_sup(n, hi) > level || bentkus_tail_sup(n, lo) <= level {
        return Err(Error::Solver(format!("bentkus_width: bisection not bracketed for n = {n}, alpha = {alpha}")));
    }
    while hi - lo > 1e-8 {
        let mid = 0.5 * (lo + hi);
        if bentkus_tail_sup(n, mid) <= level {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi.min(hoeffding))
}

/// sup over μ of min(1, e·P(Bin(n, μ) ≤ ⌈n(μ − t)⌉)), zero when μ < t.
fn bentkus_tail_sup(n: usize, t: f64) -> f64 {
    let nf = n as f64;
    let mut sup = 0.0f64;
    for k in 1..=n {
        let mu = t + (k as f64 - 1.0) / nf;
        if mu >= 1.0 {
            break;
        }
        let bound = std::f64::consts::E * binomial_cdf(n, k, mu.max(0.0));
        sup = sup.max(bound.min(1.0));
        if sup >= 1.0 {
            break;
        }
    }
    sup
}

/// P(Bin(n, p) ≤ k), summed in log space.
pub(crate) fn binomial_cdf(n: usize, k: usize, p: f64) -> f64 {
    if k >= n || p <= 0.0 {
        return 1.0;
    }
    if p >= 1.0 {
        return 0.0;
    }
    let log_odds = (p / (1.0 - p)).ln();
    let mut log_pmf = n as f64 * (-p).ln_1p();
    let mut terms = Vec::with_capacity(k + 1);
    terms.push(log_pmf);
    for i in 0..k {
        log_pmf += ((n - i) as f64 / (i + 1) as f64).ln() + log_odds;
        terms.push(log_pmf);
    }
    let max = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = terms.iter().map(|t| (t - max).exp()).sum();
    (max + sum.ln()).exp().min(1.0)
}

/// Tuning of the betting confidence interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BettingConfig {
    /// Spacing of the candidate-mean grid on [0, 1].
    pub grid_step: f64,
    /// Bets are capped at `truncation/m` (upper) and `truncation/(1−m)` (lower).
    pub truncation: f64,
    /// Level the bet sizes are tuned for. Fixed independently of the requested
    /// α so that intervals are nested in α.
    pub tuning_alpha: f64,
}

impl Default for BettingConfig {
    fn default() -> Self {
        Self { grid_step: 1e-3, truncation: 0.5, tuning_alpha: 0.01 }
    }
}

/// Betting confidence interval for the mean of samples in [0, 1], with the
/// default [`BettingConfig`].
pub fn betting_ci(samples: &[f64], alpha: f64) -> Result<Interval> {
    betting_ci_with(samples, alpha, &BettingConfig::default())
}

/// Hedged-capital betting interval with predictable plug-in bets.
///
/// A grid value m is kept iff neither half of the hedged capital process
/// ½K⁺_t(m), ½K⁻_t(m) reaches 1/α at any t ≤ n. K⁺ is nonincreasing and K⁻
/// nondecreasing in m (including the truncated regime), so the kept set is a
/// grid interval whose endpoints are found by bisection.
pub fn betting_ci_with(samples: &[f64], alpha: f64, config: &BettingConfig) -> Result<Interval> {
    check_alpha(alpha, "betting_ci")?;
    let n = samples.len();
    if n < 2 {
        return Err(Error::domain("betting_ci needs at least 2 samples"));
    }
    if let Some(bad) = samples.iter().find(|x| !(0.0..=1.0).contains(*x)) {
        return Err(Error::domain(format!("betting_ci: sample {bad} outside [0, 1]")));
    }
    let bets = plugin_bets(samples, config.tuning_alpha);
    let log_threshold = (1.0 / alpha).ln() + std::f64::consts::LN_2;
    let grid_len = (1.0 / config.grid_step).round() as usize;
    let grid = |i: usize| (i as f64 * config.grid_step).min(1.0);
    let c = config.truncation;

    let rejected_upper = |m: f64| -> bool {
        let cap = if m > 0.0 { c / m } else { f64::INFINITY };
        let mut log_k = 0.0;
        for (&x, &lam) in samples.iter().zip(&bets) {
            log_k += (lam.min(cap) * (x - m)).ln_1p();
            if log_k >= log_threshold {
                return true;
            }
        }
        false
    };
    let rejected_lower = |m: f64| -> bool {
        let cap = if m < 1.0 { c / (1.0 - m) } else { f64::INFINITY };
        let mut log_k = 0.0;
        for (&x, &lam) in samples.iter().zip(&bets) {
            log_k += (-lam.min(cap) * (x - m)).ln_1p();
            if log_k >= log_threshold {
                return true;
            }
        }
        false
    };

    // Smallest grid index not rejected by the upper process.
    let lo_idx = if !rejected_upper(grid(0)) {
        Some(0)
    } else if rejected_upper(grid(grid_len)) {
        None
    } else {
        let (mut bad, mut good) = (0usize, grid_len);
        while good - bad > 1 {
            let mid = (bad + good) / 2;
            if rejected_upper(grid(mid)) {
                bad = mid
            } else {
                good = mid
            }
        }
        Some(good)
    };
    // Largest grid index not rejected by the lower process.
    let hi_idx = if !rejected_lower(grid(grid_len)) {
        Some(grid_len)
    } else if rejected_lower(grid(0)) {
        None
    } else {
        let (mut good, mut bad) = (0usize, grid_len);
        while bad - good > 1 {
            let mid = (bad + good) / 2;
            if rejected_lower(grid(mid)) {
                bad = mid
            } else {
                good = mid
            }
        }
        Some(good)
    };
    match (lo_idx, hi_idx) {
        (Some(a), Some(b)) if a <= b => Ok(Interval::new(grid(a), grid(b))),
        // Every grid point rejected: collapse onto the sample mean.
        _ => {
            let mean = samples.iter().sum::<f64>() / n as f64;
            Ok(Interval::new(mean, mean))
        }
    }
}

/// Predictable plug-in bets λ_t = √(2 log(2/α₀) / (n σ̂²_{t−1})) with
/// regularized running mean and variance.
fn plugin_bets(samples: &[f64], tuning_alpha: f64) -> Vec<f64> {
    let n = samples.len() as f64;
    let num = 2.0 * (2.0 / tuning_alpha).ln();
    let mut sum = 0.0;
    let mut sum_sq_dev = 0.0;
    let mut var_prev = 0.25;
    let mut bets = Vec::with_capacity(samples.len());
    for (t, &x) in samples.iter().enumerate() {
        bets.push((num / (n * var_prev)).sqrt());
        sum += x;
        let t1 = (t + 1) as f64;
        let mean_reg = (0.5 + sum) / (t1 + 1.0);
        sum_sq_dev += (x - mean_reg).powi(2);
        var_prev = (0.25 + sum_sq_dev) / (t1 + 1.0);
    }
    bets
}
