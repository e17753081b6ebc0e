//! Conditional inference on the winner under i.i.d. N(μ, σ²I) noise.
//!
//! Given selection of γ̂, y_γ̂ is N(μ_γ̂, σ²) truncated to [a, ∞) with a the
//! runner-up observation. The interval inverts the truncated-normal survival
//! function in μ.

use super::{argmax, check_finite};
use crate::error::{Error, Result};
use crate::stats::normal::log_normal_sf;
use crate::stats::Interval;

const SEARCH_SIGMAS: f64 = 20.0;
const BISECTION_ITERS: usize = 200;

/// log P(Y ≥ x | Y ≥ a) for Y ~ N(μ, σ²).
pub fn log_truncated_sf(x: f64, a: f64, mu: f64, sigma: f64) -> f64 {
    log_normal_sf((x - mu) / sigma) - log_normal_sf((a - mu) / sigma)
}

pub fn conditional_winner_interval(y: &[f64], sigma: f64, alpha: f64) -> Result<Interval> {
    check_finite(y, "conditional_winner_interval")?;
    if y.len() < 2 {
        return Err(Error::domain("conditional inference needs at least two candidates"));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::domain(format!("noise scale {sigma} must be positive")));
    }
    crate::stats::mc::check_alpha(alpha, "conditional_winner_interval")?;
    let w = argmax(y)?;
    let a = y
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != w)
        .map(|(_, &v)| v)
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(truncated_normal_interval(y[w], a, sigma, alpha))
}

/// Equal-tailed interval for μ from one draw x of N(μ, σ²) truncated to [a, ∞).
/// An endpoint that cannot be bracketed in x ± 20σ is reported as infinite.
pub fn truncated_normal_interval(x: f64, a: f64, sigma: f64, alpha: f64) -> Interval {
    let lo = x - SEARCH_SIGMAS * sigma;
    let hi = x + SEARCH_SIGMAS * sigma;
    let f = |mu: f64| log_truncated_sf(x, a, mu, sigma);
    let lower = solve_increasing(f, (alpha / 2.0).ln(), lo, hi).unwrap_or(f64::NEG_INFINITY);
    let upper = solve_increasing(f, (-alpha / 2.0).ln_1p(), lo, hi).unwrap_or(f64::INFINITY);
    Interval::new(lower, upper)
}

/// Root of f(μ) = target for f nondecreasing, or `None` if not bracketed.
fn solve_increasing<F: Fn(f64) -> f64>(f: F, target: f64, mut lo: f64, mut hi: f64) -> Option<f64> {
    let (flo, fhi) = (f(lo), f(hi));
    if !(flo <= target && fhi >= target) {
        return None;
    }
    for _ in 0..BISECTION_ITERS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = f(mid);
        if !v.is_finite() {
            return None;
        }
        if v < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngSpec;
    use crate::stats::normal_quantile;
    use rand_distr::{Distribution, StandardNormal};

    #[test]
    fn no_truncation_is_nominal() {
        let iv = conditional_winner_interval(&[1.3, -1e10], 1.0, 0.1).unwrap();
        let z = normal_quantile(0.95).unwrap();
        assert!((iv.lower - (1.3 - z)).abs() < 1e-6);
        assert!((iv.upper - (1.3 + z)).abs() < 1e-6);
    }

    #[test]
    fn well_separated_approaches_nominal() {
        let iv = conditional_winner_interval(&[10.0, 0.0], 1.0, 0.1).unwrap();
        let z = normal_quantile(0.95).unwrap();
        assert!(((10.0 - iv.lower) - z).abs() < 0.05 * z);
        assert!(((iv.upper - 10.0) - z).abs() < 0.05 * z);
    }

    #[test]
    fn endpoints_solve_truncated_cdf() {
        // Direct ratio of complementary error functions.
        let (x, a, s) = (0.4, 0.1, 1.0);
        let iv = truncated_normal_interval(x, a, s, 0.1);
        let tail = |z: f64| 0.5 * libm::erfc(z / std::f64::consts::SQRT_2);
        let sf = |mu: f64| tail((x - mu) / s) / tail((a - mu) / s);
        assert!((sf(iv.lower) - 0.05).abs() < 1e-8);
        assert!((sf(iv.upper) - 0.95).abs() < 1e-8);
    }

    #[test]
    fn close_race_is_wide() {
        let iv = conditional_winner_interval(&[0.01, 0.0], 1.0, 0.1).unwrap();
        assert!(iv.width() > 2.0 * 1.645 * 2.0);
    }

    #[test]
    fn conditional_coverage_two_candidates() {
        let mut r = RngSpec::new(11, 0).rng();
        let trials = 2000;
        let mut hits = 0;
        for _ in 0..trials {
            let y: Vec<f64> = (0..2).map(|_| StandardNormal.sample(&mut r)).collect();
            let iv = conditional_winner_interval(&y, 1.0, 0.1).unwrap();
            hits += iv.contains(0.0) as usize;
        }
        let cov = hits as f64 / trials as f64;
        let se = (0.9 * 0.1 / trials as f64).sqrt();
        assert!(cov >= 0.9 - 3.0 * se, "{cov}");
    }

    #[test]
    fn rejects_single_candidate() {
        assert!(conditional_winner_interval(&[1.0], 1.0, 0.1).is_err());
    }
}
