//! Smooth mean profiles μ_i ∝ −|i − (m+1)/2|^θ.

use crate::error::{Error, Result};

/// Number of candidates at which the reference scale is fixed.
pub const REFERENCE_M: usize = 10;

fn raw_profile(m: usize, theta: f64) -> Vec<f64> {
    let center = 0.5 * (m as f64 + 1.0);
    (1..=m).map(|i| -(i as f64 - center).abs().powf(theta)).collect()
}

fn check(m: usize, theta: f64, c: f64) -> Result<()> {
    // Two symmetric candidates give a flat profile with no range to rescale.
    if m < 3 {
        return Err(Error::domain(format!("profile needs m >= 3, got {m}")));
    }
    if !(theta > 0.0 && theta.is_finite() && c > 0.0 && c.is_finite()) {
        return Err(Error::domain(format!("profile needs theta > 0 and C > 0, got {theta}, {c}")));
    }
    Ok(())
}

fn rescale(raw: &[f64], scale: f64) -> Vec<f64> {
    let top = raw.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    raw.iter().map(|v| scale * (v - top)).collect()
}

fn range(v: &[f64]) -> f64 {
    let hi = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = v.iter().copied().fold(f64::INFINITY, f64::min);
    hi - lo
}

/// Profile with maximum 0 and range exactly `c`.
pub fn generate_mu(m: usize, theta: f64, c: f64) -> Result<Vec<f64>> {
    check(m, theta, c)?;
    let raw = raw_profile(m, theta);
    let mut mu = rescale(&raw, c / range(&raw));
    // Pin the minimum so the range is exact in floating point.
    let lo = mu.iter().copied().fold(f64::INFINITY, f64::min);
    for v in mu.iter_mut() {
        if *v == lo {
            *v = -c;
        }
    }
    Ok(mu)
}

/// Profile whose scale makes the range `c` at m = [`REFERENCE_M`]; larger m
/// keep that scale, so the extra candidates sit further below the maximum.
/// For m ≤ `REFERENCE_M` this is [`generate_mu`].
pub fn generate_mu_reference(m: usize, theta: f64, c: f64) -> Result<Vec<f64>> {
    if m <= REFERENCE_M {
        return generate_mu(m, theta, c);
    }
    check(m, theta, c)?;
    let scale = c / range(&raw_profile(REFERENCE_M, theta));
    Ok(rescale(&raw_profile(m, theta), scale))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_point_example() {
        assert_eq!(generate_mu(3, 1.0, 2.0).unwrap(), vec![-2.0, 0.0, -2.0]);
    }

    #[test]
    fn range_is_exact() {
        for &(m, theta, c) in &[(3, 0.5, 1.0), (4, 0.5, 1.0), (10, 4.0, 70.0), (57, 1.3, 0.1), (1000, 2.0, 30.0), (11, 0.5, 3.3)] {
            let mu = generate_mu(m, theta, c).unwrap();
            assert!((range(&mu) - c).abs() <= 1e-12, "{m} {theta} {c}");
            assert_eq!(mu.iter().copied().fold(f64::NEG_INFINITY, f64::max), 0.0);
        }
    }

    #[test]
    fn brute_force_theta_two() {
        // (i − 5.5)² spans 0.25 ..= 20.25, so the scale is 10/20.
        let mu = generate_mu(10, 2.0, 10.0).unwrap();
        for (k, v) in mu.iter().enumerate() {
            let i = (k + 1) as f64;
            let expected = -0.5 * ((i - 5.5).powi(2) - 0.25);
            assert!((v - expected).abs() < 1e-12, "{k}: {v} vs {expected}");
        }
    }

    #[test]
    fn reference_scale_is_kept() {
        let small = generate_mu_reference(10, 2.0, 10.0).unwrap();
        assert_eq!(small, generate_mu(10, 2.0, 10.0).unwrap());
        let big = generate_mu_reference(100, 2.0, 10.0).unwrap();
        // Same scale 1/2: the top two entries sit at 0 and the next pair at −1.
        assert_eq!(big[49], 0.0);
        assert_eq!(big[50], 0.0);
        assert!((big[48] + 1.0).abs() < 1e-12);
        assert!(range(&big) > 1000.0);
        assert!(generate_mu_reference(1, 1.0, 1.0).is_err());
        assert!(generate_mu(2, 1.0, 1.0).is_err());
        assert!(generate_mu(5, 0.0, 1.0).is_err());
    }
}
