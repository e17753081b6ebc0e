//! Standard normal distribution: density, tails and inverse CDF.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x - LN_SQRT_2PI).exp()
}

/// Φ(x).
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

/// 1 − Φ(x), accurate in the upper tail.
pub fn normal_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x * FRAC_1_SQRT_2)
}

/// ln(1 − Φ(x)), finite for every finite `x`.
///
/// `erfc` underflows near x ≈ 38, so past x = 25 the Laplace continued
/// fraction for the Mills ratio takes over.
pub fn log_normal_sf(x: f64) -> f64 {
    if x < 25.0 {
        return normal_sf(x).ln();
    }
    // Mills ratio R(x) = sf(x)/pdf(x) via a truncated continued fraction.
    let mut frac = x;
    for k in (1..=40).rev() {
        frac = x + k as f64 / frac;
    }
    -0.5 * x * x - LN_SQRT_2PI - frac.ln()
}

/// ln Φ(x).
pub fn log_normal_cdf(x: f64) -> f64 {
    log_normal_sf(-x)
}

/// Φ⁻¹(p) for p in (0, 1).
///
/// Acklam's rational approximation (relative error ~1e-9) followed by one
/// Newton step against the erfc-based CDF.
pub fn normal_quantile(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!("normal_quantile: p = {p} not in (0, 1)")));
    }
    if p == 0.5 {
        return Ok(0.0);
    }
    let x = acklam(p);
    // Newton on whichever tail keeps relative precision.
    let step = if p < 0.5 {
        (normal_cdf(x) - p) / normal_pdf(x)
    } else {
        -(normal_sf(x) - (1.0 - p)) / normal_pdf(x)
    };
    Ok(x - step)
}

/// Φ⁻¹(1 − q) computed from the upper-tail probability `q` directly.
pub fn normal_upper_quantile(q: f64) -> Result<f64> {
    Ok(-normal_quantile(q)?)
}

fn acklam(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.024_25;

    if p < P_LOW {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else if p <= 1.0 - P_LOW {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    } else {
        let q = (-2.0 * (1.0 - p).ln()).sqrt();
        -(((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    /// Φ by its Taylor series, summed with enough terms for |x| ≤ 8.
    fn cdf_series(x: f64) -> f64 {
        let mut term = x;
        let mut sum = x;
        let mut k = 0.0;
        while term.abs() > 1e-18 * sum.abs().max(1e-300) {
            k += 1.0;
            term *= -x * x / (2.0 * k);
            sum += term / (2.0 * k + 1.0);
            if k > 400.0 {
                break;
            }
        }
        0.5 + sum / (2.0 * PI).sqrt()
    }

    /// Inverse CDF by bisection on the series evaluation.
    fn quantile_oracle(p: f64) -> f64 {
        let (mut lo, mut hi) = (-8.0, 8.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if cdf_series(mid) < p {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn oracle_values() {
        assert_eq!(normal_quantile(0.5).unwrap(), 0.0);
        assert!((quantile_oracle(0.95) - 1.644_853_626_951_472_2).abs() < 1e-12);
        assert!((quantile_oracle(0.995) - 2.575_829_303_548_900_4).abs() < 1e-12);
        assert!((normal_quantile(0.95).unwrap() - 1.644_853_626_951_472_2).abs() < 1e-9);
        assert!((normal_quantile(0.995).unwrap() - 2.575_829_303_548_900_4).abs() < 1e-9);
    }

    #[test]
    fn matches_oracle_on_grid() {
        for i in 1..200 {
            let p = i as f64 / 200.0;
            let got = normal_quantile(p).unwrap();
            assert!((got - quantile_oracle(p)).abs() < 1e-9, "p = {p}");
        }
        // Far tails: the series loses precision there, so compare against
        // 30-digit reference values instead.
        for &(p, x) in &[
            (1e-6, -4.753_424_308_822_899),
            (1e-4, -3.719_016_485_455_681),
            (0.001, -3.090_232_306_167_814),
            (0.999, 3.090_232_306_167_814),
            (0.9999, 3.719_016_485_455_68),
        ] {
            assert!((normal_quantile(p).unwrap() - x).abs() < 1e-9, "p = {p}");
        }
    }

    #[test]
    fn rejects_out_of_range() {
        for p in [0.0, 1.0, -0.1, 1.5, f64::NAN] {
            assert!(normal_quantile(p).is_err());
        }
    }

    #[test]
    fn log_tail_is_continuous_across_switch() {
        let below = normal_sf(24.999_999).ln();
        let above = log_normal_sf(25.000_001);
        assert!((below - above).abs() < 1e-4);
        assert!(log_normal_sf(60.0).is_finite());
        assert!((log_normal_sf(0.0) - 0.5f64.ln()).abs() < 1e-15);
    }
}
