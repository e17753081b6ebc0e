//! Inference on θ = γ̂ᵀμ for the data-chosen direction γ̂ = y/‖y‖, with
//! y ~ N(μ, I_d).
//!
//! The plausible directions form a spherical cap around γ̂ whose angle δ
//! shrinks as ‖y‖ grows. Noncentral χ² and t laws enter only through their
//! sampling identities.

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::rng::RngSpec;
use crate::stats::mc::check_alpha;
use crate::stats::{lower_quantile, upper_quantile, Interval};
use crate::theory::BudgetSplit;

const BISECTION_ITERS: usize = 60;

#[derive(Debug, Clone, PartialEq)]
pub struct SphereProblem {
    y: Vec<f64>,
    budget: BudgetSplit,
}

impl SphereProblem {
    pub fn new(y: Vec<f64>, budget: BudgetSplit) -> Result<Self> {
        if y.len() < 2 {
            return Err(Error::domain("direction inference needs d >= 2"));
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain("observations must be finite"));
        }
        if !(norm(&y) > 0.0) {
            return Err(Error::domain("observation vector must be nonzero"));
        }
        Ok(Self { y, budget })
    }

    pub fn d(&self) -> usize {
        self.y.len()
    }

    pub fn y_norm(&self) -> f64 {
        norm(&self.y)
    }

    pub fn budget(&self) -> BudgetSplit {
        self.budget
    }

    /// γ̂ = y/‖y‖.
    pub fn direction(&self) -> Vec<f64> {
        let r = self.y_norm();
        self.y.iter().map(|v| v / r).collect()
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Half-angle of a cap of directions, in [0, π].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CapAngle {
    delta: f64,
}

impl CapAngle {
    /// Clamps into [0, π].
    pub fn new(delta: f64) -> Result<Self> {
        if delta.is_nan() {
            return Err(Error::domain("cap angle is NaN"));
        }
        Ok(Self { delta: delta.clamp(0.0, std::f64::consts::PI) })
    }

    /// 2·arccos(s) with s clamped to [−1, 1].
    pub fn from_cosine_bound(s: f64) -> Result<Self> {
        Self::new(2.0 * s.clamp(-1.0, 1.0).acos())
    }

    pub fn radians(&self) -> f64 {
        self.delta
    }
}

fn check_draws(n_draws: usize) -> Result<()> {
    if n_draws < 100 {
        return Err(Error::domain(format!("n_draws = {n_draws} is too small")));
    }
    Ok(())
}

/// Draws of (Z₁, χ²_{d−1}).
fn split_draws(d: usize, rng: RngSpec, n_draws: usize) -> Vec<(f64, f64)> {
    let mut r = rng.rng();
    let chi = ChiSquared::new((d - 1) as f64).expect("d >= 2");
    (0..n_draws)
        .map(|_| {
            let z: f64 = r.sample(StandardNormal);
            (z, chi.sample(&mut r))
        })
        .collect()
}

/// √sup{c : F_{ncχ²_d(c)}(‖y‖²) ≥ 1−τ}, with the CDF estimated by Monte Carlo
/// from ‖Z + √c·e₁‖² and lowered by three standard errors.
pub fn mu_norm_lower_bound(y_norm_sq: f64, d: usize, tau: f64, rng: RngSpec, n_draws: usize) -> Result<f64> {
    check_alpha(tau, "mu_norm_lower_bound")?;
    check_draws(n_draws)?;
    if d < 2 {
        return Err(Error::domain("d must be at least 2"));
    }
    if !(y_norm_sq >= 0.0 && y_norm_sq.is_finite()) {
        return Err(Error::domain(format!("squared norm {y_norm_sq} must be finite and nonnegative")));
    }
    let draws = split_draws(d, rng, n_draws);
    let n = n_draws as f64;
    let accepts = |c: f64| {
        let root = c.sqrt();
        let hits = draws.iter().filter(|(z, chi)| (z + root).powi(2) + chi <= y_norm_sq).count() as f64;
        let p = hits / n;
        let se = (p * (1.0 - p) / n).sqrt();
        p - 3.0 * se >= 1.0 - tau
    };
    if !accepts(0.0) {
        return Ok(0.0);
    }
    let (mut lo, mut hi) = (0.0, 4.0 * y_norm_sq + 100.0);
    if accepts(hi) {
        return Ok(hi.sqrt());
    }
    for _ in 0..BISECTION_ITERS {
        let mid = 0.5 * (lo + hi);
        if accepts(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo.sqrt())
}

/// Lower bound on the cosine between y and μ when ‖μ‖ = c: the τ quantile q
/// of T = (Z + c)/√(χ²_{d−1}/(d−1)) mapped through q/√(q² + d − 1).
pub fn s_tau(c: f64, d: usize, tau: f64, rng: RngSpec, n_draws: usize) -> Result<f64> {
    check_alpha(tau, "s_tau")?;
    check_draws(n_draws)?;
    if d < 2 {
        return Err(Error::domain("d must be at least 2"));
    }
    if !(c >= 0.0 && c.is_finite()) {
        return Err(Error::domain(format!("noncentrality {c} must be finite and nonnegative")));
    }
    let k = (d - 1) as f64;
    let mut t: Vec<f64> = split_draws(d, rng, n_draws).into_iter().map(|(z, chi)| (z + c) / (chi / k).sqrt()).collect();
    let q = lower_quantile(&mut t, tau);
    if q == 0.0 {
        return Ok(0.0);
    }
    Ok(q / (q * q + k).sqrt())
}

/// sup_{γ : ∠(e₁, γ) ≤ δ} |γᵀZ| given Z₁ and ‖Z_⊥‖.
fn cap_sup(z1: f64, perp: f64, delta: f64) -> f64 {
    let r = (z1 * z1 + perp * perp).sqrt();
    let phi = perp.atan2(z1);
    let best = |angle: f64| r * (angle - delta).max(0.0).cos();
    best(phi).max(best(std::f64::consts::PI - phi))
}

/// q^α_∠(δ): the (1−α) quantile of the cap supremum.
pub fn cap_quantile(delta: CapAngle, d: usize, alpha: f64, rng: RngSpec, n_draws: usize) -> Result<f64> {
    check_alpha(alpha, "cap_quantile")?;
    check_draws(n_draws)?;
    if d < 2 {
        return Err(Error::domain("d must be at least 2"));
    }
    let mut sups: Vec<f64> =
        split_draws(d, rng, n_draws).into_iter().map(|(z, chi)| cap_sup(z, chi.sqrt(), delta.radians())).collect();
    Ok(upper_quantile(&mut sups, alpha))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SphereInference {
    pub interval: Interval,
    pub delta: CapAngle,
    pub mu_lower_bound: f64,
    pub cosine_bound: f64,
}

/// ‖y‖ ± q^{α−ν}_∠(δ), δ = 2·arccos s_{ν/2}(μ^LB_{ν/2}).
pub fn sphere_interval(problem: &SphereProblem, rng: RngSpec, n_draws: usize) -> Result<SphereInference> {
    let d = problem.d();
    let half_nu = problem.budget.nu() / 2.0;
    let r = problem.y_norm();
    let mu_lb = mu_norm_lower_bound(r * r, d, half_nu, rng.child(0), n_draws)?;
    let s = s_tau(mu_lb, d, half_nu, rng.child(1), n_draws)?;
    let delta = CapAngle::from_cosine_bound(s)?;
    let q = cap_quantile(delta, d, problem.budget.inference_level(), rng.child(2), n_draws)?;
    Ok(SphereInference { interval: Interval::symmetric(r, q), delta, mu_lower_bound: mu_lb, cosine_bound: s })
}

/// Scheffé-type width: the cap is the whole sphere.
pub fn scheffe_half_width(d: usize, alpha: f64, rng: RngSpec, n_draws: usize) -> Result<f64> {
    cap_quantile(CapAngle::new(std::f64::consts::PI)?, d, alpha, rng, n_draws)
}
