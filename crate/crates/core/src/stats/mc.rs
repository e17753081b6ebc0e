//! Monte-Carlo quantiles of maximum statistics.
//!
//! All estimators use the conservative order statistic at rank
//! ⌈(1−α)(N+1)⌉, which biases the estimated quantile upward.

use std::cell::RefCell;
use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::StandardNormal;

use super::normal::{normal_quantile, normal_upper_quantile};
use crate::error::{Error, Result};
use crate::rng::RngSpec;

/// Default number of Monte-Carlo draws for quantile estimation.
pub const DEFAULT_N_DRAWS: usize = 100_000;

/// Smallest draw count accepted by the Monte-Carlo quantile routines.
pub const MIN_N_DRAWS: usize = 1_000;

const N_BATCHES: usize = 10;

/// A Monte-Carlo quantile with its batch-means standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantileEstimate {
    pub value: f64,
    pub alpha: f64,
    pub n_draws: usize,
    pub mc_std_err: f64,
}

pub(crate) fn check_alpha(alpha: f64, what: &str) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{what}: alpha = {alpha} not in (0, 1)")))
    }
}

fn check_draws(n_draws: usize) -> Result<()> {
    if n_draws < MIN_N_DRAWS {
        return Err(Error::domain(format!(
            "n_draws = {n_draws} below the minimum of {MIN_N_DRAWS}"
        )));
    }
    Ok(())
}

/// 1-based rank ⌈(1−α)(N+1)⌉ clamped to [1, N].
pub fn conservative_upper_rank(n: usize, alpha: f64) -> usize {
    let raw = ((1.0 - alpha) * (n as f64 + 1.0) - 1e-9).ceil();
    (raw.max(1.0) as usize).min(n)
}

/// 1-based rank ⌊τ(N+1)⌋ clamped to [1, N]; the downward-biased counterpart.
pub fn conservative_lower_rank(n: usize, tau: f64) -> usize {
    let raw = (tau * (n as f64 + 1.0) + 1e-9).floor();
    (raw.max(1.0) as usize).min(n)
}

fn kth_smallest(values: &mut [f64], rank: usize) -> f64 {
    let idx = rank - 1;
    let (_, v, _) = values.select_nth_unstable_by(idx, |a, b| a.total_cmp(b));
    *v
}

/// Conservative upper (1−α) quantile of `values`; reorders the slice.
pub fn upper_quantile(values: &mut [f64], alpha: f64) -> f64 {
    let k = conservative_upper_rank(values.len(), alpha);
    kth_smallest(values, k)
}

/// Conservative lower τ quantile of `values`; reorders the slice.
pub fn lower_quantile(values: &mut [f64], tau: f64) -> f64 {
    let k = conservative_lower_rank(values.len(), tau);
    kth_smallest(values, k)
}

/// Upper quantile plus a batch-means standard error.
pub fn upper_quantile_estimate(values: &mut [f64], alpha: f64) -> QuantileEstimate {
    let n = values.len();
    let batch = n / N_BATCHES;
    let mc_std_err = if batch >= 10 {
        let qs: Vec<f64> = values
            .chunks_mut(batch)
            .take(N_BATCHES)
            .map(|chunk| upper_quantile(chunk, alpha))
            .collect();
        let mean = qs.iter().sum::<f64>() / qs.len() as f64;
        let var = qs.iter().map(|q| (q - mean).powi(2)).sum::<f64>() / (qs.len() - 1) as f64;
        // A batch quantile has N_BATCHES times the variance of the full one.
        (var / qs.len() as f64).sqrt()
    } else {
        f64::NAN
    };
    QuantileEstimate { value: upper_quantile(values, alpha), alpha, n_draws: n, mc_std_err }
}

/// Zero-mean Gaussian noise with a known covariance.
#[derive(Debug, Clone)]
pub struct GaussianNoise {
    cov: DMatrix<f64>,
    chol: DMatrix<f64>,
    scales: Vec<f64>,
    diagonal: bool,
}

impl GaussianNoise {
    /// Validates and factorizes `cov`.
    ///
    /// The factorization is retried once with `1e-10·trace/m` added to the
    /// diagonal; a second failure is a covariance error.
    pub fn new(cov: DMatrix<f64>) -> Result<Self> {
        let m = cov.nrows();
        if m == 0 || cov.ncols() != m {
            return Err(Error::Covariance(format!("covariance must be square and nonempty, got {}x{}", m, cov.ncols())));
        }
        if cov.iter().any(|v| !v.is_finite()) {
            return Err(Error::Covariance("covariance has non-finite entries".into()));
        }
        for i in 0..m {
            if cov[(i, i)] <= 0.0 {
                return Err(Error::Covariance(format!("diagonal entry {i} is not positive")));
            }
            for j in 0..i {
                if (cov[(i, j)] - cov[(j, i)]).abs() > 1e-10 {
                    return Err(Error::Covariance(format!("not symmetric at ({i}, {j})")));
                }
            }
        }
        let diagonal = (0..m).all(|i| (0..m).all(|j| i == j || cov[(i, j)] == 0.0));
        let scales: Vec<f64> = (0..m).map(|i| cov[(i, i)].sqrt()).collect();
        let chol = if diagonal {
            DMatrix::from_diagonal(&DVector::from_vec(scales.clone()))
        } else {
            factorize(&cov)?
        };
        Ok(Self { cov, chol, scales, diagonal })
    }

    pub fn identity(m: usize) -> Self {
        Self::iid(m, 1.0).expect("identity covariance is valid")
    }

    pub fn iid(m: usize, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::domain(format!("noise scale {sigma} must be positive")));
        }
        Self::new(DMatrix::from_diagonal_element(m, m, sigma * sigma))
    }

    /// Squared-exponential kernel Σ_ij = exp(−|i−j|²/(2φ²)).
    pub fn rbf(m: usize, phi: f64) -> Result<Self> {
        if !(phi > 0.0) {
            return Err(Error::domain(format!("kernel scale phi = {phi} must be positive")));
        }
        let cov = DMatrix::from_fn(m, m, |i, j| {
            let d = i as f64 - j as f64;
            (-d * d / (2.0 * phi * phi)).exp()
        });
        Self::new(cov)
    }

    pub fn dim(&self) -> usize {
        self.cov.nrows()
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.cov
    }

    /// Marginal standard deviations √Σ_ii.
    pub fn scales(&self) -> &[f64] {
        &self.scales
    }

    pub fn is_diagonal(&self) -> bool {
        self.diagonal
    }

    /// True when Σ = σ²I for some σ.
    pub fn is_iid(&self) -> bool {
        self.diagonal && self.scales.iter().all(|&s| s == self.scales[0])
    }

    /// Writes one draw of N(0, Σ) into `out`, using `work` as scratch.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, work: &mut [f64], out: &mut [f64]) {
        let m = self.dim();
        for w in work.iter_mut().take(m) {
            *w = rng.sample(StandardNormal);
        }
        if self.diagonal {
            for i in 0..m {
                out[i] = self.scales[i] * work[i];
            }
            return;
        }
        for i in 0..m {
            let mut acc = 0.0;
            for k in 0..=i {
                acc += self.chol[(i, k)] * work[k];
            }
            out[i] = acc;
        }
    }

    /// Restriction of the noise to the coordinates in `idx`.
    pub fn restrict(&self, idx: &[usize]) -> Result<Self> {
        let k = idx.len();
        Self::new(DMatrix::from_fn(k, k, |a, b| self.cov[(idx[a], idx[b])]))
    }
}

fn factorize(cov: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if let Some(ch) = cov.clone().cholesky() {
        return Ok(ch.l());
    }
    let m = cov.nrows();
    let jitter = 1e-10 * cov.trace() / m as f64;
    let mut bumped = cov.clone();
    for i in 0..m {
        bumped[(i, i)] += jitter;
    }
    bumped
        .cholesky()
        .map(|ch| ch.l())
        .ok_or_else(|| Error::Covariance(format!("covariance not positive semidefinite (jitter {jitter:e} failed)")))
}

/// Reusable source of q^α(I), the (1−α) quantile of max_{i∈I} |Z_i|/σ_i.
///
/// Draws are fixed at construction, so quantiles are monotone in both α and
/// I. Correlated noise stores `n_draws × m` standardized draws. Diagonal noise
/// stores nothing: the standardized coordinates are exchangeable, so the
/// quantile only depends on |I| and column k of every subset is drawn from
/// substream k. [`MaxStatSampler::closed_form`] skips sampling altogether and
/// uses the exact i.i.d. formula, which is what large-m simulations need.
#[derive(Debug)]
pub struct MaxStatSampler {
    n_draws: usize,
    m: usize,
    rng: RngSpec,
    source: Source,
    by_size: RefCell<HashMap<(usize, u64), QuantileEstimate>>,
    by_subset: RefCell<HashMap<(Vec<usize>, u64), QuantileEstimate>>,
}

#[derive(Debug)]
enum Source {
    Bank(Vec<f64>),
    Diagonal,
    ClosedForm,
}

impl MaxStatSampler {
    pub fn new(noise: &GaussianNoise, rng: RngSpec, n_draws: usize) -> Result<Self> {
        check_draws(n_draws)?;
        let m = noise.dim();
        let source = if noise.is_diagonal() {
            Source::Diagonal
        } else {
            let mut r = rng.rng();
            let mut bank = vec![0.0; m * n_draws];
            let mut work = vec![0.0; m];
            let mut z = vec![0.0; m];
            for d in 0..n_draws {
                noise.sample_into(&mut r, &mut work, &mut z);
                for i in 0..m {
                    bank[i * n_draws + d] = (z[i] / noise.scales()[i]).abs();
                }
            }
            Source::Bank(bank)
        };
        Ok(Self::with_source(m, rng, n_draws, source))
    }

    /// Exact quantiles for m independent standardized coordinates; reports
    /// `n_draws = 0` and zero Monte-Carlo error.
    pub fn closed_form(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::domain("max statistic sampler needs m >= 1"));
        }
        Ok(Self::with_source(m, RngSpec::new(0, 0), 0, Source::ClosedForm))
    }

    fn with_source(m: usize, rng: RngSpec, n_draws: usize, source: Source) -> Self {
        Self {
            n_draws,
            m,
            rng,
            source,
            by_size: RefCell::new(HashMap::new()),
            by_subset: RefCell::new(HashMap::new()),
        }
    }

    pub fn dim(&self) -> usize {
        self.m
    }

    pub fn n_draws(&self) -> usize {
        self.n_draws
    }

    fn check_subset(&self, subset: &[usize]) -> Result<()> {
        if subset.is_empty() {
            return Err(Error::domain("max statistic over an empty index set"));
        }
        if let Some(&bad) = subset.iter().find(|&&i| i >= self.m) {
            return Err(Error::domain(format!("index {bad} out of range for dimension {}", self.m)));
        }
        Ok(())
    }

    /// Per-draw maxima of the standardized statistic over `subset`. The
    /// closed-form source samples fresh i.i.d. draws (`MIN_N_DRAWS` of them).
    pub fn max_draws(&self, subset: &[usize]) -> Result<Vec<f64>> {
        self.check_subset(subset)?;
        let n = self.n_draws.max(MIN_N_DRAWS);
        let mut maxes = vec![0.0f64; n];
        match &self.source {
            Source::Bank(bank) => {
                for &i in subset {
                    let col = &bank[i * n..(i + 1) * n];
                    for (mx, &v) in maxes.iter_mut().zip(col) {
                        if v > *mx {
                            *mx = v;
                        }
                    }
                }
            }
            Source::Diagonal | Source::ClosedForm => {
                for k in 0..subset.len() {
                    let mut r = self.rng.child(k as u64).rng();
                    for mx in maxes.iter_mut() {
                        let v: f64 = r.sample::<f64, _>(StandardNormal).abs();
                        if v > *mx {
                            *mx = v;
                        }
                    }
                }
            }
        }
        Ok(maxes)
    }

    /// q^α(subset) in standardized units; multiply by σ_i for index i.
    pub fn quantile(&self, subset: &[usize], alpha: f64) -> Result<QuantileEstimate> {
        check_alpha(alpha, "max_stat_quantile")?;
        self.check_subset(subset)?;
        match &self.source {
            Source::ClosedForm => Ok(QuantileEstimate {
                value: max_abs_quantile_iid(subset.len(), alpha, 1.0)?,
                alpha,
                n_draws: 0,
                mc_std_err: 0.0,
            }),
            Source::Diagonal => {
                let key = (subset.len(), alpha.to_bits());
                if let Some(q) = self.by_size.borrow().get(&key) {
                    return Ok(*q);
                }
                let mut draws = self.max_draws(subset)?;
                let q = upper_quantile_estimate(&mut draws, alpha);
                self.by_size.borrow_mut().insert(key, q);
                Ok(q)
            }
            Source::Bank(_) => {
                let key = (subset.to_vec(), alpha.to_bits());
                if let Some(q) = self.by_subset.borrow().get(&key) {
                    return Ok(*q);
                }
                let mut draws = self.max_draws(subset)?;
                let q = upper_quantile_estimate(&mut draws, alpha);
                self.by_subset.borrow_mut().insert(key, q);
                Ok(q)
            }
        }
    }

    /// q^α over every coordinate.
    pub fn quantile_all(&self, alpha: f64) -> Result<QuantileEstimate> {
        let all: Vec<usize> = (0..self.m).collect();
        self.quantile(&all, alpha)
    }
}

/// Monte-Carlo q^α(I) for Gaussian noise; see [`MaxStatSampler`].
pub fn max_stat_quantile_mc(
    noise: &GaussianNoise,
    subset: &[usize],
    alpha: f64,
    rng: RngSpec,
    n_draws: usize,
) -> Result<QuantileEstimate> {
    MaxStatSampler::new(noise, rng, n_draws)?.quantile(subset, alpha)
}

/// Closed form σ·Φ⁻¹((1 + (1−α)^{1/m})/2) for m iid N(0, σ²) coordinates.
pub fn max_abs_quantile_iid(m: usize, alpha: f64, sigma: f64) -> Result<f64> {
    check_alpha(alpha, "max_abs_quantile_iid")?;
    if m == 0 {
        return Err(Error::domain("max_abs_quantile_iid needs m >= 1"));
    }
    if !(sigma > 0.0) {
        return Err(Error::domain(format!("sigma = {sigma} must be positive")));
    }
    // Upper-tail mass (1 − (1−α)^{1/m})/2, computed without cancellation.
    let tail = -0.5 * ((1.0 - alpha).ln() / m as f64).exp_m1();
    Ok(sigma * normal_upper_quantile(tail)?)
}

/// Unadjusted two-sided normal quantile Φ⁻¹(1 − α/2).
pub fn nominal_quantile(alpha: f64) -> Result<f64> {
    check_alpha(alpha, "nominal_quantile")?;
    normal_quantile(1.0 - alpha / 2.0)
}

/// q^α(V): quantile of sup_{v∈V} |vᵀZ| with Z ~ N(0, σ²I_n).
pub fn contrast_quantile_mc(
    contrasts: &[Vec<f64>],
    sigma: f64,
    alpha: f64,
    rng: RngSpec,
    n_draws: usize,
) -> Result<QuantileEstimate> {
    check_alpha(alpha, "contrast_quantile_mc")?;
    check_draws(n_draws)?;
    let first = contrasts.first().ok_or_else(|| Error::domain("empty contrast set"))?;
    let n = first.len();
    if contrasts.iter().any(|v| v.len() != n || v.iter().any(|x| !x.is_finite())) {
        return Err(Error::domain("contrasts must be finite vectors of equal length"));
    }
    if !(sigma > 0.0) {
        return Err(Error::domain(format!("sigma = {sigma} must be positive")));
    }
    let mut r = rng.rng();
    let mut z = vec![0.0; n];
    let mut sups = Vec::with_capacity(n_draws);
    for _ in 0..n_draws {
        for zi in z.iter_mut() {
            *zi = sigma * r.sample::<f64, _>(StandardNormal);
        }
        let sup = contrasts
            .iter()
            .map(|v| v.iter().zip(&z).map(|(a, b)| a * b).sum::<f64>().abs())
            .fold(0.0, f64::max);
        sups.push(sup);
    }
    Ok(upper_quantile_estimate(&mut sups, alpha))
}
