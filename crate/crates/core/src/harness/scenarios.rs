//! Data-generating processes and method dispatch for every problem kind.

use std::path::Path;
use std::time::Instant;

use nalgebra::DMatrix;
use rand_distr::{Bernoulli, Beta, Distribution, StandardNormal};
use serde::Serialize;

use super::{generate_mu, generate_mu_reference, width_quantiles, ExperimentConfig, Method, ProblemKind, ResultRow};
use crate::erm::{erm_risk_bound, LossMatrix, LocalizedBound};
use crate::error::{Error, Result};
use crate::lasso::{
    enumerate_models_in_box, intervals_with_quantile, posi_intervals, posi_quantile, projection_parameter,
    screening_radius, Design, EnumerationOptions, LassoProblem, ModelSignPair, PlausibleModels, MAX_FULL_D,
};
use crate::rng::RngSpec;
use crate::sphere::{scheffe_half_width, sphere_interval, SphereProblem};
use crate::stats::{max_abs_quantile_iid, nominal_quantile, GaussianNoise, Interval, IntervalSet, MaxStatSampler};
use crate::theory::BudgetSplit;
use crate::winner::nonparametric::{np_nominal, np_simultaneous};
use crate::winner::parametric::{nominal_intervals, simultaneous_intervals};
use crate::winner::{
    argmax, conditional_winner_interval, local_filedrawer, local_winner, np_filedrawer_region, np_winner_interval,
    two_candidate_interval, BoundKind, CiKind, SampleMatrix,
};

/// Largest `m × n_draws` (or m² for a covariance factor) the harness will allocate.
const MAX_CELLS: usize = 200_000_000;

/// Outcome of one method on one simulated data set.
struct Outcome {
    /// Mean width of the reported intervals; `None` when nothing was selected.
    width: Option<f64>,
    covered: bool,
}

impl Outcome {
    fn from_set(set: &IntervalSet, truth: &[f64]) -> Self {
        let width = if set.is_empty() {
            None
        } else {
            Some(set.entries.iter().map(|(_, iv)| iv.width()).sum::<f64>() / set.len() as f64)
        };
        Self { width, covered: set.covers(truth) }
    }

    fn single(interval: Interval, truth: f64) -> Self {
        Self { width: Some(interval.width()), covered: interval.contains(truth) }
    }
}

/// Per-trial record of one method in one grid cell, alongside its summary row.
#[derive(Debug, Clone)]
pub struct MethodTrials {
    pub row: ResultRow,
    /// Mean reported width per trial; `None` when nothing was selected.
    pub widths: Vec<Option<f64>>,
    pub covered: Vec<bool>,
}

/// Grid coordinates of one cell.
struct Cell {
    scenario: String,
    theta: Option<f64>,
    c: Option<f64>,
    m: Option<usize>,
    phi: Option<f64>,
}

impl Cell {
    fn row(&self, method: Method, widths: &[f64], coverage: Option<f64>, runtime_ms: Option<f64>) -> ResultRow {
        let q = width_quantiles(widths);
        ResultRow {
            scenario: self.scenario.clone(),
            method: method.name().to_string(),
            param_theta: self.theta,
            param_c: self.c,
            param_m: self.m,
            param_phi: self.phi,
            median_width: q.map(|q| q.1),
            q05_width: q.map(|q| q.0),
            q95_width: q.map(|q| q.2),
            coverage,
            runtime_ms,
        }
    }
}

/// Methods to run in one cell: the configured list, or every method in
/// `available`. A configured method missing from `available` is an error
/// naming the cell.
fn cell_methods(cfg: &ExperimentConfig, available: &[Method], cell: &Cell) -> Result<Vec<Method>> {
    match &cfg.methods {
        None => Ok(available.to_vec()),
        Some(list) => {
            for &m in list {
                if !available.contains(&m) {
                    return Err(Error::config(format!(
                        "method `{m}` is not defined for `{}` in cell {}",
                        cfg.kind,
                        describe(cell)
                    )));
                }
            }
            Ok(list.clone())
        }
    }
}

fn describe(cell: &Cell) -> String {
    let mut s = cell.scenario.clone();
    if let Some(phi) = cell.phi {
        s.push_str(&format!(" (phi = {phi})"));
    }
    s
}

/// Runs `trials` replicates of one cell. `prepare` simulates the shared data
/// of a trial; `apply` runs one method on it.
fn simulate<D>(
    cfg: &ExperimentConfig,
    cell: &Cell,
    methods: &[Method],
    rng: RngSpec,
    prepare: impl Fn(RngSpec) -> Result<D>,
    apply: impl Fn(&D, Method, RngSpec) -> Result<Outcome>,
) -> Result<Vec<MethodTrials>> {
    let k = methods.len();
    let mut widths = vec![Vec::with_capacity(cfg.trials); k];
    let mut covered = vec![Vec::with_capacity(cfg.trials); k];
    let mut elapsed = vec![0.0f64; k];
    for t in 0..cfg.trials {
        let trial = rng.child(t as u64);
        let data = prepare(trial.child(0))?;
        for (j, &method) in methods.iter().enumerate() {
            let start = Instant::now();
            let out = apply(&data, method, trial.child(1 + j as u64))?;
            elapsed[j] += start.elapsed().as_secs_f64() * 1e3;
            widths[j].push(out.width);
            covered[j].push(out.covered);
        }
    }
    Ok(methods
        .iter()
        .zip(widths.into_iter().zip(covered))
        .zip(elapsed)
        .map(|((&method, (widths, covered)), ms)| {
            let hits = covered.iter().filter(|&&c| c).count();
            let coverage = hits as f64 / cfg.trials as f64;
            let reported: Vec<f64> = widths.iter().flatten().copied().collect();
            let row = cell.row(method, &reported, Some(coverage), cfg.timing.then_some(ms));
            MethodTrials { row, widths, covered }
        })
        .collect())
}

pub(super) fn run(cfg: &ExperimentConfig) -> Result<Vec<MethodTrials>> {
    let budget = BudgetSplit::new(cfg.alpha, cfg.nu)?;
    let root = RngSpec::new(cfg.seed, 0);
    let mut rows = Vec::new();
    let mut index = 0u64;
    let mut next_rng = || {
        index += 1;
        root.child(index)
    };
    match cfg.kind {
        ProblemKind::Figure1 => {
            for &delta in &cfg.delta {
                rows.extend(figure1_cell(cfg, budget, delta, next_rng())?);
            }
        }
        ProblemKind::Winner | ProblemKind::FileDrawer => {
            for &theta in &cfg.theta {
                for &c in &cfg.c {
                    for &m in &cfg.m {
                        for &phi in &cfg.phi {
                            rows.extend(gaussian_cell(cfg, budget, theta, c, m, phi, next_rng())?);
                        }
                    }
                }
            }
        }
        ProblemKind::WinnerNp | ProblemKind::FileDrawerNp => {
            require("n", &cfg.n)?;
            for &theta in &cfg.theta {
                for &c in &cfg.c {
                    for &m in &cfg.m {
                        for &n in &cfg.n {
                            rows.extend(np_cell(cfg, budget, theta, c, m, n, next_rng())?);
                        }
                    }
                }
            }
        }
        ProblemKind::Lasso => {
            require("n", &cfg.n)?;
            require("d", &cfg.d)?;
            let signals: Vec<LassoSignal> = if cfg.eps_ratio.is_empty() {
                cfg.sparsity.iter().map(|&s| LassoSignal::Sparse(s)).collect()
            } else {
                cfg.eps_ratio.iter().map(|&r| LassoSignal::Dense(r)).collect()
            };
            require("sparsity", &signals)?;
            for &n in &cfg.n {
                for &d in &cfg.d {
                    for &signal in &signals {
                        rows.extend(lasso_cell(cfg, budget, n, d, signal, next_rng())?);
                    }
                }
            }
        }
        ProblemKind::Erm => {
            require("n", &cfg.n)?;
            for &theta in &cfg.theta {
                for &m in &cfg.m {
                    for &n in &cfg.n {
                        rows.extend(erm_cell(cfg, budget, theta, m, n, next_rng())?);
                    }
                }
            }
        }
        ProblemKind::Sphere => {
            require("d", &cfg.d)?;
            for &d in &cfg.d {
                for &r in &cfg.mu_norm {
                    rows.extend(sphere_cell(cfg, budget, d, r, next_rng())?);
                }
            }
        }
    }
    Ok(rows)
}

fn require<T>(key: &str, values: &[T]) -> Result<()> {
    if values.is_empty() {
        return Err(Error::config(format!("`{key}` needs at least one value")));
    }
    Ok(())
}

fn gaussian_vector(rng: &mut impl rand::Rng, m: usize) -> Vec<f64> {
    (0..m).map(|_| rng.sample(StandardNormal)).collect()
}

fn figure1_cell(cfg: &ExperimentConfig, budget: BudgetSplit, delta: f64, rng: RngSpec) -> Result<Vec<MethodTrials>> {
    let cell = Cell { scenario: format!("figure1/delta={delta}"), theta: None, c: None, m: Some(2), phi: None };
    let methods = cell_methods(cfg, ProblemKind::Figure1.methods(), &cell)?;
    let mu = [0.0, delta];
    let q_sim = max_abs_quantile_iid(2, budget.alpha(), 1.0)?;
    let z = nominal_quantile(budget.alpha())?;
    simulate(
        cfg,
        &cell,
        &methods,
        rng,
        |r| {
            let z = gaussian_vector(&mut r.rng(), 2);
            Ok([mu[0] + z[0], mu[1] + z[1]])
        },
        |y, method, _| {
            let w = argmax(y)?;
            let interval = match method {
                Method::Local => *two_candidate_interval(*y, budget, 1.0)?.intervals.get(w).expect("winner interval"),
                Method::Simultaneous => Interval::symmetric(y[w], q_sim),
                Method::Conditional => conditional_winner_interval(y, 1.0, budget.alpha())?,
                Method::Nominal => Interval::symmetric(y[w], z),
            };
            Ok(Outcome::single(interval, mu[w]))
        },
    )
}

#[allow(clippy::too_many_arguments)]
fn gaussian_cell(
    cfg: &ExperimentConfig,
    budget: BudgetSplit,
    theta: f64,
    c: f64,
    m: usize,
    phi: f64,
    rng: RngSpec,
) -> Result<Vec<MethodTrials>> {
    let winner = cfg.kind == ProblemKind::Winner;
    let scenario = if winner { "winner".to_string() } else { format!("filedrawer/T={}", cfg.threshold) };
    let cell = Cell { scenario, theta: Some(theta), c: Some(c), m: Some(m), phi: Some(phi) };
    let available: Vec<Method> = cfg
        .kind
        .methods()
        .iter()
        .copied()
        .filter(|&meth| meth != Method::Conditional || phi == 0.0)
        .collect();
    let methods = cell_methods(cfg, &available, &cell)?;
    let mu = generate_mu_reference(m, theta, c)?;
    // Independent noise never materializes its m × m covariance.
    let (noise, sampler) = if phi == 0.0 {
        (None, MaxStatSampler::closed_form(m)?)
    } else {
        if m.saturating_mul(m) > MAX_CELLS || m.saturating_mul(cfg.n_draws) > MAX_CELLS {
            return Err(Error::config(format!(
                "correlated noise with m = {m} and n_draws = {} is too large; lower n_draws or m",
                cfg.n_draws
            )));
        }
        let noise = GaussianNoise::rbf(m, phi)?;
        let sampler = MaxStatSampler::new(&noise, rng.child(0), cfg.n_draws)?;
        (Some(noise), sampler)
    };
    let scales = noise.as_ref().map_or_else(|| vec![1.0; m], |n| n.scales().to_vec());
    let threshold = cfg.threshold;
    simulate(
        cfg,
        &cell,
        &methods,
        rng.child(1),
        |r| {
            let mut rr = r.rng();
            let mut y = match &noise {
                None => gaussian_vector(&mut rr, m),
                Some(noise) => {
                    let (mut work, mut y) = (vec![0.0; m], vec![0.0; m]);
                    noise.sample_into(&mut rr, &mut work, &mut y);
                    y
                }
            };
            for (v, mu) in y.iter_mut().zip(&mu) {
                *v += mu;
            }
            Ok(y)
        },
        |y, method, _| {
            let selection: Vec<usize> =
                if winner { vec![argmax(y)?] } else { (0..m).filter(|&i| y[i] >= threshold).collect() };
            let set = match method {
                Method::Local if winner => local_winner(y, &scales, budget, &sampler)?.intervals,
                Method::Local => local_filedrawer(y, &scales, threshold, budget, &sampler)?.intervals,
                Method::Simultaneous => simultaneous_intervals(y, &selection, &scales, &sampler, budget.alpha())?,
                Method::Nominal => nominal_intervals(y, &selection, &scales, budget.alpha())?,
                Method::Conditional => {
                    let iv = conditional_winner_interval(y, scales[0], budget.alpha())?;
                    IntervalSet { entries: vec![(selection[0], iv)], alpha: budget.alpha() }
                }
            };
            Ok(Outcome::from_set(&set, &mu))
        },
    )
}

/// Bounded observations for the nonparametric kinds: y = μ + ξ with ξ ~
/// Beta(a, b), mapped affinely from the known support [min μ, max μ + 1]
/// onto [0, 1]. Returns the per-candidate means after the map.
fn np_truth(mu: &[f64], cfg: &ExperimentConfig) -> (Vec<f64>, f64, f64) {
    let lo = mu.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = mu.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = hi - lo + 1.0;
    let noise_mean = cfg.beta_a / (cfg.beta_a + cfg.beta_b);
    (mu.iter().map(|v| (v - lo + noise_mean) / span).collect(), lo, span)
}

#[allow(clippy::too_many_arguments)]
fn np_cell(
    cfg: &ExperimentConfig,
    budget: BudgetSplit,
    theta: f64,
    c: f64,
    m: usize,
    n: usize,
    rng: RngSpec,
) -> Result<Vec<MethodTrials>> {
    let winner = cfg.kind == ProblemKind::WinnerNp;
    let scenario = if winner { format!("winner-np/n={n}") } else { format!("filedrawer-np/n={n},T={}", cfg.threshold) };
    let cell = Cell { scenario, theta: Some(theta), c: Some(c), m: Some(m), phi: None };
    let methods = cell_methods(cfg, cfg.kind.methods(), &cell)?;
    let mu = generate_mu(m, theta, c)?;
    let (truth, lo, span) = np_truth(&mu, cfg);
    let beta = Beta::new(cfg.beta_a, cfg.beta_b).map_err(|e| Error::config(format!("beta noise: {e}")))?;
    let threshold = cfg.threshold;
    simulate(
        cfg,
        &cell,
        &methods,
        rng,
        |r| {
            let mut r = r.rng();
            let columns = mu
                .iter()
                .map(|&v| (0..n).map(|_| ((v - lo + beta.sample(&mut r)) / span).clamp(0.0, 1.0)).collect())
                .collect();
            SampleMatrix::from_columns(columns)
        },
        |samples, method, _| np_outcome(samples, method, budget, winner, threshold, &truth),
    )
}

fn np_intervals(
    samples: &SampleMatrix,
    method: Method,
    budget: BudgetSplit,
    winner: bool,
    threshold: f64,
) -> Result<IntervalSet> {
    let means = samples.means();
    let selection: Vec<usize> =
        if winner { vec![argmax(&means)?] } else { (0..means.len()).filter(|&i| means[i] >= threshold).collect() };
    Ok(match method {
        Method::Local if winner => np_winner_interval(samples, budget, BoundKind::Bentkus, CiKind::Betting)?.intervals,
        Method::Local => np_filedrawer_region(samples, threshold, budget, BoundKind::Bentkus, CiKind::Betting)?.intervals,
        Method::Simultaneous => np_simultaneous(samples, &selection, budget.alpha(), CiKind::Betting)?,
        Method::Nominal => np_nominal(samples, &selection, budget.alpha(), CiKind::Betting)?,
        Method::Conditional => {
            // Normal approximation: pooled standard error of the means.
            let n = samples.n() as f64;
            let pooled = (0..samples.m())
                .map(|j| {
                    let col = samples.column(j);
                    let mean = means[j];
                    col.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)
                })
                .sum::<f64>()
                / samples.m() as f64;
            let se = (pooled / n).sqrt().max(f64::MIN_POSITIVE);
            let iv = conditional_winner_interval(&means, se, budget.alpha())?;
            IntervalSet { entries: vec![(selection[0], iv)], alpha: budget.alpha() }
        }
    })
}

fn np_outcome(
    samples: &SampleMatrix,
    method: Method,
    budget: BudgetSplit,
    winner: bool,
    threshold: f64,
    truth: &[f64],
) -> Result<Outcome> {
    Ok(Outcome::from_set(&np_intervals(samples, method, budget, winner, threshold)?, truth))
}

#[derive(Debug, Clone, Copy)]
enum LassoSignal {
    /// ⌈s·d⌉ nonzeros, half at λ and half at 2λ.
    Sparse(f64),
    /// The first ⌊d/2⌋ coefficients equal ε = ratio·λ.
    Dense(f64),
}

/// Coefficients of the lasso scenario; strong entries come first.
fn lasso_beta(d: usize, lambda: f64, signal: LassoSignal) -> Vec<f64> {
    let mut beta = vec![0.0; d];
    match signal {
        LassoSignal::Sparse(s) => {
            let k = ((s * d as f64).ceil() as usize).min(d);
            let strong = k / 2;
            for (j, b) in beta.iter_mut().enumerate().take(k) {
                *b = if j < strong { 2.0 * lambda } else { lambda };
            }
        }
        LassoSignal::Dense(ratio) => {
            for b in beta.iter_mut().take(d / 2) {
                *b = ratio * lambda;
            }
        }
    }
    beta
}

/// λ = λ₀·√(2 log(e·d)).
pub(crate) fn lasso_lambda(lambda0: f64, d: usize) -> f64 {
    lambda0 * (2.0 * (std::f64::consts::E * d as f64).ln()).sqrt()
}

fn lasso_cell(
    cfg: &ExperimentConfig,
    budget: BudgetSplit,
    n: usize,
    d: usize,
    signal: LassoSignal,
    rng: RngSpec,
) -> Result<Vec<MethodTrials>> {
    let tag = match signal {
        LassoSignal::Sparse(s) => format!("s={s}"),
        LassoSignal::Dense(r) => format!("eps_ratio={r}"),
    };
    let cell = Cell {
        scenario: format!("lasso/n={n},d={d},lambda0={},{tag}", cfg.lambda0),
        theta: None,
        c: None,
        m: Some(d),
        phi: None,
    };
    let available: Vec<Method> = ProblemKind::Lasso
        .methods()
        .iter()
        .copied()
        .filter(|&meth| meth != Method::Simultaneous || d <= MAX_FULL_D)
        .collect();
    let methods = cell_methods(cfg, &available, &cell)?;
    let design = Design::gaussian_normalized(n, d, rng.child(0))?;
    let lambda = lasso_lambda(cfg.lambda0, d);
    let mu = design.predict(&lasso_beta(d, lambda, signal));
    let s_nu = screening_radius(&design, 1.0, budget.nu(), rng.child(1), cfg.n_draws)?;
    let q_full = if methods.contains(&Method::Simultaneous) {
        posi_quantile(&design, &PlausibleModels::All { d }, budget.alpha(), rng.child(2), cfg.n_draws)?.value
    } else {
        f64::NAN
    };
    let z = nominal_quantile(budget.alpha())?;
    let options = EnumerationOptions { p_max: cfg.p_max, use_safe: true };
    simulate(
        cfg,
        &cell,
        &methods,
        rng.child(3),
        |r| {
            let noise = gaussian_vector(&mut r.rng(), n);
            let y: Vec<f64> = mu.iter().zip(&noise).map(|(a, b)| a + b).collect();
            let pair = LassoProblem::new(&design, &y, lambda)?.solve()?.pair;
            Ok((y, pair))
        },
        |(y, pair): &(Vec<f64>, ModelSignPair), method, r| {
            if pair.is_empty() {
                return Ok(Outcome { width: None, covered: true });
            }
            let set = match method {
                Method::Local => {
                    let problem = LassoProblem::new(&design, y, lambda)?;
                    let (models, _) = enumerate_models_in_box(&problem, pair.clone(), s_nu, options)?;
                    posi_intervals(&design, y, pair, &models, budget, 1.0, r, cfg.n_draws)?
                }
                Method::Simultaneous => intervals_with_quantile(&design, y, &pair.model, q_full, 1.0, budget.alpha())?,
                Method::Nominal => intervals_with_quantile(&design, y, &pair.model, z, 1.0, budget.alpha())?,
                Method::Conditional => unreachable!("conditional is not offered for lasso"),
            };
            let theta = projection_parameter(&design, &mu, &pair.model)?;
            let mut truth = vec![0.0; d];
            for (k, &j) in pair.model.iter().enumerate() {
                truth[j] = theta[k];
            }
            Ok(Outcome::from_set(&set, &truth))
        },
    )
}

/// Bernoulli loss means in [0.2, 0.8] following the mean profile: the two
/// central hypotheses have the smallest risk.
fn erm_risks(m: usize, theta: f64) -> Result<Vec<f64>> {
    Ok(generate_mu(m, theta, 1.0)?.iter().map(|v| 0.2 - 0.6 * v).collect())
}

fn erm_cell(
    cfg: &ExperimentConfig,
    budget: BudgetSplit,
    theta: f64,
    m: usize,
    n: usize,
    rng: RngSpec,
) -> Result<Vec<MethodTrials>> {
    let cell = Cell { scenario: format!("erm/n={n}"), theta: Some(theta), c: None, m: Some(m), phi: None };
    let methods = cell_methods(cfg, ProblemKind::Erm.methods(), &cell)?;
    let risks = erm_risks(m, theta)?;
    let dists = risks.iter().map(|&p| Bernoulli::new(p)).collect::<std::result::Result<Vec<_>, _>>()
        .map_err(|e| Error::config(format!("loss means: {e}")))?;
    simulate(
        cfg,
        &cell,
        &methods,
        rng,
        |r| {
            let mut rr = r.rng();
            let losses = DMatrix::from_fn(n, m, |_, j| if dists[j].sample(&mut rr) { 1.0 } else { 0.0 });
            erm_risk_bound(&LossMatrix::unlabeled(losses)?, budget, r.child(0), cfg.n_draws)
        },
        |b, method, _| {
            let bound = if method == Method::Local { b.bound } else { b.bound_full };
            Ok(Outcome { width: Some(bound - b.erm_risk), covered: risks[b.erm_index] <= bound })
        },
    )
}

fn sphere_cell(cfg: &ExperimentConfig, budget: BudgetSplit, d: usize, r: f64, rng: RngSpec) -> Result<Vec<MethodTrials>> {
    let cell = Cell { scenario: format!("sphere/d={d},mu_norm={r}"), theta: None, c: None, m: Some(d), phi: None };
    let methods = cell_methods(cfg, ProblemKind::Sphere.methods(), &cell)?;
    let scheffe = scheffe_half_width(d, budget.alpha(), rng.child(0), cfg.n_draws)?;
    let z = nominal_quantile(budget.alpha())?;
    simulate(
        cfg,
        &cell,
        &methods,
        rng.child(1),
        |rr| {
            let mut y = gaussian_vector(&mut rr.rng(), d);
            y[0] += r;
            Ok(y)
        },
        |y, method, rr| {
            let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            // Target ⟨y/‖y‖, μ⟩ with μ = r·e₁.
            let target = r * y[0] / norm;
            let interval = match method {
                Method::Local => sphere_interval(&SphereProblem::new(y.clone(), budget)?, rr, cfg.n_draws)?.interval,
                Method::Simultaneous => Interval::symmetric(norm, scheffe),
                Method::Nominal => Interval::symmetric(norm, z),
                Method::Conditional => unreachable!("conditional is not offered for sphere"),
            };
            Ok(Outcome::single(interval, target))
        },
    )
}

/// Intervals of one method on user data.
#[derive(Debug, Clone, Serialize)]
pub struct MethodIntervals {
    pub method: String,
    pub intervals: IntervalSet,
}

/// Result of evaluating the methods once on a user-supplied data file.
#[derive(Debug, Clone, Serialize)]
pub struct DataReport {
    pub kind: String,
    pub selection: Vec<usize>,
    /// Plausible set of the local method.
    pub plausible: Vec<usize>,
    pub methods: Vec<MethodIntervals>,
    /// Present for `erm`.
    pub risk_bound: Option<LocalizedBound>,
    /// One row per method; widths are single-run values, coverage is empty.
    #[serde(skip)]
    pub rows: Vec<ResultRow>,
}

/// Reads observations (one row per sample, one column per candidate, with a
/// header line) into a sample matrix.
pub fn read_samples(path: &Path) -> Result<SampleMatrix> {
    let mut reader = csv::Reader::from_path(path)?;
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let row = record
            .iter()
            .map(|f| f.trim().parse::<f64>().map_err(|_| Error::config(format!("non-numeric entry `{f}` in {}", path.display()))))
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    SampleMatrix::from_rows(&rows).map_err(|e| Error::config(format!("{}: {e}", path.display())))
}

/// Runs the methods of `cfg.kind` once on `cfg.data`.
pub fn evaluate_data(cfg: &ExperimentConfig) -> Result<DataReport> {
    let path = cfg.data.as_deref().ok_or_else(|| Error::config("no data file given"))?;
    let budget = BudgetSplit::new(cfg.alpha, cfg.nu)?;
    let cell = Cell { scenario: format!("{}/data", cfg.kind), theta: None, c: None, m: None, phi: None };
    match cfg.kind {
        ProblemKind::WinnerNp | ProblemKind::FileDrawerNp => {
            let samples = read_samples(path)?;
            let winner = cfg.kind == ProblemKind::WinnerNp;
            let cell = Cell { m: Some(samples.m()), ..cell };
            let methods = cell_methods(cfg, cfg.kind.methods(), &cell)?;
            let local = if winner {
                np_winner_interval(&samples, budget, BoundKind::Bentkus, CiKind::Betting)?
            } else {
                np_filedrawer_region(&samples, cfg.threshold, budget, BoundKind::Bentkus, CiKind::Betting)?
            };
            let mut reports = Vec::new();
            let mut rows = Vec::new();
            for &method in &methods {
                let set = np_intervals(&samples, method, budget, winner, cfg.threshold)?;
                let out = Outcome::from_set(&set, &vec![f64::NAN; samples.m()]);
                rows.push(cell.row(method, out.width.as_slice(), None, None));
                reports.push(MethodIntervals { method: method.name().to_string(), intervals: set });
            }
            Ok(DataReport {
                kind: cfg.kind.name().to_string(),
                selection: local.selection,
                plausible: local.plausible.indices,
                methods: reports,
                risk_bound: None,
                rows,
            })
        }
        ProblemKind::Erm => {
            let losses = LossMatrix::from_path(path)?;
            let cell = Cell { m: Some(losses.n_hypotheses()), ..cell };
            let methods = cell_methods(cfg, ProblemKind::Erm.methods(), &cell)?;
            let b = erm_risk_bound(&losses, budget, RngSpec::new(cfg.seed, 0), cfg.n_draws)?;
            let rows = methods
                .iter()
                .map(|&method| {
                    let bound = if method == Method::Local { b.bound } else { b.bound_full };
                    cell.row(method, &[bound - b.erm_risk], None, None)
                })
                .collect();
            Ok(DataReport {
                kind: "erm".to_string(),
                selection: vec![b.erm_index],
                plausible: vec![],
                methods: vec![],
                risk_bound: Some(b),
                rows,
            })
        }
        other => Err(Error::config(format!("problem `{other}` does not take a data file"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lasso_signals() {
        let b = lasso_beta(8, 1.0, LassoSignal::Sparse(0.5));
        assert_eq!(b, vec![2.0, 2.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
        let b = lasso_beta(5, 1.0, LassoSignal::Sparse(0.5));
        assert_eq!(b, vec![2.0, 1.0, 1.0, 0.0, 0.0]);
        let b = lasso_beta(10, 2.0, LassoSignal::Dense(1.5));
        assert_eq!(b.iter().filter(|&&v| v == 3.0).count(), 5);
        // λ₀ = 6, d = 8: 6·√(2·(1 + ln 8)).
        assert!((lasso_lambda(6.0, 8) - 6.0 * (2.0 * (1.0 + 8f64.ln())).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn erm_risk_profile() {
        let r = erm_risks(50, 1.0).unwrap();
        let lo = r.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = r.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        assert!((lo - 0.2).abs() < 1e-12 && (hi - 0.8).abs() < 1e-12);
    }

    #[test]
    fn np_map_into_unit_interval() {
        let cfg = ExperimentConfig::new(ProblemKind::WinnerNp);
        let mu = generate_mu(5, 1.0, 20.0).unwrap();
        let (truth, lo, span) = np_truth(&mu, &cfg);
        assert_eq!(lo, -20.0);
        assert_eq!(span, 21.0);
        assert!(truth.iter().all(|t| (0.0..=1.0).contains(t)));
        assert!((truth[2] - (20.0 + 2.0 / 7.0) / 21.0).abs() < 1e-12);
    }
}
