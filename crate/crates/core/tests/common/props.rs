//! Property suites shared by the standalone property tests and the
//! acceptance run. Each suite drives a deterministic proptest runner and
//! returns the minimal failing case as a message.

use std::fmt::Debug;

use locsim::harness::{run_experiment, ExperimentConfig, ProblemKind};
use locsim::lasso::{check_kkt, lasso_solve};
use locsim::lp::{lp_maximize, LpStatus, Polyhedron};
use locsim::stats::{bentkus_width, GaussianNoise, MaxStatSampler};
use locsim::winner::{local_winner, plausible_filedrawer_set_scaled, plausible_winner_set_scaled};
use locsim::{BudgetSplit, RngSpec};
use proptest::prelude::*;
use proptest::strategy::ValueTree;
use proptest::test_runner::{Config, RngAlgorithm, TestCaseError, TestRng, TestRunner};

use super::lasso_instance;

const DRAWS: usize = 2000;

fn runner(cases: u32) -> TestRunner {
    let config = Config { cases, failure_persistence: None, ..Config::default() };
    TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
}

fn check<S>(cases: u32, strategy: S, test: impl Fn(S::Value) -> Result<(), TestCaseError>) -> Result<(), String>
where
    S: Strategy,
    S::Value: Debug,
    S::Tree: ValueTree<Value = S::Value>,
{
    runner(cases).run(&strategy, test).map_err(|e| e.to_string())
}

/// Observations, a noise law (independent or RBF), and a seed.
fn gaussian_case() -> impl Strategy<Value = (Vec<f64>, GaussianNoise, u64)> {
    (2usize..12, prop_oneof![Just(0.0), 0.5f64..4.0], any::<u64>()).prop_flat_map(|(m, phi, seed)| {
        prop::collection::vec(-3.0f64..3.0, m).prop_map(move |y| {
            let noise = if phi == 0.0 { GaussianNoise::identity(m) } else { GaussianNoise::rbf(m, phi).unwrap() };
            (y, noise, seed)
        })
    })
}

fn sampler(noise: &GaussianNoise, seed: u64) -> MaxStatSampler {
    MaxStatSampler::new(noise, RngSpec::new(seed, 0), DRAWS).unwrap()
}

fn subset(mask: &[bool]) -> Vec<usize> {
    (0..mask.len()).filter(|&i| mask[i]).collect()
}

/// Corrections over nested index sets are nested: A ⊆ B gives
/// q^α(A) ≤ q^α(B), so every interval built on A sits inside the one on B.
pub fn nestedness(cases: u32) -> Result<(), String> {
    let strategy = (gaussian_case(), prop::collection::vec((any::<bool>(), any::<bool>()), 12), 0.01f64..0.5);
    check(cases, strategy, |((y, noise, seed), masks, alpha)| {
        let m = y.len();
        let a: Vec<bool> = masks[..m].iter().map(|p| p.0).collect();
        let b: Vec<bool> = masks[..m].iter().map(|p| p.0 || p.1).collect();
        let (mut a, mut b) = (subset(&a), subset(&b));
        if a.is_empty() {
            a.push(0);
            if !b.contains(&0) {
                b.insert(0, 0);
            }
        }
        let s = sampler(&noise, seed);
        let qa = s.quantile(&a, alpha).unwrap().value;
        let qb = s.quantile(&b, alpha).unwrap().value;
        let qall = s.quantile_all(alpha).unwrap().value;
        prop_assert!(qa <= qb && qb <= qall, "q(A) {qa}, q(B) {qb}, q(all) {qall}");
        Ok(())
    })
}

/// Larger α never widens: max-statistic quantiles, local winner intervals
/// at fixed ν, and Bentkus widths are all nonincreasing in α.
pub fn alpha_monotonicity(cases: u32) -> Result<(), String> {
    let strategy = (gaussian_case(), 0.011f64..0.3, 0.0f64..0.3, 10usize..300);
    check(cases, strategy, |((y, noise, seed), a1, step, n)| {
        let a2 = (a1 + step).min(0.6);
        let s = sampler(&noise, seed);
        let q1 = s.quantile_all(a1).unwrap().value;
        let q2 = s.quantile_all(a2).unwrap().value;
        prop_assert!(q2 <= q1, "q at {a1}: {q1}, at {a2}: {q2}");
        let nu = 0.01;
        let w = |alpha: f64| {
            let r = local_winner(&y, noise.scales(), BudgetSplit::new(alpha, nu).unwrap(), &s).unwrap();
            r.intervals.entries[0].1.width()
        };
        prop_assert!(w(a2) <= w(a1), "local width at {a1}: {}, at {a2}: {}", w(a1), w(a2));
        let b1 = bentkus_width(n, a1).unwrap();
        let b2 = bentkus_width(n, a2).unwrap();
        prop_assert!(b2 <= b1, "bentkus at {a1}: {b1}, at {a2}: {b2}");
        Ok(())
    })
}

/// Spending more on screening shrinks the plausible set: ν₁ < ν₂ gives
/// Γ̂⁺_{ν₂} ⊆ Γ̂⁺_{ν₁}, for the winner and the file drawer.
pub fn plausible_monotone_in_nu(cases: u32) -> Result<(), String> {
    let strategy = (gaussian_case(), 0.001f64..0.2, 0.0f64..0.3, -2.0f64..2.0);
    check(cases, strategy, |((y, noise, seed), nu1, step, threshold)| {
        let nu2 = nu1 + step;
        let s = sampler(&noise, seed);
        let scales = noise.scales();
        let q1 = s.quantile_all(nu1).unwrap().value;
        let q2 = s.quantile_all(nu2).unwrap().value;
        let w1 = plausible_winner_set_scaled(&y, scales, q1, nu1).unwrap();
        let w2 = plausible_winner_set_scaled(&y, scales, q2, nu2).unwrap();
        prop_assert!(w2.indices.iter().all(|i| w1.contains(*i)), "winner {:?} ⊄ {:?}", w2.indices, w1.indices);
        let f1 = plausible_filedrawer_set_scaled(&y, scales, threshold, q1, nu1).unwrap();
        let f2 = plausible_filedrawer_set_scaled(&y, scales, threshold, q2, nu2).unwrap();
        prop_assert!(f2.indices.iter().all(|i| f1.contains(*i)), "file drawer {:?} ⊄ {:?}", f2.indices, f1.indices);
        Ok(())
    })
}

/// The same seed reproduces quantiles and whole harness runs exactly.
pub fn determinism_by_seed(cases: u32) -> Result<(), String> {
    let kinds = prop::sample::select(vec![
        ProblemKind::Figure1,
        ProblemKind::Winner,
        ProblemKind::FileDrawer,
        ProblemKind::WinnerNp,
        ProblemKind::Lasso,
        ProblemKind::Erm,
        ProblemKind::Sphere,
    ]);
    check(cases, (gaussian_case(), kinds, any::<u64>()), |((_, noise, seed), kind, run_seed)| {
        let a = sampler(&noise, seed).quantile_all(0.1).unwrap();
        let b = sampler(&noise, seed).quantile_all(0.1).unwrap();
        prop_assert_eq!(a, b);
        let mut cfg = small_config(kind);
        cfg.seed = run_seed;
        let first = run_experiment(&cfg).unwrap();
        let second = run_experiment(&cfg).unwrap();
        prop_assert_eq!(first, second);
        Ok(())
    })
}

/// One cheap grid cell of `kind`.
fn small_config(kind: ProblemKind) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(kind);
    cfg.trials = 3;
    cfg.n_draws = 1000;
    cfg.theta = vec![2.0];
    cfg.c = vec![10.0];
    match kind {
        ProblemKind::Figure1 => cfg.delta = vec![1.0],
        ProblemKind::Winner | ProblemKind::FileDrawer => {
            cfg.m = vec![10];
            cfg.phi = vec![if kind == ProblemKind::FileDrawer { 5.0 } else { 0.0 }];
        }
        ProblemKind::WinnerNp | ProblemKind::FileDrawerNp => {
            cfg.m = vec![10];
            cfg.n = vec![50];
        }
        ProblemKind::Lasso => {
            cfg.n = vec![40];
            cfg.d = vec![4];
        }
        ProblemKind::Erm => {
            cfg.m = vec![10];
            cfg.n = vec![50];
        }
        ProblemKind::Sphere => cfg.d = vec![3],
    }
    cfg
}

/// The coordinate-descent solution satisfies the KKT conditions.
pub fn kkt_residuals(cases: u32) -> Result<(), String> {
    check(cases, (any::<u64>(), 2usize..8, 10usize..60), |(seed, d, n)| {
        let (design, y, lambda) = lasso_instance(seed, n.max(d + 2), d);
        let fit = lasso_solve(&design, &y, lambda).unwrap();
        let c = design.xt(&y).unwrap();
        let ok = check_kkt(&design, &c, lambda, &fit.beta, &fit.pair);
        prop_assert!(ok.is_ok(), "{ok:?}");
        Ok(())
    })
}

/// Solves the square system by Gaussian elimination with partial pivoting.
fn solve(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let p = (col..n).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[p][col].abs() < 1e-9 {
            return None;
        }
        a.swap(col, p);
        b.swap(col, p);
        for r in 0..n {
            if r != col {
                let f = a[r][col] / a[col][col];
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    Some((0..n).map(|i| b[i] / a[i][i]).collect())
}

fn combinations(k: usize, n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    if k < n {
        return vec![];
    }
    let mut out = combinations(k - 1, n);
    for mut c in combinations(k - 1, n - 1) {
        c.push(k - 1);
        out.push(c);
    }
    out
}

/// Maximum over all vertices of a bounded polyhedron, `None` if empty.
fn vertex_max(c: &[f64], p: &Polyhedron) -> Option<f64> {
    let n = p.dim();
    let mut best: Option<f64> = None;
    for rows in combinations(p.len(), n) {
        let a = rows.iter().map(|&i| p.row(i).to_vec()).collect();
        let b = rows.iter().map(|&i| p.rhs(i)).collect();
        if let Some(v) = solve(a, b) {
            if p.contains(&v, 1e-7) {
                let val: f64 = c.iter().zip(&v).map(|(x, y)| x * y).sum();
                best = Some(best.map_or(val, |b: f64| b.max(val)));
            }
        }
    }
    best
}

/// Objective and a bounded polyhedron: a box cut by random half-spaces.
pub fn lp_instance() -> impl Strategy<Value = (Vec<f64>, Polyhedron)> {
    (1usize..=3).prop_flat_map(|n| {
        (
            prop::collection::vec(-2.0f64..2.0, n),
            prop::collection::vec((prop::collection::vec(-2.0f64..2.0, n), -1.0f64..2.0), 0..=8 - 2 * n),
            prop::collection::vec(0.5f64..3.0, n),
        )
            .prop_map(move |(c, rows, half)| {
                let lower: Vec<f64> = half.iter().map(|h| -h).collect();
                let mut p = Polyhedron::axis_box(&lower, &half).unwrap();
                for (a, b) in rows {
                    p.push(a, b, false).unwrap();
                }
                (c, p)
            })
    })
}

/// The simplex optimum equals the best vertex found by brute force.
pub fn lp_matches_vertex_enumeration(cases: u32) -> Result<(), String> {
    check(cases, lp_instance(), |(c, p)| {
        let r = lp_maximize(&c, &p).unwrap();
        match vertex_max(&c, &p) {
            None => prop_assert_eq!(r.status, LpStatus::Infeasible),
            Some(v) => {
                prop_assert_eq!(r.status, LpStatus::Optimal);
                prop_assert!((r.value - v).abs() < 1e-7, "simplex {} vertices {}", r.value, v);
                prop_assert!(p.contains(&r.witness, 1e-9));
            }
        }
        Ok(())
    })
}
