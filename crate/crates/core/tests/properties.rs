mod common;

use common::props;
use locsim::stats::{GaussianNoise, Interval, MaxStatSampler};
use locsim::winner::{argmax, plausible_winner_set_scaled, winner_interval_with, WinnerProblem};
use locsim::{compose, BudgetSplit, RngSpec, Screening};
use rand::Rng;

#[test]
fn nestedness() {
    props::nestedness(200).unwrap();
}

#[test]
fn alpha_monotonicity() {
    props::alpha_monotonicity(200).unwrap();
}

#[test]
fn plausible_set_shrinks_with_nu() {
    props::plausible_monotone_in_nu(200).unwrap();
}

#[test]
fn determinism_by_seed() {
    props::determinism_by_seed(30).unwrap();
}

#[test]
fn kkt_residuals() {
    props::kkt_residuals(300).unwrap();
}

#[test]
fn composed_winner_matches_direct() {
    for seed in 0..20u64 {
        let mut r = RngSpec::new(seed, 0).rng();
        let m = r.random_range(2..15);
        let y: Vec<f64> = (0..m).map(|_| r.random_range(-4.0..4.0)).collect();
        let noise = if seed % 2 == 0 { GaussianNoise::identity(m) } else { GaussianNoise::rbf(m, 2.0).unwrap() };
        let budget = BudgetSplit::new(0.1, 0.01).unwrap();
        let sampler = MaxStatSampler::new(&noise, RngSpec::new(seed, 1), 5000).unwrap();
        let scales = noise.scales().to_vec();

        let procedure = compose(
            |y: &[f64], nu: f64| {
                let q = sampler.quantile_all(nu)?.value;
                let set = plausible_winner_set_scaled(y, &scales, q, nu)?;
                Ok(Screening { selection: vec![argmax(y)?], plausible: set.indices, margin: set.margin })
            },
            |y: &[f64], selection: &[usize], plausible: &[usize], level: f64| {
                let q = sampler.quantile(plausible, level)?.value;
                Ok(selection.iter().map(|&i| Interval::symmetric(y[i], q * scales[i])).collect::<Vec<_>>())
            },
            budget,
        );
        let (plan, composed) = procedure.run(&y[..]).unwrap();
        assert!((plan.spent() - 0.1).abs() < 1e-15);

        let direct = winner_interval_with(&WinnerProblem::new(y.clone(), noise, budget).unwrap(), &sampler).unwrap();
        assert_eq!(plan.plausible, direct.plausible.indices, "seed {seed}");
        assert_eq!(plan.selection, direct.selection, "seed {seed}");
        assert_eq!(composed, vec![direct.intervals.entries[0].1], "seed {seed}");
    }
}
