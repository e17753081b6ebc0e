//! The screen-then-correct skeleton shared by every concrete procedure.
//!
//! A procedure spends `ν` of the error budget on a screening step that yields
//! the plausible targets, then runs a nested simultaneous correction at level
//! `α − ν` over exactly those targets. This module carries no statistics of
//! its own; it enforces the budget split and the containment of the realized
//! selection in the plausible set.

use std::collections::BTreeSet;

use crate::error::{Error, Result};

/// Error level α and screening budget ν with 0 < ν < α < 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BudgetSplit {
    alpha: f64,
    nu: f64,
}

impl BudgetSplit {
    pub fn new(alpha: f64, nu: f64) -> Result<Self> {
        if !(nu > 0.0 && nu < alpha && alpha < 1.0) {
            return Err(Error::Budget { alpha, nu });
        }
        Ok(Self { alpha, nu })
    }

    /// ν = 0.1·α: a tenth of the budget for screening, the rest for inference.
    pub fn with_default_nu(alpha: f64) -> Result<Self> {
        Self::new(alpha, 0.1 * alpha)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// α − ν, the level of the final simultaneous correction.
    pub fn inference_level(&self) -> f64 {
        self.alpha - self.nu
    }
}

/// Output of a screening step.
#[derive(Debug, Clone, PartialEq)]
pub struct Screening<T> {
    /// Targets actually selected on the observed data.
    pub selection: Vec<T>,
    /// Targets plausibly selected on nearby data.
    pub plausible: Vec<T>,
    /// Additive slack used to form the plausible set, in the procedure's units.
    pub margin: f64,
}

/// Audit record of one screen-then-correct run.
#[derive(Debug, Clone, PartialEq)]
pub struct ScreenCorrectPlan<T> {
    pub budget: BudgetSplit,
    pub screening_margin: f64,
    pub inference_level: f64,
    pub selection: Vec<T>,
    pub plausible: Vec<T>,
}

impl<T: Ord + Clone + std::fmt::Debug> ScreenCorrectPlan<T> {
    pub fn new(budget: BudgetSplit, screening: Screening<T>) -> Result<Self> {
        let plausible: BTreeSet<&T> = screening.plausible.iter().collect();
        if let Some(missing) = screening.selection.iter().find(|t| !plausible.contains(t)) {
            return Err(Error::Solver(format!(
                "screening dropped selected target {missing:?} from the plausible set"
            )));
        }
        Ok(Self {
            budget,
            screening_margin: screening.margin,
            inference_level: budget.inference_level(),
            selection: screening.selection,
            plausible: screening.plausible,
        })
    }

    /// Screening and inference spend exactly α between them.
    pub fn spent(&self) -> f64 {
        self.budget.nu() + self.inference_level
    }
}

/// A locally simultaneous procedure assembled by [`compose`].
pub struct LocalProcedure<S, C> {
    screen: S,
    correct: C,
    budget: BudgetSplit,
}

impl<S, C> LocalProcedure<S, C> {
    pub fn budget(&self) -> BudgetSplit {
        self.budget
    }

    /// Screens at ν, then corrects at α − ν over the plausible set.
    pub fn run<D: ?Sized, T, O>(&self, data: &D) -> Result<(ScreenCorrectPlan<T>, O)>
    where
        S: Fn(&D, f64) -> Result<Screening<T>>,
        C: Fn(&D, &[T], &[T], f64) -> Result<O>,
        T: Ord + Clone + std::fmt::Debug,
    {
        let screening = (self.screen)(data, self.budget.nu())?;
        let plan = ScreenCorrectPlan::new(self.budget, screening)?;
        let out = (self.correct)(data, &plan.selection, &plan.plausible, plan.inference_level)?;
        Ok((plan, out))
    }
}

/// Combines a screening rule (data, ν) ↦ [`Screening`] with a nested
/// simultaneous correction (data, selection, plausible, level) ↦ output.
pub fn compose<S, C>(screen: S, correct: C, budget: BudgetSplit) -> LocalProcedure<S, C> {
    LocalProcedure { screen, correct, budget }
}
