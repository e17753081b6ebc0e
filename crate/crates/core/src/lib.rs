//! Locally simultaneous inference.
//!
//! Selective inference by screening first and correcting second: a small part
//! `ν` of the error budget builds a data-dependent set of plausible targets,
//! and a simultaneous correction at level `α − ν` is taken over that set only.
//! The crate covers inference on the winner and the file-drawer problem
//! (Gaussian and bounded nonparametric), post-LASSO inference via polyhedral
//! model enumeration, localized risk bounds for empirical risk minimizers, and
//! inference on a data-chosen direction on the sphere.

pub mod erm;
pub mod error;
pub mod harness;
pub mod lasso;
pub mod lp;
pub mod rng;
pub mod sphere;
pub mod stats;
pub mod theory;
pub mod winner;

pub use error::{Error, Result};
pub use rng::RngSpec;
pub use theory::{compose, BudgetSplit, ScreenCorrectPlan, Screening};
