//! Simulation harness: configuration, scenario grids, and CSV reporting.
//!
//! A run sweeps the grid of its [`ExperimentConfig`], simulates `trials` data
//! sets per grid cell, applies every requested method, and reduces each
//! (cell, method) pair to one [`ResultRow`]: the 5%, 50% and 95% quantiles of
//! interval width and the empirical coverage.
//!
//! Mean profiles come from [`generate_mu`]. For the Gaussian winner and
//! file-drawer grids the profile is rescaled to range C at m = 10 and that
//! scale is kept for larger m, so growing m only appends candidates far below
//! the maximum ([`generate_mu_reference`]).
//!
//! Every random draw is addressed by `(seed, cell, trial)`, so a run is a pure
//! function of its configuration.

mod config;
mod profile;
mod scenarios;

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use config::{ExperimentConfig, SEED_ENV};
pub use profile::{generate_mu, generate_mu_reference, REFERENCE_M};
pub use scenarios::{evaluate_data, read_samples, DataReport, MethodIntervals, MethodTrials};

/// Problem families the harness can simulate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ProblemKind {
    /// Two candidates, mean gap Δ.
    Figure1,
    Winner,
    FileDrawer,
    WinnerNp,
    FileDrawerNp,
    Lasso,
    Erm,
    Sphere,
}

impl ProblemKind {
    pub const ALL: [ProblemKind; 8] = [
        ProblemKind::Figure1,
        ProblemKind::Winner,
        ProblemKind::FileDrawer,
        ProblemKind::WinnerNp,
        ProblemKind::FileDrawerNp,
        ProblemKind::Lasso,
        ProblemKind::Erm,
        ProblemKind::Sphere,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProblemKind::Figure1 => "figure1",
            ProblemKind::Winner => "winner",
            ProblemKind::FileDrawer => "filedrawer",
            ProblemKind::WinnerNp => "winner-np",
            ProblemKind::FileDrawerNp => "filedrawer-np",
            ProblemKind::Lasso => "lasso",
            ProblemKind::Erm => "erm",
            ProblemKind::Sphere => "sphere",
        }
    }

    /// Methods with a definition for this problem. Conditional inference is
    /// only available for a single winner; for Gaussian data it further
    /// needs independent noise, which is checked per grid cell.
    pub fn methods(self) -> &'static [Method] {
        use Method::*;
        match self {
            ProblemKind::Figure1 | ProblemKind::Winner | ProblemKind::WinnerNp => {
                &[Local, Simultaneous, Conditional, Nominal]
            }
            ProblemKind::FileDrawer | ProblemKind::FileDrawerNp | ProblemKind::Lasso | ProblemKind::Sphere => {
                &[Local, Simultaneous, Nominal]
            }
            ProblemKind::Erm => &[Local, Simultaneous],
        }
    }

    pub fn defines(self, method: Method) -> bool {
        self.methods().contains(&method)
    }
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::config(format!("unknown problem kind `{s}`")))
    }
}

/// Inference methods compared by the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Locally simultaneous: screen at ν, correct at α − ν over the plausible set.
    Local,
    /// Simultaneous over every possible target at α.
    Simultaneous,
    /// Truncated-Gaussian inference conditional on the selection event.
    Conditional,
    /// Unadjusted intervals at α.
    Nominal,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Local => "local",
            Method::Simultaneous => "simultaneous",
            Method::Conditional => "conditional",
            Method::Nominal => "nominal",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Method::Local, Method::Simultaneous, Method::Conditional, Method::Nominal]
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::config(format!("unknown method `{s}`")))
    }
}

/// One (grid cell, method) summary. Unused parameters and statistics that
/// are undefined for the run (e.g. widths when nothing was ever selected, or
/// coverage on user data) are empty in the CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub scenario: String,
    pub method: String,
    pub param_theta: Option<f64>,
    #[serde(rename = "param_C")]
    pub param_c: Option<f64>,
    pub param_m: Option<usize>,
    pub param_phi: Option<f64>,
    pub median_width: Option<f64>,
    pub q05_width: Option<f64>,
    pub q95_width: Option<f64>,
    pub coverage: Option<f64>,
    pub runtime_ms: Option<f64>,
}

/// The exact CSV header.
pub const CSV_HEADER: &str =
    "scenario,method,param_theta,param_C,param_m,param_phi,median_width,q05_width,q95_width,coverage,runtime_ms";

pub fn write_csv<W: Write>(rows: &[ResultRow], writer: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
    w.write_record(CSV_HEADER.split(','))?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(reader: R) -> Result<Vec<ResultRow>> {
    let mut r = csv::Reader::from_reader(reader);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header.join(",") != CSV_HEADER {
        return Err(Error::config(format!("unexpected CSV header `{}`", header.join(","))));
    }
    r.deserialize().map(|row| row.map_err(Error::from)).collect()
}

/// (q05, median, q95) with linear interpolation between order statistics;
/// `None` for an empty sample. Infinite widths sort last and propagate.
pub fn width_quantiles(widths: &[f64]) -> Option<(f64, f64, f64)> {
    if widths.is_empty() {
        return None;
    }
    let mut v = widths.to_vec();
    v.sort_by(f64::total_cmp);
    let at = |p: f64| {
        let h = p * (v.len() - 1) as f64;
        let lo = h.floor() as usize;
        let frac = h - lo as f64;
        if frac == 0.0 || lo + 1 >= v.len() {
            return v[lo];
        }
        let (a, b) = (v[lo], v[lo + 1]);
        if a == b {
            a
        } else if b.is_infinite() {
            b
        } else {
            a + frac * (b - a)
        }
    };
    Some((at(0.05), at(0.5), at(0.95)))
}

/// Runs the configured grid and returns one row per (cell, method).
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    if config.data.is_some() {
        config.validate()?;
        return Ok(evaluate_data(config)?.rows);
    }
    Ok(run_trials(config)?.into_iter().map(|t| t.row).collect())
}

/// Like [`run_experiment`] but keeps every trial's width and coverage, for
/// paired comparisons between methods. Ignores `config.data`.
pub fn run_trials(config: &ExperimentConfig) -> Result<Vec<MethodTrials>> {
    config.validate()?;
    scenarios::run(config)
}

/// Coverage study: the same simulation as [`run_experiment`], with the
/// coverage column as the quantity of interest. Coverage counts a trial as
/// covered when every reported interval contains its target; trials with an
/// empty selection are covered vacuously.
pub fn run_coverage(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    run_experiment(config)
}

/// Writes rows to `config.out` if set.
pub fn write_output(config: &ExperimentConfig, rows: &[ResultRow]) -> Result<()> {
    if let Some(path) = &config.out {
        let file = std::fs::File::create(path)?;
        write_csv(rows, std::io::BufWriter::new(file))?;
    }
    Ok(())
}
