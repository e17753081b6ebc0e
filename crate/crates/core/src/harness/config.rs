//! Flat `key = value` experiment configuration.
//!
//! One setting per line, `#` starts a comment, list values are comma
//! separated. Unknown keys are rejected so that typos do not silently fall
//! back to defaults. `LOCSIM_SEED` in the environment overrides `seed`.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::str::FromStr;

use super::{Method, ProblemKind};
use crate::error::{Error, Result};
use crate::stats::DEFAULT_N_DRAWS;

pub const SEED_ENV: &str = "LOCSIM_SEED";

/// Every setting of one simulation run. Grid-valued fields are swept as a
/// Cartesian product by the harness; fields a problem kind does not use are
/// ignored.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub kind: ProblemKind,
    /// Shape exponent of the mean profile.
    pub theta: Vec<f64>,
    /// Range of the mean profile.
    pub c: Vec<f64>,
    /// Number of candidates (hypotheses for `erm`).
    pub m: Vec<usize>,
    /// RBF kernel scale of the noise; 0 means independent noise.
    pub phi: Vec<f64>,
    /// Gap between the two means in the two-candidate scenario.
    pub delta: Vec<f64>,
    /// Samples per candidate (nonparametric), rows of the design (lasso), or
    /// loss evaluations (erm).
    pub n: Vec<usize>,
    /// Number of regressors (lasso) or ambient dimension (sphere).
    pub d: Vec<usize>,
    /// Norm of the mean vector in the sphere scenario.
    pub mu_norm: Vec<f64>,
    /// File-drawer threshold T.
    pub threshold: f64,
    /// λ = λ₀·√(2 log(e·d)).
    pub lambda0: f64,
    /// Fraction of nonzero coefficients in the sparse lasso design.
    pub sparsity: Vec<f64>,
    /// Signal strength ε/λ of the dense lasso design; when nonempty it
    /// replaces the sparse design.
    pub eps_ratio: Vec<f64>,
    pub beta_a: f64,
    pub beta_b: f64,
    pub alpha: f64,
    pub nu: f64,
    pub trials: usize,
    pub seed: u64,
    pub n_draws: usize,
    pub p_max: usize,
    /// `None` runs every method defined for the problem kind.
    pub methods: Option<Vec<Method>>,
    /// Record wall-clock time per row. Off by default so that output files
    /// are byte-identical across runs.
    pub timing: bool,
    pub out: Option<PathBuf>,
    /// User data (observation CSV for the nonparametric kinds, loss CSV for
    /// `erm`); replaces simulation with a single evaluation.
    pub data: Option<PathBuf>,
}

impl ExperimentConfig {
    /// Defaults for a problem kind, following the simulation grids of the
    /// accompanying experiments at α = 0.1, ν = 0.1·α.
    pub fn new(kind: ProblemKind) -> Self {
        let mut cfg = Self {
            kind,
            theta: vec![0.5, 1.0, 2.0, 4.0],
            c: vec![10.0, 30.0, 50.0, 70.0],
            m: vec![10, 100, 1000, 10000],
            phi: vec![0.0],
            delta: (0..=10).map(f64::from).collect(),
            n: vec![],
            d: vec![],
            mu_norm: vec![3.0],
            threshold: -1.0,
            lambda0: 6.0,
            sparsity: vec![0.5],
            eps_ratio: vec![],
            beta_a: 2.0,
            beta_b: 5.0,
            alpha: 0.1,
            nu: 0.01,
            trials: 100,
            seed: 0,
            n_draws: DEFAULT_N_DRAWS,
            p_max: crate::lasso::DEFAULT_P_MAX,
            methods: None,
            timing: false,
            out: None,
            data: None,
        };
        match kind {
            ProblemKind::FileDrawer => {
                cfg.m = vec![10, 100];
                cfg.phi = vec![1.0, 5.0, 10.0, 20.0];
            }
            ProblemKind::WinnerNp | ProblemKind::FileDrawerNp => {
                cfg.c = vec![20.0];
                cfg.m = vec![50];
                cfg.n = vec![100, 1000];
                cfg.threshold = 0.8;
            }
            ProblemKind::Lasso => {
                cfg.n = vec![200];
                cfg.d = vec![8];
                cfg.n_draws = 20_000;
            }
            ProblemKind::Erm => {
                cfg.theta = vec![1.0];
                cfg.m = vec![50];
                cfg.n = vec![400];
                cfg.n_draws = 2_000;
            }
            ProblemKind::Sphere => {
                cfg.d = vec![3, 5];
                cfg.n_draws = 20_000;
            }
            ProblemKind::Figure1 | ProblemKind::Winner => {}
        }
        cfg
    }

    /// Parses configuration text on top of the defaults for its `kind`.
    ///
    /// `fallback_kind` is used when the text has no `kind` line.
    pub fn parse(text: &str, fallback_kind: Option<ProblemKind>) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::config(format!("line {}: expected `key = value`, got `{line}`", lineno + 1)))?;
            let key = key.trim().to_string();
            if entries.insert(key.clone(), value.trim().to_string()).is_some() {
                return Err(Error::config(format!("line {}: duplicate key `{key}`", lineno + 1)));
            }
        }
        let kind = match entries.remove("kind") {
            Some(v) => v.parse()?,
            None => fallback_kind.ok_or_else(|| Error::config("configuration has no `kind`"))?,
        };
        let mut cfg = Self::new(kind);
        for (key, value) in &entries {
            cfg.set(key, value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "theta" => self.theta = list(key, value)?,
            "C" | "c" => self.c = list(key, value)?,
            "m" => self.m = list(key, value)?,
            "phi" => self.phi = list(key, value)?,
            "delta" => self.delta = list(key, value)?,
            "n" => self.n = list(key, value)?,
            "d" => self.d = list(key, value)?,
            "mu_norm" => self.mu_norm = list(key, value)?,
            "T" | "threshold" => self.threshold = scalar(key, value)?,
            "lambda0" => self.lambda0 = scalar(key, value)?,
            "sparsity" | "s" => self.sparsity = list(key, value)?,
            "eps_ratio" => self.eps_ratio = list(key, value)?,
            "beta_a" => self.beta_a = scalar(key, value)?,
            "beta_b" => self.beta_b = scalar(key, value)?,
            "alpha" => self.alpha = scalar(key, value)?,
            "nu" => self.nu = scalar(key, value)?,
            "trials" => self.trials = scalar(key, value)?,
            "seed" => self.seed = scalar(key, value)?,
            "n_draws" => self.n_draws = scalar(key, value)?,
            "p_max" => self.p_max = scalar(key, value)?,
            "methods" => self.methods = Some(list(key, value)?),
            "timing" => self.timing = scalar(key, value)?,
            "out" => self.out = Some(PathBuf::from(value)),
            "data" => self.data = Some(PathBuf::from(value)),
            "kind" => self.kind = value.parse()?,
            _ => return Err(Error::config(format!("unknown configuration key `{key}`"))),
        }
        Ok(())
    }

    /// Applies `LOCSIM_SEED` if it is set.
    pub fn apply_env(&mut self) -> Result<()> {
        if let Ok(v) = std::env::var(SEED_ENV) {
            self.seed = scalar(SEED_ENV, v.trim())?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.nu > 0.0 && self.nu < self.alpha && self.alpha < 1.0) {
            return Err(Error::config(format!(
                "need 0 < nu < alpha < 1, got alpha = {}, nu = {}",
                self.alpha, self.nu
            )));
        }
        if self.trials == 0 {
            return Err(Error::config("trials must be at least 1"));
        }
        positive("theta", &self.theta)?;
        positive("C", &self.c)?;
        nonnegative("delta", &self.delta)?;
        nonnegative("mu_norm", &self.mu_norm)?;
        nonnegative("phi", &self.phi)?;
        positive("sparsity", &self.sparsity)?;
        positive("eps_ratio", &self.eps_ratio)?;
        if self.m.iter().any(|&m| m < 2) {
            return Err(Error::config("m must be at least 2"));
        }
        if !(self.beta_a > 0.0 && self.beta_b > 0.0) {
            return Err(Error::config("beta_a and beta_b must be positive"));
        }
        if !(self.lambda0 > 0.0) {
            return Err(Error::config("lambda0 must be positive"));
        }
        if self.threshold.is_nan() {
            return Err(Error::config("T must be a number"));
        }
        if self.n_draws < crate::stats::MIN_N_DRAWS {
            return Err(Error::config(format!("n_draws must be at least {}", crate::stats::MIN_N_DRAWS)));
        }
        if let Some(methods) = &self.methods {
            if methods.is_empty() {
                return Err(Error::config("methods list is empty"));
            }
            for &method in methods {
                if !self.kind.defines(method) {
                    return Err(Error::config(format!(
                        "method `{method}` is not defined for problem `{}`",
                        self.kind
                    )));
                }
            }
        }
        Ok(())
    }
}

fn scalar<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| Error::config(format!("`{key}`: cannot parse `{value}`")))
}

fn list<T: FromStr>(key: &str, value: &str) -> Result<Vec<T>> {
    value
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(|s| scalar(key, s))
        .collect()
}

fn positive(key: &str, values: &[f64]) -> Result<()> {
    if values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::config(format!("`{key}` values must be positive")));
    }
    Ok(())
}

fn nonnegative(key: &str, values: &[f64]) -> Result<()> {
    if values.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
        return Err(Error::config(format!("`{key}` values must be nonnegative")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_lists_comments_and_kind() {
        let cfg = ExperimentConfig::parse(
            "kind = winner\n# grid\ntheta = 0.5, 4\nC=10\nm = 10,100 # two sizes\nphi = 0, 20\ntrials=7\nseed = 42\n",
            None,
        )
        .unwrap();
        assert_eq!(cfg.kind, ProblemKind::Winner);
        assert_eq!(cfg.theta, vec![0.5, 4.0]);
        assert_eq!(cfg.c, vec![10.0]);
        assert_eq!(cfg.m, vec![10, 100]);
        assert_eq!(cfg.phi, vec![0.0, 20.0]);
        assert_eq!(cfg.trials, 7);
        assert_eq!(cfg.seed, 42);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ExperimentConfig::parse("kind = winner\nbogus = 1", None).is_err());
        assert!(ExperimentConfig::parse("theta = 1", None).is_err());
        assert!(ExperimentConfig::parse("kind = winner\ntrials = 0", None).is_err());
        assert!(ExperimentConfig::parse("kind = winner\nnu = 0.2", None).is_err());
        assert!(ExperimentConfig::parse("kind = winner\ntheta = -1", None).is_err());
        assert!(ExperimentConfig::parse("kind = winner\ntheta", None).is_err());
        assert!(ExperimentConfig::parse("kind = winner\nm = 1", None).is_err());
        assert!(ExperimentConfig::parse("kind = nope", None).is_err());
        assert!(ExperimentConfig::parse("kind = winner\nseed = 1\nseed = 2", None).is_err());
    }

    #[test]
    fn refuses_undefined_methods() {
        let err = ExperimentConfig::parse("kind = filedrawer\nmethods = local, conditional", None).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("conditional") && msg.contains("filedrawer"), "{msg}");
        assert!(ExperimentConfig::parse("kind = winner\nmethods = local, conditional", None).is_ok());
    }

    #[test]
    fn fallback_kind() {
        let cfg = ExperimentConfig::parse("trials = 3", Some(ProblemKind::Sphere)).unwrap();
        assert_eq!(cfg.kind, ProblemKind::Sphere);
        assert_eq!(cfg.d, vec![3, 5]);
    }
}
