//! `locsim`: simulation grids and data evaluation for locally simultaneous
//! inference. Results go to CSV (`--out`, or stdout); data evaluations also
//! print the intervals as JSON.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use locsim::harness::{self, ExperimentConfig, ProblemKind};
use locsim::Error;

#[derive(Parser)]
#[command(name = "locsim", version, about = "Locally simultaneous inference experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Two candidates with mean gap Δ over a grid of Δ.
    Figure1(Common),
    /// Inference on the winner with Gaussian noise.
    Winner(Common),
    /// File-drawer inference with Gaussian noise.
    Filedrawer(Common),
    /// Inference on the winner from bounded samples (simulated, or `--data`).
    WinnerNp(Common),
    /// File-drawer inference from bounded samples (simulated, or `--data`).
    FiledrawerNp(Common),
    /// Inference after LASSO selection.
    Lasso(Common),
    /// Risk bounds for an empirical risk minimizer (simulated, or `--data`).
    Erm(Common),
    /// Inference on the norm of the mean along the observed direction.
    Sphere(Common),
    /// Coverage study of the problem named by `kind` in the configuration
    /// (2000 trials unless configured).
    Coverage(Common),
}

#[derive(Args)]
struct Common {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output CSV path; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    nu: Option<f64>,
    /// Observation CSV (nonparametric kinds) or loss CSV (erm).
    #[arg(long)]
    data: Option<PathBuf>,
    /// Problem kind for `coverage` when the configuration has none.
    #[arg(long)]
    kind: Option<String>,
}

const COVERAGE_TRIALS: usize = 2000;

fn build_config(kind: Option<ProblemKind>, args: &Common, coverage: bool) -> Result<ExperimentConfig, Error> {
    let cli_kind = args.kind.as_deref().map(str::parse::<ProblemKind>).transpose()?;
    let fallback = kind.or(cli_kind);
    let (mut cfg, trials_set) = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            let cfg = ExperimentConfig::parse(&text, fallback)?;
            let trials_set = text.lines().any(|l| l.split('#').next().unwrap_or("").trim_start().starts_with("trials"));
            (cfg, trials_set)
        }
        None => {
            let kind = fallback.ok_or_else(|| Error::Config("coverage needs a kind (--kind or `kind =` in --config)".into()))?;
            (ExperimentConfig::new(kind), false)
        }
    };
    if let Some(k) = kind {
        if cfg.kind != k {
            return Err(Error::Config(format!("configuration is for `{}` but the subcommand is `{k}`", cfg.kind)));
        }
    }
    if let Some(k) = cli_kind {
        if cfg.kind != k {
            return Err(Error::Config(format!("--kind {k} conflicts with configured kind `{}`", cfg.kind)));
        }
    }
    if coverage && !trials_set {
        cfg.trials = COVERAGE_TRIALS;
    }
    cfg.apply_env()?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = args.trials {
        cfg.trials = trials;
    }
    if let Some(alpha) = args.alpha {
        cfg.alpha = alpha;
        if args.nu.is_none() && cfg.nu >= alpha {
            cfg.nu = 0.1 * alpha;
        }
    }
    if let Some(nu) = args.nu {
        cfg.nu = nu;
    }
    if let Some(out) = &args.out {
        cfg.out = Some(out.clone());
    }
    if let Some(data) = &args.data {
        cfg.data = Some(data.clone());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<(), Error> {
    let (kind, args, coverage) = match &cli.command {
        Command::Figure1(a) => (Some(ProblemKind::Figure1), a, false),
        Command::Winner(a) => (Some(ProblemKind::Winner), a, false),
        Command::Filedrawer(a) => (Some(ProblemKind::FileDrawer), a, false),
        Command::WinnerNp(a) => (Some(ProblemKind::WinnerNp), a, false),
        Command::FiledrawerNp(a) => (Some(ProblemKind::FileDrawerNp), a, false),
        Command::Lasso(a) => (Some(ProblemKind::Lasso), a, false),
        Command::Erm(a) => (Some(ProblemKind::Erm), a, false),
        Command::Sphere(a) => (Some(ProblemKind::Sphere), a, false),
        Command::Coverage(a) => (None, a, true),
    };
    if kind.is_some() && args.kind.is_some() {
        return Err(Error::Config("--kind is only used by `coverage`".into()));
    }
    let cfg = build_config(kind, args, coverage)?;
    let rows = if cfg.data.is_some() {
        let report = harness::evaluate_data(&cfg)?;
        let json = serde_json::to_string_pretty(&report).map_err(|e| Error::Config(format!("json: {e}")))?;
        if cfg.out.is_some() {
            println!("{json}");
        } else {
            eprintln!("{json}");
        }
        report.rows
    } else if coverage {
        harness::run_coverage(&cfg)?
    } else {
        harness::run_experiment(&cfg)?
    };
    match &cfg.out {
        Some(_) => harness::write_output(&cfg, &rows)?,
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            harness::write_csv(&rows, &mut lock)?;
            lock.flush()?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("locsim: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
