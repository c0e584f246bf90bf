use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use cqed_pairs::config::{ConfigError, ExperimentConfig};
use cqed_pairs::experiment::{run_experiment, write_run, RunError};
use cqed_pairs::format::num;
use cqed_pairs::sweep::{run_sweep, write_sweep};
use cqed_pairs::{checks, Scheme};

/// Cavity-QED polarization-entangled photon pair simulator.
#[derive(Parser)]
#[command(name = "cqed-pairs", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a single experiment and write the time series and summary CSVs.
    Run(Common),
    /// Run the parameter grid described by the `sweep.*` keys.
    Sweep(Common),
    /// Run the analytic-oracle self-test suite.
    Check(Common),
}

#[derive(Args)]
struct Common {
    /// Configuration file (required for `run` and `sweep`).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Master seed, overrides `seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Number of trajectories, overrides `n_traj`.
    #[arg(long)]
    traj: Option<usize>,
    /// Also write SVG plots.
    #[arg(long)]
    svg: bool,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long)]
    workers: Option<usize>,
}

enum Failure {
    Config(ConfigError),
    Runtime(String),
}

impl From<RunError> for Failure {
    fn from(e: RunError) -> Self {
        match e {
            RunError::Config(c) => Failure::Config(c),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        Failure::Config(e)
    }
}

fn load(common: &Common) -> Result<ExperimentConfig, Failure> {
    let path =
        common.config.as_deref().ok_or_else(|| ConfigError::Inconsistent("`--config <path>` is required".into()))?;
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(n) = common.traj {
        if n == 0 {
            return Err(ConfigError::Inconsistent("--traj must be at least 1".into()).into());
        }
        cfg.n_traj = n;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn report(paths: &[PathBuf]) {
    for p in paths {
        println!("wrote {}", p.display());
    }
}

fn run(common: &Common) -> Result<(), Failure> {
    let cfg = load(common)?;
    let scheme: Scheme = cfg.scheme.ok_or_else(|| ConfigError::Inconsistent("`run` needs the `scheme` key".into()))?;
    let result = run_experiment(&cfg, scheme)?;
    let s = &result.summary;
    println!(
        "{scheme} ({}): F = {} at t = {}, S_fixed = {}, S_optimal = {}, p_coinc = {}",
        cfg.method.name(),
        num(s.f),
        num(s.t_star),
        num(s.s_fixed),
        num(s.s_optimal),
        num(s.p_coinc)
    );
    report(&write_run(&common.out, &cfg, &result, common.svg)?);
    Ok(())
}

fn sweep(common: &Common) -> Result<(), Failure> {
    let cfg = load(common)?;
    let result = run_sweep(&cfg)?;
    println!("{} grid points", result.rows.len());
    report(&write_sweep(&common.out, &cfg, &result, common.svg)?);
    Ok(())
}

fn write_checks(dir: &Path, results: &[checks::Check]) -> Result<PathBuf, Failure> {
    let io = |p: &Path, e: std::io::Error| Failure::Runtime(format!("cannot write {}: {e}", p.display()));
    std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let path = dir.join("check.csv");
    let mut w = csv::Writer::from_path(&path).map_err(|e| io(&path, e.into()))?;
    let mut rows = vec![["check".to_string(), "passed".into(), "detail".into()]];
    rows.extend(results.iter().map(|c| [c.name.to_string(), c.passed.to_string(), c.detail.clone()]));
    for r in rows {
        w.write_record(&r).map_err(|e| io(&path, e.into()))?;
    }
    w.flush().map_err(|e| io(&path, e))?;
    Ok(path)
}

fn check(common: &Common) -> Result<(), Failure> {
    if common.config.is_some() {
        load(common)?;
    }
    let mut results = checks::all();
    if common.seed.is_some() || common.traj.is_some() {
        let n = common.traj.unwrap_or(10_000);
        let name = "Exponential jump-time CDF";
        let c = match checks::jump_cdf_sigmas(n, common.seed.unwrap_or(2024)) {
            Ok(s) => checks::Check {
                name,
                passed: s <= 3.0,
                detail: format!("{n} trajectories, worst {s:.2} sigma (bound 3)"),
            },
            Err(e) => checks::Check { name, passed: false, detail: format!("error: {e}") },
        };
        results.pop();
        results.push(c);
    }
    for c in &results {
        println!("[{}] {}: {}", if c.passed { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    report(&[write_checks(&common.out, &results)?]);
    if results.iter().all(|c| c.passed) {
        Ok(())
    } else {
        Err(Failure::Runtime(format!(
            "{} of {} checks failed",
            results.iter().filter(|c| !c.passed).count(),
            results.len()
        )))
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let common = match &cli.command {
        Command::Run(c) | Command::Sweep(c) | Command::Check(c) => c,
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = common.workers {
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(2);
        }
    };
    let outcome = pool.install(|| match &cli.command {
        Command::Run(c) => run(c),
        Command::Sweep(c) => sweep(c),
        Command::Check(c) => check(c),
    });
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(e)) => {
            eprintln!("config error: {e}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
