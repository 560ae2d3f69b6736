//! Command-line parsing and dispatch. Exit codes: 0 success, 1 failed
//! verification or runtime error, 2 usage or configuration error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::config::{load_config, Config};
use crate::diameter::run_diameter;
use crate::error::{write_file, AppError, AppResult};
use crate::image::{image_csv, image_svg, run_image_bound};
use crate::selftest::run_selftest;
use crate::suite::run_discrete_suite;
use crate::sweep::{run_gaussian_sweep, sweep_csv, sweep_svg};

#[derive(Debug, Parser)]
#[command(name = "augbound", version, about = "Generalization bounds for learning with data augmentation")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// JSON configuration file; defaults are used for missing fields.
    #[arg(long, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Seed for every stochastic step of the subcommand.
    #[arg(long, value_name = "INT")]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long, value_name = "DIR", default_value = "out")]
    pub out: PathBuf,
    /// Worker threads (default: logical cores).
    #[arg(long, value_name = "INT")]
    pub jobs: Option<usize>,
    /// Override a config value by dotted path, e.g. pipeline.experiment.n_augment=10.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub set: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Closed-form Gaussian bound terms over the t², n and m grids (CSV and SVG).
    GaussianSweep(Common),
    /// Exact checks on seeded finite worlds (JSON report).
    DiscreteVerify {
        #[command(flatten)]
        common: Common,
        /// Instances per check.
        #[arg(long, value_name = "INT")]
        trials: Option<usize>,
    },
    /// Image experiment across augmentation strengths (report, CSV, SVG).
    ImageBound(Common),
    /// Group diameter estimates (JSON report).
    Diameter(Common),
    /// MINE and density-ratio KL on problems with known answers.
    EstimatorSelftest(Common),
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> AppResult<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    write_file(path, &bytes)
}

fn emit(path: PathBuf, bytes: &[u8], written: &mut Vec<PathBuf>) -> AppResult<()> {
    write_file(&path, bytes)?;
    written.push(path);
    Ok(())
}

fn emit_json<T: Serialize>(path: PathBuf, value: &T, written: &mut Vec<PathBuf>) -> AppResult<()> {
    write_json(&path, value)?;
    written.push(path);
    Ok(())
}

fn jobs(common: &Common) -> usize {
    common.jobs.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get())).max(1)
}

/// Runs a parsed command; returns whether its verification passed and the files written.
pub fn dispatch(command: &Command) -> AppResult<(bool, Vec<PathBuf>)> {
    let common = match command {
        Command::GaussianSweep(c) | Command::ImageBound(c) | Command::Diameter(c) | Command::EstimatorSelftest(c) => c,
        Command::DiscreteVerify { common, .. } => common,
    };
    let mut cfg: Config = load_config(common.config.as_deref(), &common.set)?;
    let out = &common.out;
    let mut written = Vec::new();
    let pass = match command {
        Command::GaussianSweep(_) => {
            let rows = run_gaussian_sweep(&cfg.gaussian)?;
            emit(out.join("sweep.csv"), sweep_csv(&rows).as_bytes(), &mut written)?;
            if cfg.gaussian.svg {
                emit(out.join("figure.svg"), sweep_svg(&rows).as_bytes(), &mut written)?;
            }
            true
        }
        Command::DiscreteVerify { trials, .. } => {
            if let Some(seed) = common.seed {
                cfg.discrete.seed = seed;
            }
            if let Some(t) = trials {
                cfg.discrete.trials = *t;
            }
            let report = run_discrete_suite(&cfg.discrete)?;
            emit_json(out.join("discrete_report.json"), &report, &mut written)?;
            for c in report.checks.iter().filter(|c| !c.pass) {
                eprintln!("check failed: {} ({} of {})", c.name, c.failures, c.trials);
            }
            report.pass
        }
        Command::ImageBound(_) => {
            if let Some(seed) = common.seed {
                cfg.pipeline.experiment.seed = seed;
            }
            let report = run_image_bound(&cfg.pipeline, jobs(common))?;
            emit_json(out.join("report.json"), &report, &mut written)?;
            emit(out.join("sweep.csv"), image_csv(&report).as_bytes(), &mut written)?;
            emit(out.join("figure.svg"), image_svg(&report).as_bytes(), &mut written)?;
            true
        }
        Command::Diameter(_) => {
            if let Some(seed) = common.seed {
                cfg.diameter.seed = seed;
            }
            let report = run_diameter(&cfg.diameter, &cfg.pipeline.data)?;
            emit_json(out.join("diameter.json"), &report, &mut written)?;
            report.pass
        }
        Command::EstimatorSelftest(_) => {
            if let Some(seed) = common.seed {
                cfg.selftest.seed = seed;
            }
            let report = run_selftest(&cfg.selftest)?;
            emit_json(out.join("selftest.json"), &report, &mut written)?;
            report.pass
        }
    };
    Ok((pass, written))
}

/// Parses `args` (including the program name), runs, prints output paths and
/// returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match dispatch(&cli.command) {
        Ok((pass, written)) => {
            for p in written {
                println!("{}", p.display());
            }
            if pass {
                0
            } else {
                eprintln!("verification failed");
                1
            }
        }
        Err(e @ AppError::Config(_)) => {
            eprintln!("error: {e}\n\nrun with --help for usage");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
