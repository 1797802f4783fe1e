//! Command-line front end: `generate`, `verify` and `sweep`.
//!
//! Exit codes: 0 success, 1 build or verification failure, 2 usage or
//! configuration error. CSV numbers use 17 significant digits.

mod config;

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use rayon::prelude::*;

pub use config::{ConfigError, GridKind, MeanValueG, RunConfig, KEYS};

use crate::verifier::{build_with_defect, sweep_solution, verify, SweepAxis, SweepRow, VerifyError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "potential-ns", version, about = "Build and verify exact potential-flow Navier-Stokes solutions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, clap::Args)]
pub struct Common {
    /// Flat key=value configuration file.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long)]
    pub out: PathBuf,
    /// Overrides the config seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads for grid evaluation; 0 means one per core.
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample (u, p) on the configured grid into a CSV.
    Generate(Common),
    /// Run the full verifier and write text and CSV reports.
    Verify(Common),
    /// Refinement sweep along one axis.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// quad-nodes, fd-step or trunc-radius (overrides the config).
        #[arg(long)]
        axis: Option<SweepAxis>,
        /// Comma-separated levels (overrides the config).
        #[arg(long, value_delimiter = ',')]
        levels: Option<Vec<f64>>,
    },
}

/// Outcome of a command that ran to completion.
enum Outcome {
    Pass,
    Fail,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Failure(String),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<VerifyError> for CliError {
    fn from(e: VerifyError) -> Self {
        match e {
            VerifyError::Levels(_) | VerifyError::Level { .. } | VerifyError::TimeValues(_) | VerifyError::Grid(_) => {
                CliError::Usage(e.to_string())
            }
            e => CliError::Failure(e.to_string()),
        }
    }
}

fn io_failure(path: &Path, e: std::io::Error) -> CliError {
    CliError::Failure(format!("cannot write {}: {e}", path.display()))
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(Outcome::Pass) => EXIT_OK,
        Ok(Outcome::Fail) => EXIT_FAIL,
        Err(CliError::Usage(m)) => {
            eprintln!("error: {m}");
            EXIT_USAGE
        }
        Err(CliError::Failure(m)) => {
            eprintln!("error: {m}");
            EXIT_FAIL
        }
    }
}

fn load(common: &Common) -> Result<RunConfig, CliError> {
    let text = fs::read_to_string(&common.config).map_err(|e| ConfigError::Read {
        path: common.config.display().to_string(),
        message: e.to_string(),
    })?;
    let mut cfg = RunConfig::parse(&text)?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(threads) = common.threads {
        cfg.threads = threads;
    }
    Ok(cfg)
}

fn execute(cli: Cli) -> Result<Outcome, CliError> {
    let (common, sweep) = match &cli.command {
        Command::Generate(c) | Command::Verify(c) => (c, None),
        Command::Sweep { common, axis, levels } => (common, Some((axis, levels))),
    };
    let mut cfg = load(common)?;
    if let Some((axis, levels)) = sweep {
        if let Some(a) = axis {
            cfg.sweep_axis = *a;
        }
        if let Some(l) = levels {
            cfg.sweep_levels = l.clone();
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {} threads: {e}", cfg.threads)))?;
    fs::create_dir_all(&common.out).map_err(|e| io_failure(&common.out, e))?;
    pool.install(|| match cli.command {
        Command::Generate(_) => cmd_generate(&cfg, &common.out),
        Command::Verify(_) => cmd_verify(&cfg, &common.out),
        Command::Sweep { .. } => cmd_sweep(&cfg, &common.out),
    })
}

fn write(dir: &Path, name: &str, body: &str) -> Result<PathBuf, CliError> {
    let path = dir.join(name);
    fs::write(&path, body).map_err(|e| io_failure(&path, e))?;
    Ok(path)
}

fn build(cfg: &RunConfig) -> Result<crate::solution::NSSolution, CliError> {
    let spec = cfg.solution_spec()?;
    build_with_defect(&spec, cfg.defect).map_err(|e| CliError::Failure(format!("build failed: {e}")))
}

/// Writes `x,y,z,t,ux,uy,uz,p` for every grid sample, time-major.
fn cmd_generate(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let grid = cfg.grid()?;
    let sol = build(cfg)?;
    let rows: Vec<String> = grid
        .samples()
        .par_iter()
        .map(|&(x, t)| {
            let u = sol.velocity.value(x, t)?;
            let p = sol.pressure.value(x, t)?;
            Ok(format!("{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n", x.x, x.y, x.z, t, u.x, u.y, u.z, p))
        })
        .collect::<Result<_, crate::vecfield::FieldError>>()
        .map_err(|e| CliError::Failure(format!("evaluation failed: {e}")))?;
    let mut body = String::from("x,y,z,t,ux,uy,uz,p\n");
    body.extend(rows);
    let path = write(out, &cfg.field_csv, &body)?;
    println!("wrote {} rows to {}", grid.len(), path.display());
    Ok(Outcome::Pass)
}

fn cmd_verify(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    let grid = cfg.grid()?;
    let opts = cfg.verify_options()?;
    let sol = build(cfg)?;
    let report = verify(&sol, &grid, &opts)?;
    let text = report.to_text();
    write(out, &cfg.report_txt, &text)?;
    write(out, &cfg.report_csv, &report.to_csv())?;
    print!("{text}");
    Ok(if report.passed() { Outcome::Pass } else { Outcome::Fail })
}

fn cmd_sweep(cfg: &RunConfig, out: &Path) -> Result<Outcome, CliError> {
    if cfg.sweep_levels.len() < crate::verifier::MIN_SWEEP_LEVELS {
        return Err(VerifyError::Levels(cfg.sweep_levels.len()).into());
    }
    let grid = cfg.grid()?;
    let opts = cfg.verify_options()?;
    let spec = cfg.solution_spec()?;
    let g = cfg.mean_value_g.polynomial();
    let rows = sweep_solution(&spec, cfg.defect, &grid, cfg.sweep_axis, &cfg.sweep_levels, &opts, cfg.sweep_check, &g, cfg.radial_nodes)?;
    let path = write(out, &cfg.sweep_csv, &sweep_csv(&rows))?;
    println!("sweep {} over {} levels written to {}", cfg.sweep_axis.name(), rows.len(), path.display());
    for r in &rows {
        println!("  {:>12} {:.16e}", r.level, r.residual);
    }
    Ok(Outcome::Pass)
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s = String::from("level,residual\n");
    for r in rows {
        let _ = writeln!(s, "{:.16e},{:.16e}", r.level, r.residual);
    }
    s
}

