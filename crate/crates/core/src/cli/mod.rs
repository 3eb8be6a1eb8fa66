//! Batch entry point: reads a TOML run configuration, runs the command and
//! writes `snapshots.csv`, `report.txt` and `summary.csv` under
//! `<output_dir>/<command>-<hash>/`.

mod config;

#[cfg(test)]
mod tests;

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::Parser;

pub use config::{parse_config, BoundaryKind, Command, InitialProfile, Job, RunConfig, SimulateJob, DEFAULT_SEED};

use crate::error::{Error, Result};
use crate::exec::{with_jobs, Execution};
use crate::radial::io::{write_snapshots, write_trajectory_report};
use crate::radial::simulate;
use crate::verify::report::{write_report, write_summary, SUMMARY_HEADER};
use crate::verify::{params_hash, run_suite, Outcome, VerificationReport};

/// Exit status of a run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitCode {
    Pass = 0,
    Config = 2,
    Simulation = 3,
    Verification = 4,
}

impl ExitCode {
    pub fn of(e: &Error) -> Self {
        match e {
            Error::Parse(_) | Error::ConstraintViolation(_) | Error::Precondition(_) | Error::DomainError(_) => {
                ExitCode::Config
            }
            Error::LinearSolveFailure { .. } | Error::IterateBelowFloor { .. } | Error::Io(_) => ExitCode::Simulation,
        }
    }
}

/// Fallback for `--output` when the file sets no `output_dir`.
pub const OUTPUT_ENV: &str = "SINGULAR_RD_OUTPUT";

#[derive(Debug, Clone, Parser)]
#[command(name = "singular-rd", version, about = "Radial solver and barrier checks for u_t = Δu − u^(−ν)")]
pub struct Args {
    /// Run configuration (TOML).
    #[arg(long)]
    pub config: PathBuf,
    /// Output root; overrides `output_dir` in the file.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Seed of randomised checks; overrides `seed` in the file.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads for independent checks (default: available parallelism).
    #[arg(long)]
    pub jobs: Option<usize>,
    /// Multiplies every check tolerance.
    #[arg(long, default_value_t = 1.0)]
    pub tolerance_scale: f64,
    /// Write 0 for wall-clock times so repeated runs give identical files.
    #[arg(long)]
    pub no_timing: bool,
    /// Run independent checks on the calling thread only.
    #[arg(long)]
    pub sequential: bool,
}

/// What a run produced.
#[derive(Debug, Clone)]
pub struct RunResult {
    pub dir: PathBuf,
    pub reports: Vec<VerificationReport>,
    pub code: ExitCode,
}

/// Parses the file, applies the flag overrides and resolves the output root.
pub fn load(args: &Args) -> Result<(RunConfig, PathBuf)> {
    let source = fs::read_to_string(&args.config)
        .map_err(|e| Error::Parse(format!("{}: {e}", args.config.display())))?;
    let mut cfg = parse_config(&source)?;
    cfg.scale_tolerances(args.tolerance_scale)?;
    if let Some(seed) = args.seed {
        cfg.reseed(seed);
    }
    if args.jobs == Some(0) {
        return Err(Error::ConstraintViolation("--jobs must be at least 1".into()));
    }
    let root = args
        .output
        .clone()
        .or_else(|| cfg.output_dir.clone())
        .or_else(|| std::env::var_os(OUTPUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("output"));
    Ok((cfg, root))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn write_outcome(dir: &Path, out: &Outcome) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_report(create(&dir.join("report.txt"))?, &out.report)?;
    if !out.snapshots.is_empty() {
        write_snapshots(create(&dir.join("snapshots.csv"))?, &out.snapshots)?;
    }
    Ok(())
}

/// Runs `cfg` and writes its artifacts below `root`.
pub fn run(cfg: &RunConfig, root: &Path, exec: Execution, timing: bool) -> Result<RunResult> {
    let dir = root.join(format!("{}-{}", cfg.command.label(), params_hash(&cfg.canonical())));
    fs::create_dir_all(&dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    match &cfg.job {
        Job::Simulate(job) => {
            let traj = simulate(&job.u0, &job.cfg, &job.bc)?;
            let mut snaps = create(&dir.join("snapshots.csv"))?;
            write_snapshots(&mut snaps, &traj.snapshots)?;
            snaps.flush()?;
            let mut rep = create(&dir.join("report.txt"))?;
            writeln!(rep, "command = simulate")?;
            writeln!(rep, "params_hash = {}", params_hash(&cfg.canonical()))?;
            write_trajectory_report(&mut rep, &traj)?;
            rep.flush()?;
            let mut sum = create(&dir.join("summary.csv"))?;
            writeln!(sum, "{SUMMARY_HEADER}")?;
            sum.flush()?;
            Ok(RunResult {
                dir,
                reports: Vec::new(),
                code: ExitCode::Pass,
            })
        }
        Job::Checks(specs) => {
            let results = run_suite(exec, specs);
            let mut reports = Vec::new();
            let mut first_error = None;
            let single = specs.len() == 1;
            for r in results {
                match r {
                    Ok(mut out) => {
                        if !timing {
                            out.report.wall_ms = 0;
                        }
                        if !single {
                            let sub = dir.join(format!("{}-{}", out.report.kind.label(), out.report.params_hash));
                            write_outcome(&sub, &out)?;
                        } else if !out.snapshots.is_empty() {
                            write_snapshots(create(&dir.join("snapshots.csv"))?, &out.snapshots)?;
                        }
                        reports.push(out.report);
                    }
                    Err(e) => {
                        first_error.get_or_insert(e);
                    }
                }
            }
            let mut rep = create(&dir.join("report.txt"))?;
            for (i, r) in reports.iter().enumerate() {
                if i > 0 {
                    writeln!(rep)?;
                }
                write_report(&mut rep, r)?;
            }
            rep.flush()?;
            let mut sum = create(&dir.join("summary.csv"))?;
            write_summary(&mut sum, &reports)?;
            sum.flush()?;
            if let Some(e) = first_error {
                return Err(e);
            }
            let code = if reports.iter().all(VerificationReport::passed) {
                ExitCode::Pass
            } else {
                ExitCode::Verification
            };
            Ok(RunResult { dir, reports, code })
        }
    }
}

/// Full command-line run; returns the process exit status.
pub fn main_with(args: Args) -> i32 {
    let (cfg, root) = match load(&args) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::of(&e) as i32;
        }
    };
    for line in cfg.describe() {
        println!("{line}");
    }
    let exec = if args.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    match with_jobs(args.jobs, || run(&cfg, &root, exec, !args.no_timing)) {
        Ok(res) => {
            for r in &res.reports {
                println!(
                    "{} {} {} worst {:e} at r = {}, t = {}",
                    r.kind.label(),
                    r.params_hash,
                    r.verdict.label(),
                    r.worst_violation,
                    r.location.0,
                    r.location.1
                );
            }
            println!("output: {}", res.dir.display());
            res.code as i32
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::of(&e) as i32
        }
    }
}
