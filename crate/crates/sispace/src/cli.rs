//! Argument parsing and the top-level driver.

use std::fs;
use std::path::PathBuf;

use clap::Parser;
use serde_json::Value;

use crate::commands::{check_cmd, coeffs_cmd, orthogonalize_cmd, project_cmd, Outcome, Timings};
use crate::config::{demo_config, load_job, Command, Job};
use crate::error::CliError;
use crate::formats::write_atomic;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVARIANT: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Clone, Debug, Parser)]
#[command(name = "sispace", version, about = "Shift-invariant space computations on a fiber grid")]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    /// JSON job configuration (ignored by `demo`).
    #[arg(long, env = "SISPACE_CONFIG")]
    pub config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, env = "SISPACE_OUT")]
    pub out: PathBuf,
    /// Worker threads for the fiber loops.
    #[arg(long, env = "SISPACE_THREADS")]
    pub threads: Option<usize>,
    #[arg(long, env = "SISPACE_ZERO_TOL")]
    pub zero_tol: Option<f64>,
    #[arg(long, env = "SISPACE_REL_TOL")]
    pub rel_tol: Option<f64>,
}

fn override_tol(slot: &mut f64, value: Option<f64>, flag: &str) -> Result<(), CliError> {
    if let Some(v) = value {
        if !(v.is_finite() && v >= 0.0) {
            return Err(CliError::input(format!("--{flag} must be finite and nonnegative, got {v}")));
        }
        *slot = v;
    }
    Ok(())
}

fn load(args: &Args) -> Result<Job, CliError> {
    let path = if args.command == Command::Demo {
        let path = args.out.join("demo_config.json");
        let text = serde_json::to_string_pretty(&demo_config()).expect("demo config serializes");
        write_atomic(&path, &(text + "\n"))?;
        path
    } else {
        args.config
            .clone()
            .ok_or_else(|| CliError::input("--config is required"))?
    };
    let mut job = load_job(&path)?;
    if let Some(cmd) = job.command {
        if cmd != args.command && args.command != Command::Demo {
            log::warn!("configuration names command {cmd:?}; running {:?}", args.command);
        }
    }
    override_tol(&mut job.tolerances.zero_tol, args.zero_tol, "zero-tol")?;
    override_tol(&mut job.tolerances.rel_tol, args.rel_tol, "rel-tol")?;
    Ok(job)
}

fn write_json(path: &std::path::Path, value: &Value) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).expect("reports serialize");
    write_atomic(path, &(text + "\n"))
}

fn dispatch(args: &Args) -> Result<Outcome, CliError> {
    fs::create_dir_all(&args.out).map_err(|e| CliError::io(&args.out, e))?;
    let job = load(args)?;
    let mut timings = Timings::default();
    let out = args.out.as_path();
    let outcome = match args.command {
        Command::Orthogonalize => orthogonalize_cmd(&job, out, &mut timings),
        Command::Project => project_cmd(&job, out, &mut timings),
        Command::Coeffs => coeffs_cmd(&job, out, &mut timings),
        Command::Check | Command::Demo => check_cmd(&job, out, &mut timings),
    }?;
    write_json(&out.join("report.json"), &outcome.report)?;
    write_json(&out.join("timings.json"), &timings.to_json())?;
    Ok(outcome)
}

/// Runs one job and returns the report, honoring `--threads`.
pub fn execute(args: &Args) -> Result<Outcome, CliError> {
    match args.threads {
        None => dispatch(args),
        Some(0) => Err(CliError::input("--threads must be at least 1")),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| CliError::input(format!("cannot start {n} threads: {e}")))?
            .install(|| dispatch(args)),
    }
}

/// Runs one job and maps the result to an exit code, reporting errors on
/// stderr.
pub fn run(args: &Args) -> i32 {
    match execute(args) {
        Ok(outcome) if outcome.passed => EXIT_OK,
        Ok(_) => {
            eprintln!("sispace: invariant check failed; see {}", args.out.join("report.json").display());
            EXIT_INVARIANT
        }
        Err(e) => {
            eprintln!("sispace: {e}");
            EXIT_INPUT
        }
    }
}
