//! Command-line orchestration: configuration loading, experiment dispatch
//! and report writing.

mod config;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::Parser;
use serde::Serialize;

pub use config::{Experiment, ExperimentConfig, Probe, DEFAULT_SIGMA};
pub use run::{
    run, write_csv, Check, Outcome, DIRECTIONS_DEG, DIRECTION_SPREAD_TOL, DRIFT_TOL,
    IDENTITY_ABS_TOL, MIN_LIFT_ORDER,
};

use crate::error::Error;
use crate::norms::{BOUND_REL_TOL, SUP_ABS_TOL};

/// Version string recorded in every manifest.
pub const VERSION: &str = concat!(
    env!("CARGO_PKG_VERSION"),
    "+",
    env!("HEATLIFT_GIT_REV")
);

#[derive(Debug, Parser)]
#[command(name = "heatlift", version = VERSION, about = "Run a heat-equation experiment from a JSON config")]
pub struct Args {
    /// Path to the JSON configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory (default: `out_dir` from the config, else `out`).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Overrides `master_seed`.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Overrides `experiment`.
    #[arg(long, value_enum)]
    pub experiment: Option<Experiment>,
}

#[derive(Serialize)]
struct Tolerances {
    bound_rel: f64,
    sup_abs: f64,
    identity_abs: f64,
    identity_sigmas: f64,
    drift: f64,
    direction_spread: f64,
    min_lift_order: f64,
}

#[derive(Serialize)]
struct Manifest<'a> {
    version: &'static str,
    experiment: &'static str,
    config: &'a ExperimentConfig,
    master_seed: u64,
    tolerances: Tolerances,
    started_unix: f64,
    wall_clock_seconds: f64,
    outcome: &'a Outcome,
    pass: bool,
}

/// Process status: 0 when every check passed, 1 on a failed check or an
/// undefined ratio, 2 on configuration or I/O errors.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    ConfigError,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::ConfigError => 2,
        }
    }
}

fn classify(e: &Error) -> Status {
    match e {
        Error::UndefinedRatio { .. } => Status::Fail,
        _ => Status::ConfigError,
    }
}

fn one_line(s: &str) -> String {
    s.replace(['\n', '\r'], " ")
}

/// Loads the config, applies flag overrides, runs and writes the manifest.
/// Diagnostics go to stderr as a single `status=... reason=...` line.
pub fn execute(args: &Args) -> Status {
    let started = SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map_or(0.0, |d| d.as_secs_f64());
    let clock = Instant::now();
    let mut cfg = match ExperimentConfig::load(&args.config) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("status=config_error reason={}", one_line(&e.to_string()));
            return Status::ConfigError;
        }
    };
    if let Some(s) = args.seed {
        cfg.master_seed = s;
    }
    if let Some(x) = args.experiment {
        cfg.experiment = x;
    }
    let out = args
        .out
        .clone()
        .or_else(|| cfg.out_dir.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("out"));
    let outcome = match run(&cfg, &out) {
        Ok(o) => o,
        Err(e) => {
            let status = classify(&e);
            let kind = if status == Status::Fail { "fail" } else { "config_error" };
            eprintln!("status={kind} reason={}", one_line(&e.to_string()));
            return status;
        }
    };
    let pass = outcome.passed();
    let manifest = Manifest {
        version: VERSION,
        experiment: cfg.experiment.name(),
        config: &cfg,
        master_seed: cfg.master_seed,
        tolerances: Tolerances {
            bound_rel: BOUND_REL_TOL,
            sup_abs: SUP_ABS_TOL,
            identity_abs: IDENTITY_ABS_TOL,
            identity_sigmas: 3.0,
            drift: DRIFT_TOL,
            direction_spread: DIRECTION_SPREAD_TOL,
            min_lift_order: MIN_LIFT_ORDER,
        },
        started_unix: started,
        wall_clock_seconds: clock.elapsed().as_secs_f64(),
        outcome: &outcome,
        pass,
    };
    let path = out.join("manifest.json");
    let written = serde_json::to_string_pretty(&manifest)
        .map_err(|e| e.to_string())
        .and_then(|s| std::fs::write(&path, s + "\n").map_err(|e| e.to_string()));
    if let Err(e) = written {
        eprintln!("status=config_error reason=cannot write {}: {}", path.display(), one_line(&e));
        return Status::ConfigError;
    }
    if pass {
        Status::Pass
    } else {
        let failed: Vec<&str> = outcome
            .checks
            .iter()
            .filter(|c| !c.pass)
            .map(|c| c.name.as_str())
            .collect();
        eprintln!("status=fail reason=failed checks: {}", failed.join(";"));
        Status::Fail
    }
}

/// Entry point used by the binary.
pub fn main_with(args: Args) -> ExitCode {
    ExitCode::from(execute(&args).code())
}
