//! Command-line front end for the simulation and measurement harness.
//!
//! Subcommands: `simulate`, `lifespan`, `estimates`, `convergence` and
//! `check` (validate a configuration without running anything).
//!
//! Flags can also come from the environment: `BSQ_CONFIG`, `BSQ_OUT`,
//! `BSQ_SEED` and `BSQ_JOBS` supply defaults that explicit flags override.
//!
//! Exit codes: 0 success, 2 configuration error, 3 blow-up detected,
//! 4 invariant breach, 5 I/O failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use boussinesq::harness::{
    run_convergence, run_estimates, run_lifespan, run_simulate, ExperimentConfig,
};
use boussinesq::model::validate;
use boussinesq::Error;

const EXIT_CONFIG: u8 = 2;
const EXIT_BLOW_UP: u8 = 3;
const EXIT_INVARIANT: u8 = 4;
const EXIT_IO: u8 = 5;

#[derive(Parser)]
#[command(name = "bsq", version, about = "Water-wave system laboratory")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Path to the TOML run configuration (env: BSQ_CONFIG).
    #[arg(long, env = "BSQ_CONFIG")]
    config: PathBuf,
    /// Output directory (env: BSQ_OUT); defaults to the current directory.
    #[arg(long, env = "BSQ_OUT", default_value = ".")]
    out: PathBuf,
    /// Override the configured random seed (env: BSQ_SEED).
    #[arg(long, env = "BSQ_SEED")]
    seed: Option<u64>,
    /// Worker threads for sweeps (env: BSQ_JOBS).
    #[arg(long, env = "BSQ_JOBS", default_value_t = 1)]
    jobs: usize,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation and write diagnostics, snapshot and summary.
    Simulate(Common),
    /// Sweep the configured epsilon list and fit the norm-doubling times.
    Lifespan(Common),
    /// Measure the dispersive-estimate suite on the configured data.
    Estimates(Common),
    /// Temporal and spatial self-convergence plus the linear exactness check.
    Convergence(Common),
    /// Validate the configuration and report the model classification.
    Check(Common),
}

fn load(common: &Common) -> Result<ExperimentConfig, Error> {
    let mut cfg = ExperimentConfig::from_path(&common.config)?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn exit_for(err: &Error) -> u8 {
    match err {
        Error::Config(_) | Error::InvalidParams(_) | Error::InvalidGrid(_) | Error::IllPosed { .. } => {
            EXIT_CONFIG
        }
        Error::BlowUp { .. } => EXIT_BLOW_UP,
        Error::CurlViolation(_) | Error::VorticityNotNegligible(_) => EXIT_INVARIANT,
        Error::Io(_) | Error::SnapshotFormat(_) => EXIT_IO,
        _ => 1,
    }
}

fn run(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Simulate(common) => {
            let cfg = load(&common)?;
            let summary = run_simulate(&cfg, &common.out)?;
            println!(
                "simulate: t_end = {:.6}, energy drift = {:.3e}, outputs in {}",
                summary.final_time,
                summary.energy_drift,
                common.out.display()
            );
            if let Some(t) = summary.blow_up {
                println!("blow-up detected at t = {t:.6}");
                return Ok(EXIT_BLOW_UP);
            }
            if let Some(msg) = &summary.invariant_breach {
                println!("invariant breach: {msg}");
                return Ok(EXIT_INVARIANT);
            }
            Ok(0)
        }
        Command::Lifespan(common) => {
            let cfg = load(&common)?;
            let summary = run_lifespan(&cfg, &common.out, common.jobs)?;
            for p in &summary.points {
                let label = match (p.blow_up, p.doubling_time) {
                    (Some(t), _) => format!("blow-up at {t:.4}"),
                    (None, Some(t)) => format!("doubled at {t:.4}"),
                    (None, None) => format!("bounded to {:.4} (censored)", p.t_end),
                };
                println!("eps = {:.4}: {label}, max growth {:.3}", p.epsilon, p.max_growth);
            }
            match summary.exponent {
                Some(e) => println!("lifespan status {:?}, fitted exponent {e:.3}", summary.status),
                None => println!("lifespan status {:?}", summary.status),
            }
            if summary.points.iter().any(|p| p.blow_up.is_some()) {
                return Ok(EXIT_BLOW_UP);
            }
            if summary.points.iter().any(|p| p.linear_doubling.is_some()) {
                println!("invariant breach: linear control grew");
                return Ok(EXIT_INVARIANT);
            }
            Ok(0)
        }
        Command::Estimates(common) => {
            let cfg = load(&common)?;
            let summary = run_estimates(&cfg, &common.out)?;
            for r in &summary.reports {
                println!(
                    "{}: {} {}",
                    r.name,
                    if r.pass { "pass" } else { "FAIL" },
                    r.notes.join("; ")
                );
            }
            println!(
                "estimates: {} reports, all_pass = {}",
                summary.reports.len(),
                summary.all_pass
            );
            Ok(0)
        }
        Command::Convergence(common) => {
            let cfg = load(&common)?;
            let summary = run_convergence(&cfg, &common.out)?;
            println!(
                "temporal order {:.3}, spatial errors {:?}, linear error {:.3e}",
                summary.temporal_order, summary.spatial_errors, summary.linear_error
            );
            Ok(0)
        }
        Command::Check(common) => {
            let cfg = load(&common)?;
            let m = &cfg.model;
            let report = validate(m.a, m.b, m.c, m.d, m.epsilon);
            println!("configuration ok: {:?}", report.class);
            if !report.constraint_satisfied {
                println!(
                    "note: parameter-sum constraint off by {:.3e}",
                    report.constraint_defect
                );
            }
            for w in &report.warnings {
                println!("warning: {w}");
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(exit_for(&err))
        }
    }
}
