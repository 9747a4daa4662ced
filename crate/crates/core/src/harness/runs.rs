//! Run drivers behind the command-line subcommands: single simulations,
//! lifespan sweeps, convergence studies and the estimate measurements.
//!
//! Each driver writes its outputs under a target directory — CSV for
//! sampled diagnostics, TOML for the run summary (which embeds the
//! resolved configuration, the seed and the library version) — and returns
//! a summary value the caller can inspect without re-reading the files.

use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::diag::PhysicalState;
use crate::error::{Error, Result};
use crate::estimates::{
    decay_scan, local_smoothing_ratio, maximal_sum, strichartz_norm, wrap_horizon,
    CubePartition, EstimateReport, DIAGNOSTIC_Q,
};
use crate::evolve::{
    simulate_abcd, simulate_kdvkdv_physical, simulate_schrodinger_b0,
    simulate_schrodinger_d0_curlfree, AbcdPropagator, Trajectory,
};
use crate::harness::{build_initial, write_snapshot, ExperimentConfig};
use crate::model::{classify, ModelClass};

/// Dispatch to the most specific simulation route for the model class, so
/// class-specific invariants (curl preservation, vorticity) are watched.
fn simulate_for_class(
    u0: &PhysicalState,
    cfg: &ExperimentConfig,
) -> Result<Trajectory> {
    let params = cfg.model.build()?;
    match classify(&params) {
        ModelClass::KdVKdV => simulate_kdvkdv_physical(u0, params.epsilon, &cfg.solver),
        ModelClass::SchrodingerB0 => simulate_schrodinger_b0(u0, &params, &cfg.solver),
        ModelClass::SchrodingerD0 => simulate_schrodinger_d0_curlfree(u0, &params, &cfg.solver),
        _ => simulate_abcd(u0, &params, &cfg.solver, false),
    }
}

fn write_diagnostics_csv(path: &Path, traj: &Trajectory) -> Result<()> {
    let mut file = std::fs::File::create(path)?;
    writeln!(file, "t,energy,eta_hs,v_hs,curl_l2,w0_l2")?;
    for row in &traj.rows {
        writeln!(
            file,
            "{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e}",
            row.t, row.energy, row.eta_hs, row.v_hs, row.curl_l2, row.w0_l2
        )?;
    }
    Ok(())
}

fn write_summary<T: Serialize>(path: &Path, summary: &T) -> Result<()> {
    let text = toml::to_string_pretty(summary).map_err(|e| Error::Config(e.to_string()))?;
    std::fs::write(path, text)?;
    Ok(())
}

/// Outcome of a single simulation run.
#[derive(Debug, Clone, Serialize)]
pub struct SimulateSummary {
    pub version: String,
    pub seed: u64,
    pub final_time: f64,
    pub blow_up: Option<f64>,
    pub doubling_time: Option<f64>,
    pub invariant_breach: Option<String>,
    pub final_energy: f64,
    pub energy_drift: f64,
    /// File names relative to the output directory, so the summary is
    /// identical wherever the run lands.
    pub diagnostics_csv: PathBuf,
    pub final_snapshot: PathBuf,
    pub config: ExperimentConfig,
}

/// Run one simulation described by `cfg`, writing `diagnostics.csv`,
/// `final.bsq` and `summary.toml` into `out_dir`.
pub fn run_simulate(cfg: &ExperimentConfig, out_dir: &Path) -> Result<SimulateSummary> {
    cfg.validate()?;
    std::fs::create_dir_all(out_dir)?;
    let grid = cfg.grid.build()?;
    let u0 = build_initial(&grid, &cfg.initial, cfg.seed)?;
    let traj = simulate_for_class(&u0, cfg)?;

    let csv_path = out_dir.join("diagnostics.csv");
    write_diagnostics_csv(&csv_path, &traj)?;
    let snap_path = out_dir.join("final.bsq");
    write_snapshot(&snap_path, &traj.final_state, cfg.model.epsilon, traj.final_time)?;

    let e0 = traj.rows.first().map(|r| r.energy).unwrap_or(0.0);
    let e1 = traj.rows.last().map(|r| r.energy).unwrap_or(0.0);
    let summary = SimulateSummary {
        version: crate::version_string(),
        seed: cfg.seed,
        final_time: traj.final_time,
        blow_up: traj.blow_up,
        doubling_time: traj.doubling_time,
        invariant_breach: traj.invariant_breach.clone(),
        final_energy: e1,
        energy_drift: (e1 - e0).abs(),
        diagnostics_csv: PathBuf::from("diagnostics.csv"),
        final_snapshot: PathBuf::from("final.bsq"),
        config: cfg.clone(),
    };
    write_summary(&out_dir.join("summary.toml"), &summary)?;
    Ok(summary)
}

/// One point of a lifespan sweep.
#[derive(Debug, Clone, Serialize)]
pub struct LifespanPoint {
    pub epsilon: f64,
    pub t_end: f64,
    /// Time at which the `H^s` norm first doubled; `None` means the norm
    /// stayed below twice its initial value for the whole window
    /// (right-censored, a lower bound on the lifespan).
    pub doubling_time: Option<f64>,
    pub blow_up: Option<f64>,
    /// Largest norm ratio observed over the window.
    pub max_growth: f64,
    /// Doubling time of the linear control at the same `epsilon`, which
    /// must stay `None`.
    pub linear_doubling: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LifespanStatus {
    /// Enough uncensored doubling times for a slope fit.
    Conclusive,
    /// Norms stayed bounded on every window; the sweep only certifies the
    /// lower bounds, which is success for the long-time theory but gives
    /// no exponent.
    AllCensored,
    /// Mixed or insufficient data; not a failure of the solver.
    Inconclusive,
}

#[derive(Debug, Clone, Serialize)]
pub struct LifespanSummary {
    pub version: String,
    pub seed: u64,
    pub points: Vec<LifespanPoint>,
    /// Fitted exponent of doubling time against `epsilon` (log-log), when
    /// at least three uncensored points exist.
    pub exponent: Option<f64>,
    pub status: LifespanStatus,
    pub config: ExperimentConfig,
}

fn lifespan_point(cfg: &ExperimentConfig, eps: f64) -> Result<LifespanPoint> {
    let grid = cfg.grid.build()?;
    let u0 = build_initial(&grid, &cfg.initial, cfg.seed)?;
    let params = crate::model::ABCDParams::new(
        cfg.model.a,
        cfg.model.b,
        cfg.model.c,
        cfg.model.d,
        eps,
    )?;
    let mut solver = cfg.solver;
    solver.t_end = cfg.lifespan.horizon_factor / eps.sqrt();
    let traj = simulate_abcd(&u0, &params, &solver, false)?;
    let h0 = traj
        .rows
        .first()
        .map(|r| (r.eta_hs.powi(2) + r.v_hs.powi(2)).sqrt())
        .unwrap_or(0.0);
    let max_growth = traj
        .rows
        .iter()
        .map(|r| (r.eta_hs.powi(2) + r.v_hs.powi(2)).sqrt())
        .fold(0.0f64, f64::max)
        / h0.max(f64::MIN_POSITIVE);

    let linear_doubling = if cfg.lifespan.linear_control {
        let mut lin = solver;
        lin.nonlinear = false;
        let control = simulate_abcd(&u0, &params, &lin, false)?;
        control.doubling_time
    } else {
        None
    };

    Ok(LifespanPoint {
        epsilon: eps,
        t_end: solver.t_end,
        doubling_time: traj.doubling_time,
        blow_up: traj.blow_up,
        max_growth,
        linear_doubling,
    })
}

/// Sweep the configured `epsilon` list, integrating each case on
/// `[0, horizon_factor * eps^{-1/2}]` and recording the norm-doubling
/// times. Cases run in parallel on up to `jobs` threads; results are
/// deterministic regardless of the thread count.
pub fn run_lifespan(cfg: &ExperimentConfig, out_dir: &Path, jobs: usize) -> Result<LifespanSummary> {
    cfg.validate()?;
    if cfg.lifespan.epsilons.len() < 3 {
        return Err(Error::Config(
            "lifespan sweep needs at least 3 epsilon values".into(),
        ));
    }
    std::fs::create_dir_all(out_dir)?;
    let jobs = jobs.max(1);
    let epsilons = &cfg.lifespan.epsilons;
    let mut results: Vec<Option<Result<LifespanPoint>>> = Vec::new();
    results.resize_with(epsilons.len(), || None);

    // Fixed-size chunk of work per thread keeps the output ordering (and
    // therefore the files) independent of scheduling.
    std::thread::scope(|scope| {
        let chunk = epsilons.len().div_ceil(jobs);
        for (slot, eps_chunk) in results.chunks_mut(chunk).zip(epsilons.chunks(chunk)) {
            scope.spawn(move || {
                for (out, &eps) in slot.iter_mut().zip(eps_chunk) {
                    *out = Some(lifespan_point(cfg, eps));
                }
            });
        }
    });

    let mut points = Vec::with_capacity(epsilons.len());
    for r in results {
        points.push(r.expect("worker filled every slot")?);
    }

    let uncensored: Vec<&LifespanPoint> = points
        .iter()
        .filter(|p| p.doubling_time.is_some() && p.blow_up.is_none())
        .collect();
    let (exponent, status) = if uncensored.len() >= 3 {
        let xs: Vec<f64> = uncensored.iter().map(|p| p.epsilon).collect();
        let ys: Vec<f64> = uncensored.iter().map(|p| p.doubling_time.unwrap()).collect();
        match crate::estimates::fit_loglog(&xs, &ys) {
            Ok((slope, _, _)) => (Some(slope), LifespanStatus::Conclusive),
            Err(_) => (None, LifespanStatus::Inconclusive),
        }
    } else if uncensored.is_empty() && points.iter().all(|p| p.blow_up.is_none()) {
        (None, LifespanStatus::AllCensored)
    } else {
        (None, LifespanStatus::Inconclusive)
    };

    let mut csv = std::fs::File::create(out_dir.join("lifespan.csv"))?;
    writeln!(
        csv,
        "epsilon,t_end,doubling_time,blow_up,max_growth,linear_doubling"
    )?;
    let opt = |v: Option<f64>| v.map_or(String::from(""), |x| format!("{x:.12e}"));
    for p in &points {
        writeln!(
            csv,
            "{:.12e},{:.12e},{},{},{:.12e},{}",
            p.epsilon,
            p.t_end,
            opt(p.doubling_time),
            opt(p.blow_up),
            p.max_growth,
            opt(p.linear_doubling)
        )?;
    }

    let summary = LifespanSummary {
        version: crate::version_string(),
        seed: cfg.seed,
        points,
        exponent,
        status,
        config: cfg.clone(),
    };
    write_summary(&out_dir.join("summary.toml"), &summary)?;
    Ok(summary)
}

#[derive(Debug, Clone, Serialize)]
pub struct ConvergenceSummary {
    pub version: String,
    /// Errors at `dt`, `dt/2`, `dt/4` against the `dt/8` reference.
    pub temporal_errors: Vec<f64>,
    /// Observed order from successive error ratios.
    pub temporal_order: f64,
    /// Errors of the 64^2 and 128^2 runs against the 256^2 run, restricted
    /// to the shared modes.
    pub spatial_errors: Vec<f64>,
    /// Linear runs against the exact group at the base resolution.
    pub linear_error: f64,
    pub config: ExperimentConfig,
}

/// Error between two final states on possibly different grids, measured on
/// the Fourier modes they share.
fn shared_mode_error(coarse: &PhysicalState, fine: &PhysicalState) -> f64 {
    let cg = coarse.grid();
    let fg = fine.grid();
    let mut acc = 0.0f64;
    for (cf, ff) in [
        (&coarse.eta, &fine.eta),
        (&coarse.v1, &fine.v1),
        (&coarse.v2, &fine.v2),
    ] {
        for j in 0..cg.nx() {
            for k in 0..cg.ny() {
                // Match modes by signed index; skip the coarse grid's
                // self-conjugate row/column where the mapping is ambiguous.
                let sj = if j <= cg.nx() / 2 { j as i64 } else { j as i64 - cg.nx() as i64 };
                let sk = if k <= cg.ny() / 2 { k as i64 } else { k as i64 - cg.ny() as i64 };
                if 2 * sj.unsigned_abs() as usize == cg.nx()
                    || 2 * sk.unsigned_abs() as usize == cg.ny()
                {
                    continue;
                }
                let fj = sj.rem_euclid(fg.nx() as i64) as usize;
                let fk = sk.rem_euclid(fg.ny() as i64) as usize;
                acc += (cf.coeffs()[[j, k]] - ff.coeffs()[[fj, fk]]).norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// Temporal (step-halving against a reference) and spatial (grid-doubling)
/// self-convergence of the solver, plus the linear-route exactness check.
pub fn run_convergence(cfg: &ExperimentConfig, out_dir: &Path) -> Result<ConvergenceSummary> {
    cfg.validate()?;
    std::fs::create_dir_all(out_dir)?;
    let params = cfg.model.build()?;

    // Temporal study at the configured resolution.
    let grid = cfg.grid.build()?;
    let u0 = build_initial(&grid, &cfg.initial, cfg.seed)?;
    let run_dt = |dt: f64| -> Result<PhysicalState> {
        let mut solver = cfg.solver;
        solver.dt = dt;
        Ok(simulate_abcd(&u0, &params, &solver, false)?.final_state)
    };
    let reference = run_dt(cfg.solver.dt / 8.0)?;
    let mut temporal_errors = Vec::new();
    for div in [1.0, 2.0, 4.0] {
        let state = run_dt(cfg.solver.dt / div)?;
        temporal_errors.push(shared_mode_error(&state, &reference).max(f64::MIN_POSITIVE));
    }
    let temporal_order = {
        let r1 = (temporal_errors[0] / temporal_errors[1]).log2();
        let r2 = (temporal_errors[1] / temporal_errors[2]).log2();
        0.5 * (r1 + r2)
    };

    // Spatial study on 64/128/256 at the configured domain size.
    let mut spatial_errors = Vec::new();
    {
        let mut finals = Vec::new();
        for n in [64usize, 128, 256] {
            let g = crate::spectral::Grid2D::new(n, n, cfg.grid.lx, cfg.grid.ly)?;
            let u = build_initial(&g, &cfg.initial, cfg.seed)?;
            finals.push(simulate_abcd(&u, &params, &cfg.solver, false)?.final_state);
        }
        let fine = finals.pop().unwrap();
        for coarse in &finals {
            spatial_errors.push(shared_mode_error(coarse, &fine));
        }
    }

    // Linear control: with the nonlinearity off the run must reproduce the
    // exact group to rounding accuracy.
    let linear_error = {
        let mut solver = cfg.solver;
        solver.nonlinear = false;
        let traj = simulate_abcd(&u0, &params, &solver, false)?;
        let prop = AbcdPropagator::new(grid.clone(), &params)?;
        let mut exact = u0.clone();
        exact.remove_mean();
        if solver.dealias {
            exact.dealias();
        }
        let exact = prop.apply(&exact, traj.final_time);
        shared_mode_error(&traj.final_state, &exact)
    };

    let summary = ConvergenceSummary {
        version: crate::version_string(),
        temporal_errors,
        temporal_order,
        spatial_errors,
        linear_error,
        config: cfg.clone(),
    };
    write_summary(&out_dir.join("summary.toml"), &summary)?;
    Ok(summary)
}

#[derive(Debug, Clone, Serialize)]
pub struct EstimatesSummary {
    pub version: String,
    pub seed: u64,
    /// The fixed norm index recorded alongside every report.
    pub diagnostic_q: f64,
    pub reports: Vec<EstimateReport>,
    pub all_pass: bool,
    pub config: ExperimentConfig,
}

fn write_report_csv(dir: &Path, report: &EstimateReport) -> Result<()> {
    let mut file = std::fs::File::create(dir.join(format!("{}.csv", report.name)))?;
    writeln!(file, "abscissa,measured,reference")?;
    let n = report
        .abscissae
        .len()
        .max(report.measured.len())
        .max(report.reference.len());
    let get = |v: &[f64], i: usize| v.get(i).map_or(String::new(), |x| format!("{x:.12e}"));
    for i in 0..n {
        writeln!(
            file,
            "{},{},{}",
            get(&report.abscissae, i),
            get(&report.measured, i),
            get(&report.reference, i)
        )?;
    }
    Ok(())
}

/// Measure the dispersive-estimate suite on the configured initial surface
/// datum: decay slopes, a Strichartz norm, the local-smoothing ratio and
/// the maximal-function sum. One CSV per report plus a TOML summary.
pub fn run_estimates(cfg: &ExperimentConfig, out_dir: &Path) -> Result<EstimatesSummary> {
    cfg.validate()?;
    std::fs::create_dir_all(out_dir)?;
    let grid = cfg.grid.build()?;
    let eps = cfg.model.epsilon;
    // Measure on the band-limited part of the surface so the free flow is
    // resolved; the velocity plays no role in the scalar estimates.
    let u0 = build_initial(&grid, &cfg.initial, cfg.seed)?.eta;
    let horizon = wrap_horizon(&grid, eps);

    let mut reports = Vec::new();
    let times: Vec<f64> = (1..=12)
        .map(|i| horizon * i as f64 / 12.0)
        .collect();
    reports.push(decay_scan(eps, 0.0, &u0, &times)?);
    reports.push(strichartz_norm(eps, 0.0, horizon.min(1.0), &u0)?);
    let cubes = CubePartition::unit(grid.clone());
    reports.push(local_smoothing_ratio(eps, horizon.min(1.0), &u0, &cubes)?);
    let t_max = (1.0 / eps).min(horizon);
    reports.push(maximal_sum(eps, t_max, 2.0, &u0, &cubes, 100)?);

    for r in &reports {
        write_report_csv(out_dir, r)?;
    }
    let all_pass = reports.iter().all(|r| r.pass);
    let summary = EstimatesSummary {
        version: crate::version_string(),
        seed: cfg.seed,
        diagnostic_q: DIAGNOSTIC_Q,
        reports,
        all_pass,
        config: cfg.clone(),
    };
    write_summary(&out_dir.join("summary.toml"), &summary)?;
    Ok(summary)
}
