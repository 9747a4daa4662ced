//! Time integration: exact linear groups, integrating-factor RK4 for the
//! diagonalized KdV-KdV system, physical-variable steppers for the full
//! parameter family, and the 1D reference systems.

mod abcd;
mod group;
mod kdv_diag;
mod one_dim;

pub use abcd::{
    abcd_rhs_nonlinear, energy_functional, simulate_abcd, simulate_kdvkdv_physical,
    simulate_schrodinger_b0, simulate_schrodinger_d0_curlfree, AbcdPropagator,
};
pub use group::{apply_group, phase, LinearPropagator};
pub use kdv_diag::{simulate_kdvkdv, step_kdvkdv_diagonal, KdvDiagonalStepper};
pub use one_dim::{
    from_1d_diagonal, simulate_1d, to_1d_diagonal, Field1D, Line, OneDimRun, OneDimSystem,
};

use serde::{Deserialize, Serialize};

use crate::diag::PhysicalState;

/// Default Sobolev index for diagnostics; any value above `3/2` controls
/// the 2D nonlinearity.
pub const DEFAULT_SOBOLEV_INDEX: f64 = 2.0;

/// Growth factor of the Sobolev norm that is declared a blow-up.
pub const BLOW_UP_FACTOR: f64 = 1e3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Scheme {
    /// Exact linear factor, classical RK4 on the twisted nonlinearity.
    /// No linear stability restriction.
    IFRK4,
    /// Half linear step, RK4 on the nonlinear part alone, half linear step.
    StrangSplit,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_end: f64,
    pub scheme: Scheme,
    /// Re-project the state on the 2/3 band each step (products inside the
    /// right-hand sides are always dealiased).
    pub dealias: bool,
    /// Record diagnostics every this many steps (plus the initial and
    /// final states).
    pub diagnostics_stride: usize,
    /// When false the nonlinearity is switched off and the run is the exact
    /// linear group, useful as a control.
    pub nonlinear: bool,
    /// Sobolev index `s` for the recorded norms and the blow-up monitor.
    pub sobolev_index: f64,
    /// Keep physical snapshots at the diagnostics stride (memory-heavy).
    pub store_snapshots: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            dt: 1e-3,
            t_end: 1.0,
            scheme: Scheme::IFRK4,
            dealias: true,
            diagnostics_stride: 100,
            nonlinear: true,
            sobolev_index: DEFAULT_SOBOLEV_INDEX,
            store_snapshots: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> crate::Result<()> {
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err(crate::Error::Config(format!("dt must be positive, got {}", self.dt)));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(crate::Error::Config(format!(
                "t_end must be positive, got {}",
                self.t_end
            )));
        }
        if self.diagnostics_stride == 0 {
            return Err(crate::Error::Config("diagnostics_stride must be >= 1".into()));
        }
        Ok(())
    }

    /// Number of whole steps covering `[0, t_end]`.
    pub fn num_steps(&self) -> usize {
        (self.t_end / self.dt).round().max(1.0) as usize
    }
}

/// One diagnostics sample along a trajectory.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct DiagnosticsRow {
    pub t: f64,
    /// Conserved energy: the KdV-KdV Hamiltonian for `b = d = 0` runs, the
    /// Sobolev energy functional for the other systems.
    pub energy: f64,
    pub eta_hs: f64,
    pub v_hs: f64,
    pub curl_l2: f64,
    pub w0_l2: f64,
}

/// Result of a simulation: sampled diagnostics, the final state and the
/// blow-up / doubling bookkeeping consumed by lifespan sweeps.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub rows: Vec<DiagnosticsRow>,
    pub snapshots: Vec<(f64, PhysicalState)>,
    pub final_state: PhysicalState,
    pub final_time: f64,
    /// First time at which the norm monitor declared blow-up, if any; the
    /// trajectory stops there.
    pub blow_up: Option<f64>,
    /// First time the `H^s` norm reached twice its initial value (the
    /// lifespan proxy); `None` means censored at `t_end`.
    pub doubling_time: Option<f64>,
    /// Description of a breached invariant observed mid-run (the run
    /// continues for diagnosis).
    pub invariant_breach: Option<String>,
    pub sobolev_index: f64,
}

impl Trajectory {
    pub fn times_strictly_increasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[0].t < w[1].t)
    }
}

/// Tracks the `H^s` norm of a run: records the doubling time and signals
/// blow-up at `BLOW_UP_FACTOR` times the initial value or any non-finite
/// sample.
#[derive(Debug, Clone)]
pub struct NormMonitor {
    initial: f64,
    doubling_time: Option<f64>,
    blow_up: Option<f64>,
}

impl NormMonitor {
    pub fn new(initial: f64) -> Self {
        Self {
            initial,
            doubling_time: None,
            blow_up: None,
        }
    }

    /// Feed one sample; returns `true` when the run should stop.
    pub fn update(&mut self, t: f64, norm: f64) -> bool {
        if !norm.is_finite() || norm > BLOW_UP_FACTOR * self.initial.max(f64::MIN_POSITIVE) {
            self.blow_up.get_or_insert(t);
            return true;
        }
        if self.doubling_time.is_none() && norm >= 2.0 * self.initial && self.initial > 0.0 {
            self.doubling_time = Some(t);
        }
        false
    }

    pub fn initial(&self) -> f64 {
        self.initial
    }

    pub fn doubling_time(&self) -> Option<f64> {
        self.doubling_time
    }

    pub fn blow_up(&self) -> Option<f64> {
        self.blow_up
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        let mut c = SolverConfig::default();
        c.dt = 0.0;
        assert!(c.validate().is_err());
        let mut c = SolverConfig::default();
        c.diagnostics_stride = 0;
        assert!(c.validate().is_err());
    }

    #[test]
    fn monitor_doubling_and_blow_up() {
        let mut m = NormMonitor::new(1.0);
        assert!(!m.update(0.1, 1.5));
        assert!(m.doubling_time().is_none());
        assert!(!m.update(0.2, 2.1));
        assert_eq!(m.doubling_time(), Some(0.2));
        assert!(m.update(0.3, 2e3));
        assert_eq!(m.blow_up(), Some(0.3));

        let mut m = NormMonitor::new(1.0);
        assert!(m.update(0.5, f64::NAN));
        assert_eq!(m.blow_up(), Some(0.5));
    }
}
