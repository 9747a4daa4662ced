//! The four-parameter family of 2D Boussinesq systems: parameter
//! validation, model classification, the linear dispersion relation and the
//! Hamiltonian of the scaled KdV-KdV system.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diag::PhysicalState;
use crate::error::{Error, Result};
use crate::spectral::{dealiased_product, fractional_derivative, sobolev_norm};

/// Modeling parameters `(a, b, c, d)` plus the long-wave parameter
/// `epsilon` in `(0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ABCDParams {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub epsilon: f64,
}

impl ABCDParams {
    pub fn new(a: f64, b: f64, c: f64, d: f64, epsilon: f64) -> Result<Self> {
        let p = Self { a, b, c, d, epsilon };
        if !(epsilon > 0.0 && epsilon <= 1.0) {
            return Err(Error::InvalidParams(format!(
                "epsilon must lie in (0, 1], got {epsilon}"
            )));
        }
        if !p.linearly_wellposed() {
            return Err(Error::InvalidParams(format!(
                "(a,b,c,d)=({a},{b},{c},{d}) is not linearly well-posed: \
                 need b>=0, d>=0 and either (a<=0 and c<=0) or a=c"
            )));
        }
        Ok(p)
    }

    /// Scaled KdV-KdV parameters: `a = c = 1`, `b = d = 0`.
    pub fn kdv_kdv(epsilon: f64) -> Result<Self> {
        Self::new(1.0, 0.0, 1.0, 0.0, epsilon)
    }

    /// `b >= 0`, `d >= 0`, and either `a <= 0, c <= 0` or `a = c`.
    pub fn linearly_wellposed(&self) -> bool {
        self.b >= 0.0 && self.d >= 0.0 && ((self.a <= 0.0 && self.c <= 0.0) || self.a == self.c)
    }

    /// Deviation of `a+b+c+d` from the physical modeling constraint `1/3`.
    pub fn constraint_defect(&self) -> f64 {
        self.a + self.b + self.c + self.d - 1.0 / 3.0
    }

    /// Surface tension shifts `c` to `c - tau`; all other parameters are
    /// unchanged. Returns an error if the shifted system is ill-posed.
    pub fn with_surface_tension(&self, tau: f64) -> Result<Self> {
        Self::new(self.a, self.b, self.c - tau, self.d, self.epsilon)
    }
}

/// Taxonomy of the distinguished parameter regimes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ModelClass {
    /// `b = d = 0`, `a = c > 0`: third-order dispersion in both equations.
    KdVKdV,
    /// `a < 0`, `c < 0`, `b = 0`, `d > 0`: second-order dispersion.
    SchrodingerB0,
    /// `a < 0`, `c < 0`, `b > 0`, `d = 0`: second-order dispersion.
    SchrodingerD0,
    /// `a < 0`, `c < 0`, `b > 0`, `d > 0`: first-order (wave-like).
    Generic,
    /// `a = c = 0`, `b > 0`, `d > 0`: dispersion decays like `1/|xi|`.
    BBMBBM,
    /// Any other well-posed combination.
    Other,
}

/// Classification is a total function of the sign pattern of `(a,b,c,d)`.
pub fn classify(p: &ABCDParams) -> ModelClass {
    let (a, b, c, d) = (p.a, p.b, p.c, p.d);
    if b == 0.0 && d == 0.0 && a == c && a > 0.0 {
        ModelClass::KdVKdV
    } else if a < 0.0 && c < 0.0 && b == 0.0 && d > 0.0 {
        ModelClass::SchrodingerB0
    } else if a < 0.0 && c < 0.0 && b > 0.0 && d == 0.0 {
        ModelClass::SchrodingerD0
    } else if a < 0.0 && c < 0.0 && b > 0.0 && d > 0.0 {
        ModelClass::Generic
    } else if a == 0.0 && c == 0.0 && b > 0.0 && d > 0.0 {
        ModelClass::BBMBBM
    } else {
        ModelClass::Other
    }
}

/// Validation report: a hard pass/fail on linear well-posedness, a soft
/// warning when `a+b+c+d != 1/3`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValidationReport {
    pub wellposed: bool,
    pub constraint_satisfied: bool,
    pub constraint_defect: f64,
    pub class: ModelClass,
    pub warnings: Vec<String>,
}

pub fn validate(a: f64, b: f64, c: f64, d: f64, epsilon: f64) -> ValidationReport {
    let p = ABCDParams { a, b, c, d, epsilon };
    let wellposed = (epsilon > 0.0 && epsilon <= 1.0) && p.linearly_wellposed();
    let defect = p.constraint_defect();
    let constraint_satisfied = defect.abs() < 1e-12;
    let mut warnings = Vec::new();
    if !wellposed {
        warnings.push(
            "linear ill-posedness: need b>=0, d>=0 and either (a<=0, c<=0) or a=c".to_string(),
        );
    }
    if !constraint_satisfied {
        warnings.push(format!(
            "a+b+c+d = {} differs from 1/3 (rescaled system)",
            a + b + c + d
        ));
    }
    ValidationReport {
        wellposed,
        constraint_satisfied,
        constraint_defect: defect,
        class: classify(&p),
        warnings,
    }
}

/// Eigenvalues of the linearized system at radial frequency `|xi|`:
/// `lambda_pm = +-i |xi| sqrt((1-eps*a|xi|^2)(1-eps*c|xi|^2)
///                          / ((1+eps*d|xi|^2)(1+eps*b|xi|^2)))`.
pub fn eigenvalues(p: &ABCDParams, xi: f64) -> Result<(Complex64, Complex64)> {
    let k2 = xi * xi;
    let eps = p.epsilon;
    let num = (1.0 - eps * p.a * k2) * (1.0 - eps * p.c * k2);
    let den = (1.0 + eps * p.d * k2) * (1.0 + eps * p.b * k2);
    let radicand = num / den;
    if radicand < 0.0 {
        return Err(Error::IllPosed { xi, radicand });
    }
    let omega = xi * radicand.sqrt();
    let plus = Complex64::new(0.0, omega);
    Ok((plus, -plus))
}

/// Asymptotic power of `|lambda_+|` in `|xi|` as `|xi| -> infinity`:
/// `1 + [a!=0] + [c!=0] - [b!=0] - [d!=0]`.
pub fn growth_order(p: &ABCDParams) -> i32 {
    let ind = |x: f64| if x != 0.0 { 1 } else { 0 };
    1 + ind(p.a) + ind(p.c) - ind(p.b) - ind(p.d)
}

/// Dispersion summary: closure for `lambda_+` and the asymptotic order.
pub struct DispersionInfo {
    pub params: ABCDParams,
    pub growth_order: i32,
}

impl DispersionInfo {
    pub fn new(p: &ABCDParams) -> Self {
        Self {
            params: *p,
            growth_order: growth_order(p),
        }
    }

    pub fn lambda_plus(&self, xi: f64) -> Result<Complex64> {
        Ok(eigenvalues(&self.params, xi)?.0)
    }

    /// Log-log slope of `|lambda_+|` measured over `|xi| in [lo, hi]`.
    pub fn measured_slope(&self, lo: f64, hi: f64) -> Result<f64> {
        let l1 = self.lambda_plus(lo)?.norm();
        let l2 = self.lambda_plus(hi)?.norm();
        Ok((l2 / l1).ln() / (hi / lo).ln())
    }
}

/// Hamiltonian of the scaled KdV-KdV system:
/// `H_eps = (1/2) integral( eps|grad eta|^2 + eps|grad v|^2
///          - eta^2 - |v|^2 - eps * eta * |v|^2 )`.
///
/// Quadratic terms by Plancherel, the cubic term by a dealiased physical
/// product integrated via its zero mode.
pub fn hamiltonian(u: &PhysicalState, eps: f64) -> Result<f64> {
    let area = u.grid().lx() * u.grid().ly();
    let grad_sq = |f| sobolev_norm(&fractional_derivative(1.0, f), 0.0).powi(2);
    let l2_sq = |f| sobolev_norm(f, 0.0).powi(2);

    let quadratic = eps * (grad_sq(&u.eta) + grad_sq(&u.v1) + grad_sq(&u.v2))
        - l2_sq(&u.eta)
        - l2_sq(&u.v1)
        - l2_sq(&u.v2);

    let speed2 = &dealiased_product(&u.v1, &u.v1)? + &dealiased_product(&u.v2, &u.v2)?;
    let cubic = dealiased_product(&u.eta, &speed2)?.mean().re * area;

    Ok(0.5 * (quadratic - eps * cubic))
}
