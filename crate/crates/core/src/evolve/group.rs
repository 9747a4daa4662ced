//! The exact linear groups `e^{+-i t phi_eps(D)}` with
//! `phi_eps(xi) = eps|xi|^3 - |xi|`.

use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;

use crate::spectral::{Grid2D, SpectralField};

/// Dispersive phase `phi_eps(xi) = eps|xi|^3 - |xi|`; vanishes on the
/// circle `|xi| = eps^{-1/2}`.
pub fn phase(eps: f64, kx: f64, ky: f64) -> f64 {
    let m = (kx * kx + ky * ky).sqrt();
    eps * m * m * m - m
}

/// Apply `e^{sign * i * t * phi_eps(D)}` exactly; `sign` must be `+-1`.
pub fn apply_group(eps: f64, sign: f64, t: f64, f: &SpectralField) -> SpectralField {
    assert!(sign == 1.0 || sign == -1.0, "sign must be +-1, got {sign}");
    let g = f.grid().clone();
    let mut out = f.clone();
    for j in 0..g.nx() {
        for k in 0..g.ny() {
            let (kx, ky) = g.wavenumber(j, k);
            let theta = sign * t * phase(eps, kx, ky);
            out.coeffs_mut()[[j, k]] *= Complex64::from_polar(1.0, theta);
        }
    }
    out
}

/// Phase tables for a fixed step size: half- and full-step factors for
/// both branches, so the integrating-factor stepper pays no trig inside
/// the time loop.
pub struct LinearPropagator {
    grid: Arc<Grid2D>,
    half_plus: Array2<Complex64>,
    full_plus: Array2<Complex64>,
}

impl LinearPropagator {
    pub fn new(grid: Arc<Grid2D>, eps: f64, dt: f64) -> Self {
        let table = |t: f64| {
            Array2::from_shape_fn((grid.nx(), grid.ny()), |(j, k)| {
                let (kx, ky) = grid.wavenumber(j, k);
                Complex64::from_polar(1.0, t * phase(eps, kx, ky))
            })
        };
        Self {
            half_plus: table(0.5 * dt),
            full_plus: table(dt),
            grid,
        }
    }

    pub fn grid(&self) -> &Arc<Grid2D> {
        &self.grid
    }

    /// Multiply by `e^{sign * i * phi * dt/2}` in place.
    pub fn apply_half(&self, f: &mut SpectralField, sign: f64) {
        Self::mul(&self.half_plus, f, sign);
    }

    /// Multiply by `e^{sign * i * phi * dt}` in place.
    pub fn apply_full(&self, f: &mut SpectralField, sign: f64) {
        Self::mul(&self.full_plus, f, sign);
    }

    fn mul(table: &Array2<Complex64>, f: &mut SpectralField, sign: f64) {
        assert!(sign == 1.0 || sign == -1.0);
        if sign == 1.0 {
            f.coeffs_mut().zip_mut_with(table, |c, p| *c *= p);
        } else {
            f.coeffs_mut().zip_mut_with(table, |c, p| *c *= p.conj());
        }
    }
}
