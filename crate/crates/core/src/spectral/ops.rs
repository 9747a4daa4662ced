//! Fourier multiplier operators, norms and dealiased products.

use ndarray::Array2;
use num_complex::Complex64;

use super::field::SpectralField;
use super::profile::smooth_cutoff;
use crate::error::Result;

/// A scalar symbol `m(xi)` with a declared value at `xi = 0`.
pub struct MultiplierSymbol {
    eval: Box<dyn Fn(f64, f64) -> Complex64 + Send + Sync>,
    at_zero: Complex64,
}

impl MultiplierSymbol {
    pub fn new(
        eval: impl Fn(f64, f64) -> Complex64 + Send + Sync + 'static,
        at_zero: Complex64,
    ) -> Self {
        Self {
            eval: Box::new(eval),
            at_zero,
        }
    }

    /// Symbol depending only on `|xi|`.
    pub fn radial(
        eval: impl Fn(f64) -> Complex64 + Send + Sync + 'static,
        at_zero: Complex64,
    ) -> Self {
        Self::new(move |kx, ky| eval((kx * kx + ky * ky).sqrt()), at_zero)
    }

    pub fn value(&self, kx: f64, ky: f64) -> Complex64 {
        if kx == 0.0 && ky == 0.0 {
            self.at_zero
        } else {
            (self.eval)(kx, ky)
        }
    }
}

/// Apply a symbol given as a closure over `(kx, ky)`; the closure is also
/// consulted at the zero mode.
pub(crate) fn map_symbol(f: &SpectralField, sym: impl Fn(f64, f64) -> Complex64) -> SpectralField {
    let grid = f.grid().clone();
    let mut coeffs = f.coeffs().clone();
    for ((j, k), c) in coeffs.indexed_iter_mut() {
        let (kx, ky) = grid.wavenumber(j, k);
        *c *= sym(kx, ky);
    }
    SpectralField::from_coeffs(grid, coeffs).expect("shape preserved")
}

pub fn apply_multiplier(f: &SpectralField, m: &MultiplierSymbol) -> SpectralField {
    map_symbol(f, |kx, ky| m.value(kx, ky))
}

/// Riesz transform `R_j`, symbol `-i*xi_j/|xi|`, zero mode mapped to 0.
pub fn riesz(axis: usize, f: &SpectralField) -> SpectralField {
    assert!(axis == 1 || axis == 2, "axis must be 1 or 2");
    map_symbol(f, |kx, ky| {
        let mag = (kx * kx + ky * ky).sqrt();
        if mag == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            let comp = if axis == 1 { kx } else { ky };
            Complex64::new(0.0, -comp / mag)
        }
    })
}

/// Fractional derivative `D^s = |D|^s`; zero mode mapped to 0 unless `s = 0`.
pub fn fractional_derivative(s: f64, f: &SpectralField) -> SpectralField {
    if s == 0.0 {
        return f.clone();
    }
    map_symbol(f, |kx, ky| {
        let mag2 = kx * kx + ky * ky;
        if mag2 == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            Complex64::new(mag2.powf(s / 2.0), 0.0)
        }
    })
}

/// Bessel potential `Lambda^s = (1 + |D|^2)^(s/2)`.
pub fn bessel_potential(s: f64, f: &SpectralField) -> SpectralField {
    map_symbol(f, |kx, ky| {
        Complex64::new((1.0 + kx * kx + ky * ky).powf(s / 2.0), 0.0)
    })
}

/// High-frequency projection `P_{> eps^(-1/2)}`: multiplier `1 - chi(|xi| * sqrt(eps))`.
pub fn high_cutoff(eps: f64, f: &SpectralField) -> SpectralField {
    assert!(eps > 0.0);
    let root = eps.sqrt();
    map_symbol(f, |kx, ky| {
        let mag = (kx * kx + ky * ky).sqrt();
        Complex64::new(1.0 - smooth_cutoff(mag * root), 0.0)
    })
}

/// Low-frequency projection `P_{<= eps^(-1/2)}`; complements [`high_cutoff`].
pub fn low_cutoff(eps: f64, f: &SpectralField) -> SpectralField {
    assert!(eps > 0.0);
    let root = eps.sqrt();
    map_symbol(f, |kx, ky| {
        let mag = (kx * kx + ky * ky).sqrt();
        Complex64::new(smooth_cutoff(mag * root), 0.0)
    })
}

/// Sobolev norm `||f||_{H^s}` via the lattice sum
/// `(sum (1+|xi|^2)^s |c|^2 * Lx*Ly)^(1/2)`; `s = 0` is the L2 norm.
pub fn sobolev_norm(f: &SpectralField, s: f64) -> f64 {
    let grid = f.grid();
    let measure = grid.lx() * grid.ly();
    let mut total = 0.0;
    for ((j, k), c) in f.coeffs().indexed_iter() {
        let (kx, ky) = grid.wavenumber(j, k);
        let weight = (1.0 + kx * kx + ky * ky).powf(s);
        total += weight * c.norm_sqr();
    }
    (total * measure).sqrt()
}

/// Partial derivative along axis 1 or 2, symbol `i*xi_j`.
pub fn partial(axis: usize, f: &SpectralField) -> SpectralField {
    assert!(axis == 1 || axis == 2, "axis must be 1 or 2");
    map_symbol(f, |kx, ky| {
        let comp = if axis == 1 { kx } else { ky };
        Complex64::new(0.0, comp)
    })
}

pub fn grad(f: &SpectralField) -> (SpectralField, SpectralField) {
    (partial(1, f), partial(2, f))
}

pub fn div(fx: &SpectralField, fy: &SpectralField) -> SpectralField {
    &partial(1, fx) + &partial(2, fy)
}

/// Scalar curl of a 2D vector field, `d1 v2 - d2 v1`.
pub fn curl(vx: &SpectralField, vy: &SpectralField) -> SpectralField {
    &partial(1, vy) - &partial(2, vx)
}

/// 2/3-rule dealiasing: zero every mode with `|j| > nx/3` or `|k| > ny/3`.
pub fn dealias(f: &mut SpectralField) {
    let (nx, ny) = (f.grid().nx(), f.grid().ny());
    let jcut = nx / 3;
    let kcut = ny / 3;
    for ((j, k), c) in f.coeffs_mut().indexed_iter_mut() {
        let js = if j <= nx / 2 { j } else { nx - j };
        let ks = if k <= ny / 2 { k } else { ny - k };
        if js > jcut || ks > kcut {
            *c = Complex64::new(0.0, 0.0);
        }
    }
}

/// Pointwise product computed in physical space, dealiased on return.
pub fn dealiased_product(a: &SpectralField, b: &SpectralField) -> Result<SpectralField> {
    if !a.grid().same_as(b.grid()) {
        return Err(crate::error::Error::GridMismatch);
    }
    let pa = a.to_physical_complex();
    let pb = b.to_physical_complex();
    let prod: Array2<Complex64> = &pa * &pb;
    let mut f = SpectralField::from_physical_complex(a.grid().clone(), prod)?;
    dealias(&mut f);
    Ok(f)
}
