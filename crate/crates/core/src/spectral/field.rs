//! Scalar fields stored as Fourier coefficients.

use std::sync::Arc;

use ndarray::Array2;
use num_complex::Complex64;

use super::fft::{fft2_forward, fft2_inverse};
use super::grid::Grid2D;
use crate::error::{Error, Result};

/// Complex Fourier coefficients of a scalar field on a [`Grid2D`].
///
/// `coeffs[[j, k]]` multiplies `exp(i*(kx(j)*x + ky(k)*y))`. Real-valued
/// physical fields have Hermitian-symmetric coefficients.
#[derive(Debug, Clone)]
pub struct SpectralField {
    grid: Arc<Grid2D>,
    coeffs: Array2<Complex64>,
}

impl SpectralField {
    pub fn zeros(grid: Arc<Grid2D>) -> Self {
        let coeffs = Array2::zeros((grid.nx(), grid.ny()));
        Self { grid, coeffs }
    }

    pub fn from_coeffs(grid: Arc<Grid2D>, coeffs: Array2<Complex64>) -> Result<Self> {
        if coeffs.dim() != (grid.nx(), grid.ny()) {
            return Err(Error::ShapeMismatch {
                expected: (grid.nx(), grid.ny()),
                got: coeffs.dim(),
            });
        }
        Ok(Self { grid, coeffs })
    }

    /// Forward transform of a real physical-space array.
    pub fn from_physical(grid: Arc<Grid2D>, physical: &Array2<f64>) -> Result<Self> {
        if physical.dim() != (grid.nx(), grid.ny()) {
            return Err(Error::ShapeMismatch {
                expected: (grid.nx(), grid.ny()),
                got: physical.dim(),
            });
        }
        let mut coeffs = physical.mapv(|v| Complex64::new(v, 0.0));
        fft2_forward(&mut coeffs);
        Ok(Self { grid, coeffs })
    }

    /// Forward transform of a complex physical-space array.
    pub fn from_physical_complex(grid: Arc<Grid2D>, physical: Array2<Complex64>) -> Result<Self> {
        if physical.dim() != (grid.nx(), grid.ny()) {
            return Err(Error::ShapeMismatch {
                expected: (grid.nx(), grid.ny()),
                got: physical.dim(),
            });
        }
        let mut coeffs = physical;
        fft2_forward(&mut coeffs);
        Ok(Self { grid: grid.clone(), coeffs })
    }

    /// Sample a function of physical coordinates onto the grid and transform.
    pub fn from_fn(grid: Arc<Grid2D>, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut physical = Array2::zeros((grid.nx(), grid.ny()));
        for j in 0..grid.nx() {
            for k in 0..grid.ny() {
                let (x, y) = grid.point(j, k);
                physical[[j, k]] = f(x, y);
            }
        }
        Self::from_physical(grid, &physical).expect("shape matches by construction")
    }

    /// A single plane wave `amp * exp(i*xi0.x)` at lattice index `(j, k)`.
    pub fn plane_wave(grid: Arc<Grid2D>, j: usize, k: usize, amp: Complex64) -> Self {
        let mut field = Self::zeros(grid);
        field.coeffs[[j, k]] = amp;
        field
    }

    /// Real single harmonic `amp * cos(xi0.x + phase)` at lattice index `(j, k)`.
    pub fn harmonic(grid: Arc<Grid2D>, j: usize, k: usize, amp: f64, phase: f64) -> Self {
        let mut field = Self::zeros(grid.clone());
        let half = 0.5 * amp * Complex64::new(phase.cos(), phase.sin());
        let nj = Grid2D::conjugate_index(grid.nx(), j);
        let nk = Grid2D::conjugate_index(grid.ny(), k);
        field.coeffs[[j, k]] += half;
        field.coeffs[[nj, nk]] += half.conj();
        field
    }

    pub fn grid(&self) -> &Arc<Grid2D> {
        &self.grid
    }

    pub fn coeffs(&self) -> &Array2<Complex64> {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut Array2<Complex64> {
        &mut self.coeffs
    }

    /// Inverse transform; returns the complex physical-space samples.
    pub fn to_physical_complex(&self) -> Array2<Complex64> {
        let mut data = self.coeffs.clone();
        fft2_inverse(&mut data);
        data
    }

    /// Inverse transform, discarding the imaginary part.
    pub fn to_physical(&self) -> Array2<f64> {
        self.to_physical_complex().mapv(|c| c.re)
    }

    /// Largest imaginary residue of the physical samples; zero (to roundoff)
    /// for Hermitian coefficient arrays.
    pub fn imag_residue(&self) -> f64 {
        self.to_physical_complex()
            .iter()
            .fold(0.0f64, |m, c| m.max(c.im.abs()))
    }

    /// Max deviation from Hermitian symmetry `c[-j,-k] = conj(c[j,k])`.
    pub fn hermitian_residue(&self) -> f64 {
        let (nx, ny) = self.coeffs.dim();
        let mut worst = 0.0f64;
        for j in 0..nx {
            let nj = Grid2D::conjugate_index(nx, j);
            for k in 0..ny {
                let nk = Grid2D::conjugate_index(ny, k);
                let d = (self.coeffs[[nj, nk]] - self.coeffs[[j, k]].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    /// Zero-frequency coefficient (the mean of the physical field).
    pub fn mean(&self) -> Complex64 {
        self.coeffs[[0, 0]]
    }

    /// Project out the zero mode.
    pub fn remove_mean(&mut self) {
        self.coeffs[[0, 0]] = Complex64::new(0.0, 0.0);
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        Self {
            grid: self.grid.clone(),
            coeffs: self.coeffs.mapv(|c| c * factor),
        }
    }

    pub fn add_assign_scaled(&mut self, other: &Self, factor: Complex64) {
        self.coeffs.zip_mut_with(&other.coeffs, |a, b| *a += factor * b);
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Max physical-space magnitude (grid L-infinity norm).
    pub fn max_abs(&self) -> f64 {
        self.to_physical_complex()
            .iter()
            .fold(0.0f64, |m, c| m.max(c.norm()))
    }
}

impl std::ops::Add<&SpectralField> for &SpectralField {
    type Output = SpectralField;
    fn add(self, rhs: &SpectralField) -> SpectralField {
        SpectralField {
            grid: self.grid.clone(),
            coeffs: &self.coeffs + &rhs.coeffs,
        }
    }
}

impl std::ops::Sub<&SpectralField> for &SpectralField {
    type Output = SpectralField;
    fn sub(self, rhs: &SpectralField) -> SpectralField {
        SpectralField {
            grid: self.grid.clone(),
            coeffs: &self.coeffs - &rhs.coeffs,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> Arc<Grid2D> {
        Grid2D::new(32, 32, 2.0 * std::f64::consts::PI, 2.0 * std::f64::consts::PI).unwrap()
    }

    #[test]
    fn constant_field_has_only_dc_component() {
        let g = grid();
        let f = SpectralField::from_fn(g, |_, _| 1.0);
        assert!((f.mean() - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        let energy_off_dc: f64 = f
            .coeffs()
            .indexed_iter()
            .filter(|((j, k), _)| !(*j == 0 && *k == 0))
            .map(|(_, c)| c.norm_sqr())
            .sum();
        assert!(energy_off_dc < 1e-24);
    }

    #[test]
    fn cosine_excites_two_conjugate_modes() {
        let g = grid();
        let f = SpectralField::from_fn(g.clone(), |x, _| x.cos());
        let nonzero: Vec<_> = f
            .coeffs()
            .indexed_iter()
            .filter(|(_, c)| c.norm() > 1e-12)
            .map(|(idx, c)| (idx, *c))
            .collect();
        assert_eq!(nonzero.len(), 2);
        assert_eq!(nonzero[0].0, (1, 0));
        assert_eq!(nonzero[1].0, (31, 0));
        assert!((nonzero[0].1 - Complex64::new(0.5, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn round_trip_is_identity() {
        let g = grid();
        // Deterministic pseudo-random field.
        let mut state = 0x243f6a8885a308d3u64;
        let mut next = move || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let physical = Array2::from_shape_fn((32, 32), |_| next());
        let f = SpectralField::from_physical(g, &physical).unwrap();
        let back = f.to_physical();
        let max_err = physical
            .iter()
            .zip(back.iter())
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()));
        assert!(max_err < 1e-12, "round-trip error {max_err}");
        assert!(f.hermitian_residue() < 1e-13);
    }

    #[test]
    fn shape_mismatch_is_rejected() {
        let g = grid();
        let physical = Array2::zeros((16, 32));
        assert!(SpectralField::from_physical(g, &physical).is_err());
    }
}
