//! Periodic computational torus and its wavenumber lattice.

use std::sync::Arc;

use crate::error::{Error, Result};

/// Periodic grid on `[0, Lx) x [0, Ly)` with `nx x ny` points.
///
/// The wavenumber lattice is `xi = 2*pi*(j/Lx, k/Ly)` in standard FFT
/// ordering: index `j` maps to the signed integer `j` for `j <= nx/2` and
/// `j - nx` otherwise, so index `-j` aliases `nx - j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2D {
    nx: usize,
    ny: usize,
    lx: f64,
    ly: f64,
    kx: Vec<f64>,
    ky: Vec<f64>,
}

impl Grid2D {
    pub fn new(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<Arc<Self>> {
        if nx < 8 || ny < 8 || nx % 2 != 0 || ny % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "grid sizes must be even and >= 8, got {nx}x{ny}"
            )));
        }
        if !(lx > 0.0 && ly > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "domain lengths must be positive, got {lx}x{ly}"
            )));
        }
        let kx = wavenumbers(nx, lx);
        let ky = wavenumbers(ny, ly);
        Ok(Arc::new(Self {
            nx,
            ny,
            lx,
            ly,
            kx,
            ky,
        }))
    }

    /// Default desk-scale grid: 256^2 points on a `32*pi` square torus.
    pub fn default_torus() -> Arc<Self> {
        Self::new(256, 256, 32.0 * std::f64::consts::PI, 32.0 * std::f64::consts::PI)
            .expect("default grid is valid")
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn lx(&self) -> f64 {
        self.lx
    }

    pub fn ly(&self) -> f64 {
        self.ly
    }

    /// Grid spacing along x.
    pub fn dx(&self) -> f64 {
        self.lx / self.nx as f64
    }

    /// Grid spacing along y.
    pub fn dy(&self) -> f64 {
        self.ly / self.ny as f64
    }

    /// Area of one grid cell, the quadrature weight for physical sums.
    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dy()
    }

    /// Wavenumber component `kx` for FFT index `j`.
    pub fn kx(&self, j: usize) -> f64 {
        self.kx[j]
    }

    /// Wavenumber component `ky` for FFT index `k`.
    pub fn ky(&self, k: usize) -> f64 {
        self.ky[k]
    }

    /// Wavenumber vector at lattice index `(j, k)`.
    pub fn wavenumber(&self, j: usize, k: usize) -> (f64, f64) {
        (self.kx[j], self.ky[k])
    }

    /// Physical coordinates of grid point `(j, k)`.
    pub fn point(&self, j: usize, k: usize) -> (f64, f64) {
        (j as f64 * self.dx(), k as f64 * self.dy())
    }

    /// Largest wavenumber magnitude on the lattice.
    pub fn k_max(&self) -> f64 {
        let kx = std::f64::consts::PI * self.nx as f64 / self.lx;
        let ky = std::f64::consts::PI * self.ny as f64 / self.ly;
        (kx * kx + ky * ky).sqrt()
    }

    /// FFT index of the negated mode, `-j mod n`.
    pub fn conjugate_index(n: usize, j: usize) -> usize {
        if j == 0 {
            0
        } else {
            n - j
        }
    }

    pub fn same_as(&self, other: &Grid2D) -> bool {
        self.nx == other.nx && self.ny == other.ny && self.lx == other.lx && self.ly == other.ly
    }
}

fn wavenumbers(n: usize, l: f64) -> Vec<f64> {
    let scale = 2.0 * std::f64::consts::PI / l;
    (0..n)
        .map(|i| {
            let signed = if i <= n / 2 {
                i as isize
            } else {
                i as isize - n as isize
            };
            signed as f64 * scale
        })
        .collect()
}
