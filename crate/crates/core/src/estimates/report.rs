//! Report plumbing shared by all estimate measurements: the result record,
//! log-log fitting, and the unit-cube partition of the torus.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::spectral::Grid2D;

/// Outcome of one estimate measurement. `measured` and `reference` are
/// sampled on the shared `abscissae`; exponent fits carry their residual.
#[derive(Debug, Clone, Serialize)]
pub struct EstimateReport {
    pub name: String,
    pub params: Vec<(String, f64)>,
    pub abscissae: Vec<f64>,
    pub measured: Vec<f64>,
    pub reference: Vec<f64>,
    /// Named fitted exponents, e.g. `("small_t_slope", -0.66)`.
    pub fitted: Vec<(String, f64)>,
    pub fit_residual: f64,
    /// Measured-to-bound ratio where the estimate is a single inequality.
    pub ratio: Option<f64>,
    pub pass: bool,
    pub notes: Vec<String>,
}

impl EstimateReport {
    pub fn new(name: &str) -> Self {
        Self {
            name: name.to_string(),
            params: Vec::new(),
            abscissae: Vec::new(),
            measured: Vec::new(),
            reference: Vec::new(),
            fitted: Vec::new(),
            fit_residual: 0.0,
            ratio: None,
            pass: true,
            notes: Vec::new(),
        }
    }

    pub fn with_param(mut self, key: &str, value: f64) -> Self {
        self.params.push((key.to_string(), value));
        self
    }

    pub fn fitted_value(&self, key: &str) -> Option<f64> {
        self.fitted
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| *v)
    }
}

/// Least-squares slope/intercept of `ln y` against `ln x`; returns
/// `(slope, intercept, rms residual)`. Pairs with nonpositive entries are
/// rejected.
pub fn fit_loglog(xs: &[f64], ys: &[f64]) -> Result<(f64, f64, f64)> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::Precondition(format!(
            "log-log fit needs >= 2 paired samples, got {} and {}",
            xs.len(),
            ys.len()
        )));
    }
    if xs.iter().chain(ys).any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::Precondition(
            "log-log fit requires positive finite samples".into(),
        ));
    }
    let n = xs.len() as f64;
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Precondition("log-log fit abscissae are constant".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| {
            let p = intercept + slope * x;
            (y - p) * (y - p)
        })
        .sum();
    Ok((slope, intercept, (rss / n).sqrt()))
}

/// Partition of the torus into axis-aligned cubes of unit physical size
/// (the last cube in each direction absorbs the fractional remainder, so
/// the tiling is exact). The degenerate single-cube partition turns the
/// cube-wise suprema into global ones.
#[derive(Debug, Clone)]
pub struct CubePartition {
    grid: Arc<Grid2D>,
    ncx: usize,
    ncy: usize,
}

impl CubePartition {
    /// Unit cubes; domains shorter than one unit get a single cube.
    pub fn unit(grid: Arc<Grid2D>) -> Self {
        let ncx = (grid.lx().floor() as usize).max(1);
        let ncy = (grid.ly().floor() as usize).max(1);
        Self { grid, ncx, ncy }
    }

    /// One cube covering the whole domain.
    pub fn single(grid: Arc<Grid2D>) -> Self {
        Self {
            grid,
            ncx: 1,
            ncy: 1,
        }
    }

    pub fn ncx(&self) -> usize {
        self.ncx
    }

    pub fn ncy(&self) -> usize {
        self.ncy
    }

    pub fn num_cubes(&self) -> usize {
        self.ncx * self.ncy
    }

    /// Cube index of grid point `(j, k)`: cube edges sit at integer
    /// physical coordinates, except that the last cube absorbs the
    /// remainder (and the single-cube case maps everything to 0).
    pub fn cube_of(&self, j: usize, k: usize) -> (usize, usize) {
        let (x, y) = self.grid.point(j, k);
        let clamp = |v: f64, n: usize| if n == 1 { 0 } else { (v.floor() as usize).min(n - 1) };
        (clamp(x, self.ncx), clamp(y, self.ncy))
    }

    /// Flat cube index of grid point `(j, k)`.
    pub fn flat_index(&self, j: usize, k: usize) -> usize {
        let (cx, cy) = self.cube_of(j, k);
        cx * self.ncy + cy
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn loglog_fit_recovers_power_law() {
        let xs: Vec<f64> = (1..20).map(|i| i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 3.7 * x.powf(-1.5)).collect();
        let (slope, intercept, residual) = fit_loglog(&xs, &ys).unwrap();
        assert!((slope + 1.5).abs() < 1e-12);
        assert!((intercept - 3.7f64.ln()).abs() < 1e-12);
        assert!(residual < 1e-12);
    }

    #[test]
    fn loglog_fit_rejects_bad_input() {
        assert!(fit_loglog(&[1.0], &[1.0]).is_err());
        assert!(fit_loglog(&[1.0, -2.0], &[1.0, 1.0]).is_err());
        assert!(fit_loglog(&[1.0, 1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn partition_tiles_exactly() {
        let g = Grid2D::new(64, 64, 10.5, 7.0).unwrap();
        let p = CubePartition::unit(g.clone());
        assert_eq!(p.ncx(), 10);
        assert_eq!(p.ncy(), 7);
        let mut counts = vec![0usize; p.num_cubes()];
        for j in 0..g.nx() {
            for k in 0..g.ny() {
                counts[p.flat_index(j, k)] += 1;
            }
        }
        // Every point lands in exactly one cube and every cube is nonempty.
        assert_eq!(counts.iter().sum::<usize>(), g.nx() * g.ny());
        assert!(counts.iter().all(|&c| c > 0));
    }

    #[test]
    fn single_cube_collects_everything() {
        let g = Grid2D::new(16, 16, 9.0, 9.0).unwrap();
        let p = CubePartition::single(g.clone());
        for j in 0..g.nx() {
            for k in 0..g.ny() {
                assert_eq!(p.flat_index(j, k), 0);
            }
        }
    }

    #[test]
    fn small_domain_gets_one_cube() {
        let g = Grid2D::new(16, 16, 0.5, 0.5).unwrap();
        let p = CubePartition::unit(g);
        assert_eq!(p.num_cubes(), 1);
    }
}
