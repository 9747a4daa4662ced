//! Discrete Fourier calculus on a periodic 2D grid.
//!
//! Fields live in frequency space (`SpectralField`); physical-space values
//! are produced on demand. All differential operators are Fourier
//! multipliers evaluated exactly on the wavenumber lattice.

mod fft;
mod field;
mod grid;
mod ops;
mod profile;

pub use field::SpectralField;
pub use grid::Grid2D;
pub use ops::{
    apply_multiplier, bessel_potential, curl, dealias, dealiased_product, div,
    fractional_derivative, grad, high_cutoff, low_cutoff, partial, riesz, sobolev_norm,
    MultiplierSymbol,
};
pub use profile::{radial_bump, smooth_cutoff, smooth_step};
