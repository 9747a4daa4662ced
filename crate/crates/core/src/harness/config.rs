//! Run configuration: the TOML schema and construction of initial data.
//!
//! Unknown keys are rejected everywhere so a typo in a config file fails
//! loudly instead of silently running with a default.

use std::path::Path;
use std::sync::Arc;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::diag::PhysicalState;
use crate::error::{Error, Result};
use crate::evolve::SolverConfig;
use crate::model::ABCDParams;
use crate::spectral::{dealias, Grid2D, SpectralField};

/// Grid section; defaults to the standard 256^2 torus of side `32 pi`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridSpec {
    pub nx: usize,
    pub ny: usize,
    pub lx: f64,
    pub ly: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            nx: 256,
            ny: 256,
            lx: 32.0 * std::f64::consts::PI,
            ly: 32.0 * std::f64::consts::PI,
        }
    }
}

impl GridSpec {
    pub fn build(&self) -> Result<Arc<Grid2D>> {
        Grid2D::new(self.nx, self.ny, self.lx, self.ly)
    }
}

/// Model section; defaults to the third-order-dispersion system `a = c = 1`,
/// `b = d = 0` with `epsilon = 0.1`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSpec {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub epsilon: f64,
}

impl Default for ModelSpec {
    fn default() -> Self {
        Self {
            a: 1.0,
            b: 0.0,
            c: 1.0,
            d: 0.0,
            epsilon: 0.1,
        }
    }
}

impl ModelSpec {
    pub fn build(&self) -> Result<ABCDParams> {
        ABCDParams::new(self.a, self.b, self.c, self.d, self.epsilon)
    }
}

/// Initial-data families. All of them produce curl-free velocity fields:
/// the velocity always comes from a scalar potential.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialSpec {
    /// Gaussian surface bump with a Gaussian velocity potential.
    Gaussian {
        amplitude: f64,
        width: f64,
        /// Bump centre; defaults to the domain centre.
        #[serde(default)]
        center: Option<[f64; 2]>,
    },
    /// A single Fourier harmonic in the surface with a matching potential.
    SingleMode { j: usize, k: usize, amplitude: f64 },
    /// Random band-limited data: independent coefficients on `|xi| <= band`
    /// drawn from the run's seeded generator, then symmetrised to real
    /// fields and de-aliased.
    RandomBandlimited { band: f64, amplitude: f64 },
}

impl Default for InitialSpec {
    fn default() -> Self {
        InitialSpec::Gaussian {
            amplitude: 0.1,
            width: 2.0,
            center: None,
        }
    }
}

/// Lifespan-sweep section: the decreasing list of `epsilon` values and the
/// integration horizon factor (`t_end = horizon_factor / sqrt(eps)`).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LifespanSpec {
    pub epsilons: Vec<f64>,
    pub horizon_factor: f64,
    /// Also run the linear control at each `epsilon` and require that it
    /// never doubles.
    pub linear_control: bool,
}

impl Default for LifespanSpec {
    fn default() -> Self {
        Self {
            epsilons: vec![0.2, 0.1, 0.05, 0.025],
            horizon_factor: 1.0,
            linear_control: true,
        }
    }
}

/// Top-level run configuration. The `seed` feeds a counter-based generator
/// so every random choice is reproducible; it can be overridden from the
/// command line.
#[derive(Debug, Clone, Serialize, Deserialize, Default)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub grid: GridSpec,
    pub model: ModelSpec,
    pub solver: SolverConfig,
    pub initial: InitialSpec,
    pub lifespan: LifespanSpec,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config serialization cannot fail")
    }

    pub fn validate(&self) -> Result<()> {
        self.grid.build()?;
        self.model.build()?;
        self.solver.validate()?;
        match &self.initial {
            InitialSpec::Gaussian { amplitude, width, .. } => {
                if !(*width > 0.0) || !amplitude.is_finite() {
                    return Err(Error::Config(format!(
                        "gaussian initial data needs width > 0 and finite amplitude, \
                         got width {width}, amplitude {amplitude}"
                    )));
                }
            }
            InitialSpec::SingleMode { j, k, .. } => {
                if *j >= self.grid.nx || *k >= self.grid.ny {
                    return Err(Error::Config(format!(
                        "single mode ({j}, {k}) outside the {}x{} grid",
                        self.grid.nx, self.grid.ny
                    )));
                }
            }
            InitialSpec::RandomBandlimited { band, amplitude } => {
                if !(*band > 0.0) || !(*amplitude > 0.0) {
                    return Err(Error::Config(format!(
                        "random data needs positive band and amplitude, \
                         got band {band}, amplitude {amplitude}"
                    )));
                }
            }
        }
        if self.lifespan.epsilons.windows(2).any(|w| w[0] <= w[1]) {
            return Err(Error::Config(
                "lifespan epsilons must be strictly decreasing".into(),
            ));
        }
        Ok(())
    }
}

/// Random real field with independent Gaussian-ish coefficients supported
/// on `|xi| <= band`, normalised to the requested `L^2` amplitude.
fn random_bandlimited(
    grid: &Arc<Grid2D>,
    band: f64,
    amplitude: f64,
    rng: &mut ChaCha8Rng,
) -> SpectralField {
    let mut f = SpectralField::zeros(grid.clone());
    {
        let coeffs = f.coeffs_mut();
        for j in 0..grid.nx() {
            for k in 0..grid.ny() {
                let (kx, ky) = grid.wavenumber(j, k);
                if (kx * kx + ky * ky).sqrt() <= band {
                    coeffs[[j, k]] =
                        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                }
            }
        }
    }
    // Symmetrise to a real field: average with the conjugate spectrum.
    let nx = grid.nx();
    let ny = grid.ny();
    let src = f.coeffs().clone();
    {
        let coeffs = f.coeffs_mut();
        for j in 0..nx {
            for k in 0..ny {
                let cj = Grid2D::conjugate_index(nx, j);
                let ck = Grid2D::conjugate_index(ny, k);
                coeffs[[j, k]] = 0.5 * (src[[j, k]] + src[[cj, ck]].conj());
            }
        }
    }
    f.remove_mean();
    // Drop the 2/3 band edge so products stay alias-free from step one.
    dealias(&mut f);
    let norm = crate::spectral::sobolev_norm(&f, 0.0);
    if norm > 0.0 {
        f = f.scaled(Complex64::new(amplitude / norm, 0.0));
    }
    f
}

/// Construct the configured initial state on `grid`. The state is mean-free
/// and its velocity is a gradient, so the vorticity vanishes identically.
pub fn build_initial(
    grid: &Arc<Grid2D>,
    spec: &InitialSpec,
    seed: u64,
) -> Result<PhysicalState> {
    let state = match spec {
        InitialSpec::Gaussian {
            amplitude,
            width,
            center,
        } => {
            let (cx, cy) = match center {
                Some([x, y]) => (*x, *y),
                None => (grid.lx() / 2.0, grid.ly() / 2.0),
            };
            let (amp, w) = (*amplitude, *width);
            let bump = move |x: f64, y: f64| {
                let dx = x - cx;
                let dy = y - cy;
                amp * (-(dx * dx + dy * dy) / (2.0 * w * w)).exp()
            };
            let mut eta = SpectralField::from_fn(grid.clone(), bump);
            eta.remove_mean();
            let mut phi = SpectralField::from_fn(grid.clone(), bump);
            phi.remove_mean();
            PhysicalState::from_potential(eta, &phi)?
        }
        InitialSpec::SingleMode { j, k, amplitude } => {
            let eta = SpectralField::harmonic(grid.clone(), *j, *k, *amplitude, 0.0);
            let phi = SpectralField::harmonic(grid.clone(), *j, *k, *amplitude, 0.0);
            PhysicalState::from_potential(eta, &phi)?
        }
        InitialSpec::RandomBandlimited { band, amplitude } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let eta = random_bandlimited(grid, *band, *amplitude, &mut rng);
            let phi = random_bandlimited(grid, *band, *amplitude, &mut rng);
            PhysicalState::from_potential(eta, &phi)?
        }
    };
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_round_trips_through_toml() {
        let cfg = ExperimentConfig::default();
        let text = cfg.to_toml_string();
        let back = ExperimentConfig::from_toml_str(&text).unwrap();
        assert_eq!(back.grid.nx, cfg.grid.nx);
        assert_eq!(back.seed, cfg.seed);
        assert_eq!(back.model.epsilon, cfg.model.epsilon);
    }

    #[test]
    fn unknown_keys_rejected() {
        let err = ExperimentConfig::from_toml_str("[grid]\nnz = 4\n");
        assert!(err.is_err());
        let err = ExperimentConfig::from_toml_str("mystery = 1\n");
        assert!(err.is_err());
    }

    #[test]
    fn bad_sections_rejected() {
        // Ill-posed model parameters must fail at load time.
        let text = "[model]\na = 1.0\nb = -1.0\nc = 1.0\nd = 0.0\nepsilon = 0.1\n";
        assert!(ExperimentConfig::from_toml_str(text).is_err());
        // Single mode outside the grid.
        let text = "[grid]\nnx = 16\nny = 16\n\n[initial]\nkind = \"single_mode\"\nj = 99\nk = 0\namplitude = 0.1\n";
        assert!(ExperimentConfig::from_toml_str(text).is_err());
        // Non-decreasing lifespan sweep.
        let text = "[lifespan]\nepsilons = [0.1, 0.2]\n";
        assert!(ExperimentConfig::from_toml_str(text).is_err());
    }

    #[test]
    fn initial_data_is_curl_free_and_mean_free() {
        let grid = Grid2D::new(64, 64, 8.0 * std::f64::consts::PI, 8.0 * std::f64::consts::PI)
            .unwrap();
        for spec in [
            InitialSpec::default(),
            InitialSpec::SingleMode {
                j: 3,
                k: 5,
                amplitude: 0.2,
            },
            InitialSpec::RandomBandlimited {
                band: 2.0,
                amplitude: 0.1,
            },
        ] {
            let u = build_initial(&grid, &spec, 7).unwrap();
            assert!(u.relative_curl() < 1e-12);
            assert!(u.eta.mean().norm() < 1e-12);
            assert!(crate::spectral::sobolev_norm(&u.eta, 0.0) > 0.0);
        }
    }

    #[test]
    fn random_data_reproducible_per_seed() {
        let grid = Grid2D::new(32, 32, 16.0, 16.0).unwrap();
        let spec = InitialSpec::RandomBandlimited {
            band: 3.0,
            amplitude: 0.5,
        };
        let a = build_initial(&grid, &spec, 42).unwrap();
        let b = build_initial(&grid, &spec, 42).unwrap();
        let c = build_initial(&grid, &spec, 43).unwrap();
        let diff = |x: &PhysicalState, y: &PhysicalState| {
            x.eta
                .coeffs()
                .iter()
                .zip(y.eta.coeffs().iter())
                .all(|(p, q)| p == q)
        };
        assert!(diff(&a, &b));
        assert!(!diff(&a, &c));
    }
}
