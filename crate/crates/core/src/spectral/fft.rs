//! Cached 2D FFT plans built on rustfft.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use ndarray::Array2;
use num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

struct Plans {
    fwd_row: Arc<dyn Fft<f64>>,
    inv_row: Arc<dyn Fft<f64>>,
    fwd_col: Arc<dyn Fft<f64>>,
    inv_col: Arc<dyn Fft<f64>>,
}

fn plans_for(nx: usize, ny: usize) -> Arc<Plans> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<Plans>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap();
    guard
        .entry((nx, ny))
        .or_insert_with(|| {
            let mut planner = FftPlanner::new();
            Arc::new(Plans {
                fwd_row: planner.plan_fft(ny, FftDirection::Forward),
                inv_row: planner.plan_fft(ny, FftDirection::Inverse),
                fwd_col: planner.plan_fft(nx, FftDirection::Forward),
                inv_col: planner.plan_fft(nx, FftDirection::Inverse),
            })
        })
        .clone()
}

fn transform_rows(data: &mut Array2<Complex64>, fft: &Arc<dyn Fft<f64>>) {
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    for mut row in data.rows_mut() {
        let slice = row.as_slice_mut().expect("rows of standard layout array");
        fft.process_with_scratch(slice, &mut scratch);
    }
}

fn transform_cols(data: &mut Array2<Complex64>, fft: &Arc<dyn Fft<f64>>) {
    let nx = data.nrows();
    let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
    let mut col = vec![Complex64::default(); nx];
    for k in 0..data.ncols() {
        for j in 0..nx {
            col[j] = data[[j, k]];
        }
        fft.process_with_scratch(&mut col, &mut scratch);
        for j in 0..nx {
            data[[j, k]] = col[j];
        }
    }
}

/// In-place 2D forward FFT with `1/(nx*ny)` normalization.
pub fn fft2_forward(data: &mut Array2<Complex64>) {
    let (nx, ny) = data.dim();
    let plans = plans_for(nx, ny);
    transform_rows(data, &plans.fwd_row);
    transform_cols(data, &plans.fwd_col);
    let norm = 1.0 / (nx * ny) as f64;
    data.mapv_inplace(|c| c * norm);
}

/// In-place 2D inverse FFT (unnormalized, the exact inverse of `fft2_forward`).
pub fn fft2_inverse(data: &mut Array2<Complex64>) {
    let (nx, ny) = data.dim();
    let plans = plans_for(nx, ny);
    transform_rows(data, &plans.inv_row);
    transform_cols(data, &plans.inv_col);
}
