use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::data::{ProbMatrix, Sampling};
use super::frame::Frame;
use super::square::check_data_shape;
use crate::{Error, Result};

/// Any entry with `|z|` above this fails the check.
pub const Z_FAIL: f64 = 5.0;
/// Entries with `|z|` above this count as outliers.
pub const Z_OUTLIER: f64 = 3.0;
/// Largest tolerated fraction of outliers.
pub const OUTLIER_FRACTION: f64 = 0.05;

/// Residual exactly-sampled entries may carry before they count as deviating.
const EXACT_TOL: f64 = 1e-12;

/// Whether calibration data agree with the a-priori frame within sampling
/// noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub max_abs_z: f64,
    pub n_over_3: usize,
    pub n_entries: usize,
    pub passed: bool,
    /// Standardized residuals, row-major.
    pub z: Vec<Vec<f64>>,
}

/// Standardized residuals `z = (I - M0 S0) / sqrt(q (1 - q) / N)` with
/// `q = (M0 S0)_ij` clamped to `[1/(2N), 1 - 1/(2N)]`.
///
/// Exact calibration tables give `z = 0` where the residual vanishes and
/// infinite `z` otherwise.
pub fn spam_consistency_check(frame: &Frame, i_hat: &ProbMatrix) -> Result<ConsistencyReport> {
    check_data_shape(frame, i_hat, "calibration data vs frame")?;
    let predicted = frame.predicted_calibration();
    let z = match &i_hat.sampling {
        Sampling::Unknown => return Err(Error::MissingShots),
        Sampling::Exact => DMatrix::from_fn(predicted.nrows(), predicted.ncols(), |i, j| {
            let r = i_hat.values[(i, j)] - predicted[(i, j)];
            if r.abs() <= EXACT_TOL {
                0.0
            } else {
                f64::INFINITY.copysign(r)
            }
        }),
        Sampling::Shots(shots) => DMatrix::from_fn(predicted.nrows(), predicted.ncols(), |i, j| {
            let n = shots[(i, j)] as f64;
            let floor = 0.5 / n;
            let q = predicted[(i, j)].clamp(floor, 1.0 - floor);
            (i_hat.values[(i, j)] - predicted[(i, j)]) / (q * (1.0 - q) / n).sqrt()
        }),
    };

    let max_abs_z = z.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let n_over_3 = z.iter().filter(|v| v.abs() > Z_OUTLIER).count();
    let n_entries = z.len();
    let passed = max_abs_z <= Z_FAIL && (n_over_3 as f64) <= OUTLIER_FRACTION * n_entries as f64;
    Ok(ConsistencyReport {
        max_abs_z,
        n_over_3,
        n_entries,
        passed,
        z: z.row_iter().map(|r| r.iter().copied().collect()).collect(),
    })
}
