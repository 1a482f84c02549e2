//! Cross-validated choice of the threshold.
//!
//! The rows of the innovated matrix are split `num_splits` times into two
//! folds. For each candidate threshold the thresholded fold-1 covariance is
//! compared to the raw fold-2 covariance in squared Frobenius norm, averaged
//! over splits, and the minimizer is returned. Ties prefer the smallest
//! threshold.

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::rng::{stream, Purpose};

use super::assemble::{innovated_sample_covariance, InnovatedMatrix};
use super::estimate::{tau_grid, EstimatorKind, PrecisionEstimate};

/// Cross-validation settings for the threshold choice.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CvConfig {
    /// Number of candidate thresholds.
    pub grid_size: usize,
    /// Fraction of rows in the first fold.
    pub n1_fraction: f64,
    /// Number of random splits.
    pub num_splits: usize,
    pub rng_seed: u64,
}

impl Default for CvConfig {
    fn default() -> Self {
        CvConfig {
            grid_size: 20,
            n1_fraction: 0.9,
            num_splits: 5,
            rng_seed: 0,
        }
    }
}

impl CvConfig {
    pub fn validate(&self) -> Result<()> {
        if self.grid_size < 2 {
            return Err(Error::invalid_config("cv grid_size must be >= 2"));
        }
        if !(self.n1_fraction > 0.0 && self.n1_fraction < 1.0) {
            return Err(Error::invalid_config("cv n1_fraction must lie in (0, 1)"));
        }
        if self.num_splits < 1 {
            return Err(Error::invalid_config("cv num_splits must be >= 1"));
        }
        Ok(())
    }
}

/// Chosen threshold with the full risk curve over the candidate grid.
#[derive(Debug, Clone)]
pub struct CvResult {
    pub tau: f64,
    pub grid: Vec<f64>,
    pub risk: Vec<f64>,
    /// All risks equal; the smallest grid value was returned.
    pub degenerate: bool,
}

/// Squared Frobenius distance between the thresholded first matrix and the
/// second matrix, over all entries including the diagonal.
pub(crate) fn threshold_risk(cov1: &Mat, cov2: &Mat, tau: f64) -> f64 {
    let p = cov1.nrows();
    let mut acc = 0.0;
    for j in 0..p {
        for i in 0..p {
            let a = cov1[(i, j)];
            let t = if a.abs() >= tau { a } else { 0.0 };
            let d = t - cov2[(i, j)];
            acc += d * d;
        }
    }
    acc
}

fn fold_covariance(xhat: &Mat, rows: &[usize]) -> Mat {
    let mut sub = Mat::zeros(rows.len(), xhat.ncols());
    for (r, &row) in rows.iter().enumerate() {
        sub.row_mut(r).copy_from(&xhat.row(row));
    }
    crate::linalg::scaled_gram(&sub)
}

/// Picks the threshold minimizing the averaged split risk.
pub fn cv_threshold(xhat: &InnovatedMatrix, cfg: &CvConfig) -> Result<CvResult> {
    cfg.validate()?;
    let n = xhat.n();
    if n < 10 {
        return Err(Error::invalid_input(format!(
            "cross-validation needs n >= 10 rows, got {n}"
        )));
    }
    let n1 = (cfg.n1_fraction * n as f64).ceil() as usize;
    if n1 == 0 || n1 >= n {
        return Err(Error::invalid_config(format!(
            "fold sizes {n1}/{} are degenerate for n={n}",
            n - n1
        )));
    }

    let full_cov = innovated_sample_covariance(xhat);
    let grid = tau_grid(
        &PrecisionEstimate::new(full_cov, EstimatorKind::Initial)?,
        cfg.grid_size,
    )?;

    // Risks per split are computed in parallel and reduced in split order.
    let per_split: Vec<Vec<f64>> = (0..cfg.num_splits)
        .into_par_iter()
        .map(|split| {
            let mut rng = stream(cfg.rng_seed, Purpose::CvSplit, split as u64);
            let mut rows: Vec<usize> = (0..n).collect();
            rows.shuffle(&mut rng);
            let cov1 = fold_covariance(xhat.values(), &rows[..n1]);
            let cov2 = fold_covariance(xhat.values(), &rows[n1..]);
            grid.iter().map(|&tau| threshold_risk(&cov1, &cov2, tau)).collect()
        })
        .collect();

    let mut risk = vec![0.0f64; grid.len()];
    for split_risk in &per_split {
        for (r, v) in risk.iter_mut().zip(split_risk) {
            *r += v;
        }
    }
    for r in &mut risk {
        *r /= cfg.num_splits as f64;
    }

    let mut best = 0usize;
    for i in 1..risk.len() {
        if risk[i] < risk[best] {
            best = i;
        }
    }
    let spread = risk.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b))
        - risk.iter().fold(f64::INFINITY, |a, &b| a.min(b));
    let scale = risk.iter().fold(0.0f64, |a, &b| a.max(b.abs())).max(1e-300);
    let degenerate = risk.len() > 1 && spread <= 1e-12 * scale;

    Ok(CvResult {
        tau: grid[best],
        grid,
        risk,
        degenerate,
    })
}
