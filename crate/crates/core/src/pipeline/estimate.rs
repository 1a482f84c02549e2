//! The precision matrix estimate type and entrywise thresholding.

use crate::error::{Error, Result};
use crate::linalg::{is_exactly_symmetric, max_abs_off_diagonal, Mat};

/// Which stage of the pipeline produced an estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorKind {
    Initial,
    Thresholded,
    Refined,
    BiasCorrected,
    Ensemble,
    /// Column-by-column refit on a given support.
    Refit,
}

impl EstimatorKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            EstimatorKind::Initial => "initial",
            EstimatorKind::Thresholded => "thresholded",
            EstimatorKind::Refined => "refined",
            EstimatorKind::BiasCorrected => "bias_corrected",
            EstimatorKind::Ensemble => "ensemble",
            EstimatorKind::Refit => "refit",
        }
    }
}

/// A symmetric precision matrix estimate with its explicit edge support.
///
/// Symmetry is bitwise: constructors reject matrices where `values[j, k]` and
/// `values[k, j]` differ in any bit. The support lists the unordered
/// off-diagonal pairs `(j, k)` with `j < k` and a nonzero entry.
#[derive(Debug, Clone)]
pub struct PrecisionEstimate {
    values: Mat,
    kind: EstimatorKind,
    support: Vec<(usize, usize)>,
}

impl PrecisionEstimate {
    pub fn new(values: Mat, kind: EstimatorKind) -> Result<Self> {
        if values.nrows() != values.ncols() {
            return Err(Error::invalid_input("precision estimate must be square"));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::numerical("non-finite entry in precision estimate"));
        }
        if !is_exactly_symmetric(&values) {
            return Err(Error::numerical("precision estimate is not exactly symmetric"));
        }
        if matches!(kind, EstimatorKind::Initial | EstimatorKind::Refined)
            && (0..values.nrows()).any(|j| values[(j, j)] <= 0.0)
        {
            return Err(Error::numerical(format!(
                "{} estimate has a non-positive diagonal entry",
                kind.as_str()
            )));
        }
        let support = off_diagonal_support(&values);
        Ok(PrecisionEstimate { values, kind, support })
    }

    pub fn values(&self) -> &Mat {
        &self.values
    }

    pub fn kind(&self) -> EstimatorKind {
        self.kind
    }

    /// Unordered off-diagonal pairs `(j, k)`, `j < k`, with nonzero entries.
    pub fn support(&self) -> &[(usize, usize)] {
        &self.support
    }

    pub fn p(&self) -> usize {
        self.values.nrows()
    }

    /// Neighbor lists per node derived from the support.
    pub fn row_supports(&self) -> Vec<Vec<usize>> {
        let mut rows = vec![Vec::new(); self.p()];
        for &(j, k) in &self.support {
            rows[j].push(k);
            rows[k].push(j);
        }
        for r in &mut rows {
            r.sort_unstable();
        }
        rows
    }
}

fn off_diagonal_support(values: &Mat) -> Vec<(usize, usize)> {
    let p = values.nrows();
    let mut support = Vec::new();
    for j in 0..p {
        for k in (j + 1)..p {
            if values[(j, k)] != 0.0 {
                support.push((j, k));
            }
        }
    }
    support
}

/// Entrywise thresholding: entries with `|value| < tau` are zeroed, all
/// others kept as-is. Applies to every entry including the diagonal.
pub fn threshold(est: &PrecisionEstimate, tau: f64) -> Result<PrecisionEstimate> {
    threshold_with(est, tau, false)
}

/// [`threshold`] with an optional guard that exempts the diagonal.
pub fn threshold_with(
    est: &PrecisionEstimate,
    tau: f64,
    exempt_diagonal: bool,
) -> Result<PrecisionEstimate> {
    if tau < 0.0 {
        return Err(Error::invalid_config("threshold must be nonnegative"));
    }
    let mut values = est.values().clone();
    let p = values.nrows();
    for j in 0..p {
        for k in 0..p {
            if exempt_diagonal && j == k {
                continue;
            }
            if values[(j, k)].abs() < tau {
                values[(j, k)] = 0.0;
            }
        }
    }
    PrecisionEstimate::new(values, EstimatorKind::Thresholded)
}

/// A grid of candidate thresholds: `grid_size` equally spaced values from 0
/// to the largest absolute off-diagonal entry. An all-zero off-diagonal
/// collapses the grid to the single value 0.
pub fn tau_grid(est: &PrecisionEstimate, grid_size: usize) -> Result<Vec<f64>> {
    if grid_size < 2 {
        return Err(Error::invalid_config("tau grid needs at least 2 values"));
    }
    let hi = max_abs_off_diagonal(est.values());
    if hi == 0.0 {
        return Ok(vec![0.0]);
    }
    Ok((0..grid_size)
        .map(|i| hi * i as f64 / (grid_size - 1) as f64)
        .collect())
}
