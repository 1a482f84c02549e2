//! Assembly of the estimated innovated data matrix and the initial estimator.

use crate::error::{Error, Result};
use crate::linalg::{scaled_gram, Mat};

use super::block::BlockFit;
use super::estimate::{EstimatorKind, PrecisionEstimate};

/// The n x p estimate of the innovated data matrix `X * Omega`.
#[derive(Debug, Clone)]
pub struct InnovatedMatrix {
    values: Mat,
}

impl InnovatedMatrix {
    pub fn new(values: Mat) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::numerical("non-finite entry in innovated matrix"));
        }
        Ok(InnovatedMatrix { values })
    }

    pub fn values(&self) -> &Mat {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn p(&self) -> usize {
        self.values.ncols()
    }
}

/// Stacks the per-block products `residuals * omega_block` into the columns
/// of the innovated matrix. Blocks must cover every column exactly once.
pub fn assemble_xhat(x: &Mat, blocks: &[BlockFit]) -> Result<InnovatedMatrix> {
    let (n, p) = (x.nrows(), x.ncols());
    let mut seen = vec![false; p];
    for bf in blocks {
        for &node in &bf.block {
            if node >= p {
                return Err(Error::invalid_input("block node out of range"));
            }
            if seen[node] {
                return Err(Error::invalid_input(format!(
                    "column {node} covered by more than one block"
                )));
            }
            seen[node] = true;
        }
        if bf.residuals.nrows() != n {
            return Err(Error::DimensionMismatch {
                expected: format!("residuals with {n} rows"),
                actual: format!("{} rows", bf.residuals.nrows()),
            });
        }
    }
    if seen.iter().any(|&s| !s) {
        return Err(Error::invalid_input("blocks do not cover every column"));
    }

    let mut xhat = Mat::zeros(n, p);
    for bf in blocks {
        let cols = &bf.residuals * &bf.omega_block;
        for (c, &node) in bf.block.iter().enumerate() {
            xhat.column_mut(node).copy_from(&cols.column(c));
        }
    }
    InnovatedMatrix::new(xhat)
}

/// The sample covariance `xhat' * xhat / n` of the innovated matrix, exactly
/// symmetric by construction.
pub fn innovated_sample_covariance(xhat: &InnovatedMatrix) -> Mat {
    scaled_gram(xhat.values())
}

/// The initial estimator: the sample covariance of the innovated matrix with
/// each diagonal block overwritten by the block fit's `omega_block`. The two
/// agree algebraically; copying makes the identity hold bitwise.
pub fn initial_estimator(xhat: &InnovatedMatrix, blocks: &[BlockFit]) -> Result<PrecisionEstimate> {
    if xhat.n() < 2 {
        return Err(Error::invalid_input("need at least 2 rows"));
    }
    let mut cov = innovated_sample_covariance(xhat);
    for bf in blocks {
        for (i, &a) in bf.block.iter().enumerate() {
            for (j, &b) in bf.block.iter().enumerate() {
                cov[(a, b)] = bf.omega_block[(i, j)];
            }
        }
    }
    PrecisionEstimate::new(cov, EstimatorKind::Initial)
}
