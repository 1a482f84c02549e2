//! Bias correction of the initial estimator's off-block entries.
//!
//! The cross products that estimate off-block entries of the precision matrix
//! carry a first-order bias expressible through the estimated regression
//! coefficients. Writing `W[A^c, A] = C_A * omega_block_A` per block, the
//! corrected off-block entry is `-(initial + W + W')` while diagonal blocks
//! are copied unchanged. The result is exactly symmetric by construction.

use crate::error::{Error, Result};
use crate::linalg::Mat;

use super::block::BlockFit;
use super::estimate::{EstimatorKind, PrecisionEstimate};

pub fn bias_corrected(
    est_initial: &PrecisionEstimate,
    blocks: &[BlockFit],
) -> Result<PrecisionEstimate> {
    let p = est_initial.p();
    let mut block_of = vec![usize::MAX; p];
    for (b, bf) in blocks.iter().enumerate() {
        for &node in &bf.block {
            if node >= p {
                return Err(Error::invalid_input("block node out of range"));
            }
            if block_of[node] != usize::MAX {
                return Err(Error::invalid_input("blocks overlap"));
            }
            block_of[node] = b;
        }
    }
    if block_of.contains(&usize::MAX) {
        return Err(Error::invalid_input(
            "blocks do not match the estimate's dimension",
        ));
    }

    // W[r, a] = sum_i C[r, i] * omega_block[i, col(a)] for r outside block a.
    let mut w = Mat::zeros(p, p);
    for bf in blocks {
        let k = bf.block.len();
        for i in 0..k {
            for &(r, v) in &bf.coeffs[i] {
                for (i2, &col_node) in bf.block.iter().enumerate().take(k) {
                    w[(r, col_node)] += v * bf.omega_block[(i, i2)];
                }
            }
        }
    }

    let init = est_initial.values();
    let mut out = init.clone();
    for j in 0..p {
        for k in (j + 1)..p {
            if block_of[j] != block_of[k] {
                let v = -(init[(j, k)] + w[(j, k)] + w[(k, j)]);
                out[(j, k)] = v;
                out[(k, j)] = v;
            }
        }
    }
    PrecisionEstimate::new(out, EstimatorKind::BiasCorrected)
}
