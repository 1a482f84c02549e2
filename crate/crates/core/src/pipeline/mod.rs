//! The estimation pipeline: block partition, per-block nodewise fits,
//! assembly of the innovated data matrix, initial and thresholded precision
//! estimators, threshold cross-validation, refinement, bias correction, the
//! permutation ensemble, and recovery metrics.

mod assemble;
mod bias;
mod block;
mod cv;
mod ensemble;
mod estimate;
mod metrics;
mod refine;

pub use assemble::{assemble_xhat, initial_estimator, innovated_sample_covariance, InnovatedMatrix};
pub use bias::bias_corrected;
pub use block::{fit_all_blocks, fit_block, oracle_block_fit, BlockFit};
pub(crate) use block::{fit_block_restricted as block_restricted, node_fit_for_screening};
pub use cv::{cv_threshold, CvConfig, CvResult};
pub use ensemble::permutation_ensemble;
pub use estimate::{tau_grid, threshold, threshold_with, EstimatorKind, PrecisionEstimate};
pub use metrics::{frobenius_distance, frobenius_error, recovery_metrics, RecoveryMetrics};
pub use refine::{refine, RefineOutcome};

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::scaled_lasso::SolverOptions;
use crate::screening::ScreenConfig;

/// Ordered disjoint index blocks covering `0..p`: consecutive pairs, with a
/// trailing block of three when `p` is odd.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    blocks: Vec<Vec<usize>>,
    p: usize,
}

impl Partition {
    /// Builds a partition from explicit blocks, validating that they are
    /// disjoint and cover `0..p`.
    pub fn from_blocks(blocks: Vec<Vec<usize>>, p: usize) -> Result<Self> {
        let mut seen = vec![false; p];
        for block in &blocks {
            if block.is_empty() {
                return Err(Error::invalid_input("empty partition block"));
            }
            for &node in block {
                if node >= p {
                    return Err(Error::invalid_input(format!(
                        "node {node} out of range for p={p}"
                    )));
                }
                if seen[node] {
                    return Err(Error::invalid_input(format!(
                        "node {node} appears in more than one block"
                    )));
                }
                seen[node] = true;
            }
        }
        if seen.iter().any(|&s| !s) {
            return Err(Error::invalid_input("partition blocks do not cover all nodes"));
        }
        Ok(Partition { blocks, p })
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn node_count(&self) -> usize {
        self.p
    }

    /// Map from node index to the index of its block.
    pub fn block_of(&self) -> Vec<usize> {
        let mut map = vec![0usize; self.p];
        for (b, block) in self.blocks.iter().enumerate() {
            for &node in block {
                map[node] = b;
            }
        }
        map
    }
}

/// The canonical partition into consecutive pairs `{2l, 2l+1}`; for odd `p`
/// the last block has three nodes. The number of blocks is `floor(p / 2)`.
pub fn make_partition(p: usize) -> Result<Partition> {
    if p < 2 {
        return Err(Error::invalid_input(format!("partition requires p >= 2, got {p}")));
    }
    let num_blocks = p / 2;
    let mut blocks = Vec::with_capacity(num_blocks);
    for l in 0..num_blocks {
        if l + 1 == num_blocks && p % 2 == 1 {
            blocks.push(vec![2 * l, 2 * l + 1, 2 * l + 2]);
        } else {
            blocks.push(vec![2 * l, 2 * l + 1]);
        }
    }
    Ok(Partition { blocks, p })
}

/// The artifacts of one full estimation pass over a data matrix.
pub struct SingleRun {
    pub partition: Partition,
    pub blocks: Vec<BlockFit>,
    pub xhat: InnovatedMatrix,
    pub initial: PrecisionEstimate,
    pub cv: CvResult,
    pub thresholded: PrecisionEstimate,
}

/// Runs fit, assembly, the initial estimator, threshold cross-validation, and
/// thresholding on one data matrix.
pub fn single_run(
    x: &Mat,
    lambda: f64,
    cv_cfg: &CvConfig,
    screen: Option<&ScreenConfig>,
    opts: &SolverOptions,
) -> Result<SingleRun> {
    let partition = make_partition(x.ncols())?;
    let blocks = fit_all_blocks(x, &partition, lambda, opts, screen)?;
    let xhat = assemble_xhat(x, &blocks)?;
    let initial = initial_estimator(&xhat, &blocks)?;
    let cv = cv_threshold(&xhat, cv_cfg)?;
    let thresholded = threshold(&initial, cv.tau)?;
    Ok(SingleRun {
        partition,
        blocks,
        xhat,
        initial,
        cv,
        thresholded,
    })
}
