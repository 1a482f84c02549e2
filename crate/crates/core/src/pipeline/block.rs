//! Per-block nodewise regressions and the block precision estimate.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{invert_small_symmetric, Mat, Vector};
use crate::scaled_lasso::{fit_scaled_lasso, RegressionProblem, ScaledLassoFit, SolverOptions};
use crate::screening::ScreenConfig;

use super::Partition;

const RIDGE_SCALE: f64 = 1e-8;

/// Fit of one index block: residual matrix of the nodewise regressions, the
/// inverse residual Gram (the estimate of the block of the precision matrix),
/// and the sparse regression coefficients indexed by global node.
#[derive(Debug, Clone)]
pub struct BlockFit {
    /// Ascending node indices of the block.
    pub block: Vec<usize>,
    /// n x |A| residual matrix, one column per node in block order.
    pub residuals: Mat,
    /// |A| x |A| symmetric inverse of the scaled residual Gram.
    pub omega_block: Mat,
    /// Per node: sparse regression coefficients as (global node index, value),
    /// ascending in node index.
    pub coeffs: Vec<Vec<(usize, f64)>>,
    /// Estimated noise scales, one per node.
    pub node_sigmas: Vec<f64>,
    /// Whether the residual Gram needed a ridge jitter to invert.
    pub ridge_fallback: bool,
    /// Whether every nodewise solver run converged.
    pub converged: bool,
}

fn validate_block(block: &[usize], n: usize, p: usize) -> Result<()> {
    if !(2..=3).contains(&block.len()) {
        return Err(Error::invalid_input(format!(
            "block size {} outside {{2, 3}}",
            block.len()
        )));
    }
    if block.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid_input("block nodes must be strictly ascending"));
    }
    if *block.last().unwrap() >= p {
        return Err(Error::invalid_input("block node out of range"));
    }
    if n <= block.len() {
        return Err(Error::invalid_input(format!(
            "need n > |A| to invert the residual Gram (n={n}, |A|={})",
            block.len()
        )));
    }
    Ok(())
}

/// Copies columns `nodes` of `x` into a fresh matrix.
pub(crate) fn gather_columns(x: &Mat, nodes: &[usize]) -> Mat {
    let n = x.nrows();
    let mut out = Mat::zeros(n, nodes.len());
    for (c, &node) in nodes.iter().enumerate() {
        out.column_mut(c).copy_from(&x.column(node));
    }
    out
}

/// One nodewise regression of `x[:, node]` on the columns `design_nodes`.
/// Returns the fit together with its sparse coefficients on global indices.
fn fit_node(
    x: &Mat,
    node: usize,
    design_nodes: &[usize],
    lambda: f64,
    opts: &SolverOptions,
) -> Result<(ScaledLassoFit, Vec<(usize, f64)>)> {
    let response = Vector::from(x.column(node));
    if design_nodes.is_empty() {
        // No regressors: the residual is the raw column.
        let n = x.nrows() as f64;
        let rss = response.dot(&response);
        let sigma = ((rss / n).sqrt()).max(opts.sigma_floor);
        let fit = ScaledLassoFit {
            beta: Vector::zeros(0),
            sigma,
            residuals: response,
            objective: rss / (2.0 * n * sigma) + 0.5 * sigma,
            outer_iterations: 0,
            converged: true,
        };
        return Ok((fit, Vec::new()));
    }
    let design = gather_columns(x, design_nodes);
    let problem = RegressionProblem::new(response, design)?;
    let fit = fit_scaled_lasso(&problem, lambda, opts)?;
    let coeffs: Vec<(usize, f64)> = fit
        .beta
        .iter()
        .enumerate()
        .filter(|(_, &b)| b != 0.0)
        .map(|(k, &b)| (design_nodes[k], b))
        .collect();
    Ok((fit, coeffs))
}

fn finish_block(
    block: &[usize],
    fits: Vec<(ScaledLassoFit, Vec<(usize, f64)>)>,
    n: usize,
) -> Result<BlockFit> {
    let k = block.len();
    let mut residuals = Mat::zeros(n, k);
    let mut coeffs = Vec::with_capacity(k);
    let mut node_sigmas = Vec::with_capacity(k);
    let mut converged = true;
    for (c, (fit, sparse)) in fits.into_iter().enumerate() {
        residuals.column_mut(c).copy_from(&fit.residuals);
        node_sigmas.push(fit.sigma);
        converged &= fit.converged;
        coeffs.push(sparse);
    }
    let gram = residuals.transpose() * &residuals / n as f64;
    let (omega_block, ridge_fallback) = invert_small_symmetric(&gram, RIDGE_SCALE)?;
    Ok(BlockFit {
        block: block.to_vec(),
        residuals,
        omega_block,
        coeffs,
        node_sigmas,
        ridge_fallback,
        converged,
    })
}

/// Fits every node of `block` on the complement columns and inverts the
/// scaled residual Gram. A singular Gram falls back to a ridged inverse and
/// flags the block instead of aborting.
pub fn fit_block(x: &Mat, block: &[usize], lambda: f64, opts: &SolverOptions) -> Result<BlockFit> {
    let (n, p) = (x.nrows(), x.ncols());
    validate_block(block, n, p)?;
    let complement: Vec<usize> = (0..p).filter(|i| !block.contains(i)).collect();
    let fits = block
        .iter()
        .map(|&j| fit_node(x, j, &complement, lambda, opts))
        .collect::<Result<Vec<_>>>()?;
    finish_block(block, fits, n)
}

/// One restricted nodewise fit, used by the iterative screening loop.
pub(crate) fn node_fit_for_screening(
    x: &Mat,
    node: usize,
    design_nodes: &[usize],
    lambda: f64,
    opts: &SolverOptions,
) -> Result<(ScaledLassoFit, Vec<(usize, f64)>)> {
    fit_node(x, node, design_nodes, lambda, opts)
}

/// Same contract as [`fit_block`] with each nodewise regression restricted to
/// a given submodel of the complement; coefficients outside the submodel are
/// exactly zero.
pub(crate) fn fit_block_restricted(
    x: &Mat,
    block: &[usize],
    lambda: f64,
    opts: &SolverOptions,
    submodels: &[Vec<usize>],
) -> Result<BlockFit> {
    let n = x.nrows();
    validate_block(block, n, x.ncols())?;
    if submodels.len() != block.len() {
        return Err(Error::invalid_input("one submodel per block node required"));
    }
    let fits = block
        .iter()
        .zip(submodels)
        .map(|(&j, sub)| fit_node(x, j, sub, lambda, opts))
        .collect::<Result<Vec<_>>>()?;
    finish_block(block, fits, n)
}

/// Fits all partition blocks, in parallel over blocks. Results are collected
/// in partition order, so the output does not depend on the worker count.
pub fn fit_all_blocks(
    x: &Mat,
    partition: &Partition,
    lambda: f64,
    opts: &SolverOptions,
    screen: Option<&ScreenConfig>,
) -> Result<Vec<BlockFit>> {
    if partition.node_count() != x.ncols() {
        return Err(Error::DimensionMismatch {
            expected: format!("data with {} columns", partition.node_count()),
            actual: format!("{} columns", x.ncols()),
        });
    }
    partition
        .blocks()
        .par_iter()
        .map(|block| match screen {
            None => fit_block(x, block, lambda, opts),
            Some(cfg) => crate::screening::fit_block_sis(x, block, lambda, opts, cfg),
        })
        .collect()
}

/// Reference construction that substitutes the true regression coefficients
/// `C_A = -Omega[A^c, A] * Omega[A, A]^{-1}` for the lasso fit. With
/// `empirical_omega_block` the block precision is the inverse residual Gram
/// as in the estimator; otherwise the true block of `omega` is used, which
/// makes the assembled innovated matrix reproduce `X * Omega` exactly.
pub fn oracle_block_fit(
    x: &Mat,
    block: &[usize],
    omega: &Mat,
    empirical_omega_block: bool,
) -> Result<BlockFit> {
    let (n, p) = (x.nrows(), x.ncols());
    validate_block(block, n, p)?;
    if omega.nrows() != p || omega.ncols() != p {
        return Err(Error::DimensionMismatch {
            expected: format!("{p}x{p} precision matrix"),
            actual: format!("{}x{}", omega.nrows(), omega.ncols()),
        });
    }
    let k = block.len();
    let complement: Vec<usize> = (0..p).filter(|i| !block.contains(i)).collect();

    let mut omega_aa = Mat::zeros(k, k);
    for (i, &a) in block.iter().enumerate() {
        for (j, &b) in block.iter().enumerate() {
            omega_aa[(i, j)] = omega[(a, b)];
        }
    }
    let mut omega_ca = Mat::zeros(complement.len(), k);
    for (r, &c) in complement.iter().enumerate() {
        for (j, &b) in block.iter().enumerate() {
            omega_ca[(r, j)] = omega[(c, b)];
        }
    }
    let omega_aa_inv = omega_aa
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::numerical("true block precision is singular"))?;
    let c_a = -&omega_ca * &omega_aa_inv;

    let x_a = gather_columns(x, block);
    let residuals = if complement.is_empty() {
        x_a
    } else {
        let x_c = gather_columns(x, &complement);
        x_a - x_c * &c_a
    };

    let (omega_block, ridge_fallback) = if empirical_omega_block {
        let gram = residuals.transpose() * &residuals / n as f64;
        invert_small_symmetric(&gram, RIDGE_SCALE)?
    } else {
        (omega_aa, false)
    };

    let coeffs = (0..k)
        .map(|j| {
            complement
                .iter()
                .enumerate()
                .filter(|(r, _)| c_a[(*r, j)] != 0.0)
                .map(|(r, &node)| (node, c_a[(r, j)]))
                .collect()
        })
        .collect();
    let sqrt_n = (n as f64).sqrt();
    let node_sigmas = (0..k).map(|j| residuals.column(j).norm() / sqrt_n).collect();

    Ok(BlockFit {
        block: block.to_vec(),
        residuals,
        omega_block,
        coeffs,
        node_sigmas,
        ridge_fallback,
        converged: true,
    })
}
