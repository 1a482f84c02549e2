//! Marginal-correlation screening for very large node counts.
//!
//! Before each nodewise regression, the complement columns are ranked by the
//! absolute inner product with the response column and only the top
//! `floor(zeta * n)` are kept as the regression design. Coefficients outside
//! the screened submodel are exactly zero.

use crate::error::{Error, Result};
use crate::linalg::Mat;
use crate::pipeline::BlockFit;
use crate::scaled_lasso::SolverOptions;

/// Screening settings.
#[derive(Debug, Clone)]
pub struct ScreenConfig {
    /// Submodel size fraction: each regression keeps `floor(zeta * n)`
    /// candidate columns. `zeta = 1` disables screening entirely and keeps
    /// the full complement, so the pipeline reduces to the unscreened one.
    pub zeta: f64,
    /// Rescale columns to unit sample standard deviation (with 1/n
    /// normalization) before ranking.
    pub standardize: bool,
    /// Optional iterative re-screening on residuals. 0 disables it.
    pub isis_iterations: usize,
}

impl Default for ScreenConfig {
    fn default() -> Self {
        ScreenConfig {
            zeta: 0.5,
            standardize: true,
            isis_iterations: 0,
        }
    }
}

impl ScreenConfig {
    pub fn validate(&self, n: usize) -> Result<()> {
        if !(self.zeta > 0.0 && self.zeta <= 1.0) {
            return Err(Error::invalid_config("zeta must lie in (0, 1]"));
        }
        if self.submodel_size(n) < 1 {
            return Err(Error::invalid_config(format!(
                "screened submodel size floor({} * {n}) is empty",
                self.zeta
            )));
        }
        Ok(())
    }

    pub fn submodel_size(&self, n: usize) -> usize {
        (self.zeta * n as f64).floor() as usize
    }
}

fn complement(p: usize, block: &[usize]) -> Vec<usize> {
    (0..p).filter(|i| !block.contains(i)).collect()
}

/// Ranks complement columns by `|X_k' X_j|` (after optional standardization)
/// and keeps the `floor(zeta * n)` largest; ties break toward the smaller
/// node index. The returned set is sorted ascending.
pub fn sis_screen(x: &Mat, block: &[usize], node: usize, cfg: &ScreenConfig) -> Result<Vec<usize>> {
    let (n, p) = (x.nrows(), x.ncols());
    cfg.validate(n)?;
    if !block.contains(&node) {
        return Err(Error::invalid_input("screened node must belong to the block"));
    }
    let ac = complement(p, block);
    if ac.is_empty() {
        return Err(Error::invalid_input("block complement is empty"));
    }
    if cfg.zeta == 1.0 {
        return Ok(ac);
    }
    let keep = cfg.submodel_size(n).min(ac.len());
    Ok(top_marginal(x, &ac, &x.column(node).into(), cfg.standardize, keep))
}

/// Top `keep` candidate columns by absolute (standardized) inner product with
/// `response`, sorted ascending.
fn top_marginal(
    x: &Mat,
    candidates: &[usize],
    response: &crate::linalg::Vector,
    standardize: bool,
    keep: usize,
) -> Vec<usize> {
    let n = x.nrows() as f64;
    let resp_scale = if standardize {
        let s = (response.dot(response) / n).sqrt();
        if s > 0.0 {
            1.0 / s
        } else {
            1.0
        }
    } else {
        1.0
    };
    let mut scored: Vec<(f64, usize)> = candidates
        .iter()
        .map(|&k| {
            let col = x.column(k);
            let mut w = col.dot(response) * resp_scale;
            if standardize {
                let s = (col.dot(&col) / n).sqrt();
                if s > 0.0 {
                    w /= s;
                }
            }
            (w.abs(), k)
        })
        .collect();
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
    let mut kept: Vec<usize> = scored.into_iter().take(keep).map(|(_, k)| k).collect();
    kept.sort_unstable();
    kept
}

/// [`crate::pipeline::fit_block`] with each nodewise regression restricted to
/// its screened submodel.
pub fn fit_block_sis(
    x: &Mat,
    block: &[usize],
    lambda: f64,
    opts: &SolverOptions,
    cfg: &ScreenConfig,
) -> Result<BlockFit> {
    let n = x.nrows();
    cfg.validate(n)?;
    let submodels = screened_submodels(x, block, lambda, opts, cfg)?;
    crate::pipeline::block_restricted(x, block, lambda, opts, &submodels)
}

/// Computes the per-node submodels, running the optional iterative
/// re-screening loop when configured.
pub(crate) fn screened_submodels(
    x: &Mat,
    block: &[usize],
    lambda: f64,
    opts: &SolverOptions,
    cfg: &ScreenConfig,
) -> Result<Vec<Vec<usize>>> {
    block
        .iter()
        .map(|&node| {
            let mut submodel = sis_screen(x, block, node, cfg)?;
            if cfg.isis_iterations > 0 && cfg.zeta < 1.0 {
                submodel = isis_loop(x, block, node, submodel, lambda, opts, cfg)?;
            }
            Ok(submodel)
        })
        .collect()
}

/// Iterative re-screening: fit on the current submodel, keep the active
/// coefficients, and refill the budget by ranking the remaining complement
/// columns against the residual.
fn isis_loop(
    x: &Mat,
    block: &[usize],
    node: usize,
    mut submodel: Vec<usize>,
    lambda: f64,
    opts: &SolverOptions,
    cfg: &ScreenConfig,
) -> Result<Vec<usize>> {
    let n = x.nrows();
    let budget = cfg.submodel_size(n);
    let ac = complement(x.ncols(), block);
    for _ in 0..cfg.isis_iterations.min(3) {
        let fit = crate::pipeline::node_fit_for_screening(x, node, &submodel, lambda, opts)?;
        let active: Vec<usize> = fit
            .1
            .iter()
            .map(|&(global, _)| global)
            .collect();
        if active.len() >= budget {
            break;
        }
        let remaining: Vec<usize> = ac.iter().copied().filter(|k| !active.contains(k)).collect();
        if remaining.is_empty() {
            break;
        }
        let refill = top_marginal(
            x,
            &remaining,
            &fit.0.residuals,
            cfg.standardize,
            budget - active.len(),
        );
        let mut next: Vec<usize> = active.into_iter().chain(refill).collect();
        next.sort_unstable();
        next.dedup();
        if next == submodel {
            break;
        }
        submodel = next;
    }
    Ok(submodel)
}
