//! Link strength refinement: each recovered cross-block link is re-estimated
//! from a dedicated two-node fit.

use rayon::prelude::*;

use crate::error::Result;
use crate::linalg::Mat;
use crate::scaled_lasso::SolverOptions;

use super::block::fit_block_restricted;
use super::estimate::{EstimatorKind, PrecisionEstimate};
use super::Partition;

/// Refined estimate plus how many links needed the unrestricted fallback
/// because the union of row supports was too large.
#[derive(Debug)]
pub struct RefineOutcome {
    pub estimate: PrecisionEstimate,
    pub unrestricted_links: usize,
}

/// Re-estimates every supported link `(j, k)` whose nodes lie in different
/// partition blocks via the off-diagonal of the 2x2 block precision for
/// `A = {j, k}`. The regression design is restricted to the union of the two
/// row supports (minus the pair itself); if that union exceeds `n - 2`
/// columns the full complement is used instead. Within-block and
/// non-support entries are left unchanged.
pub fn refine(
    x: &Mat,
    est: &PrecisionEstimate,
    partition: &Partition,
    lambda: f64,
    opts: &SolverOptions,
) -> Result<RefineOutcome> {
    let (n, p) = (x.nrows(), x.ncols());
    let block_of = partition.block_of();
    let rows = est.row_supports();

    let links: Vec<(usize, usize)> = est
        .support()
        .iter()
        .copied()
        .filter(|&(j, k)| block_of[j] != block_of[k])
        .collect();

    let updates: Vec<(usize, usize, f64, bool)> = links
        .par_iter()
        .map(|&(j, k)| -> Result<(usize, usize, f64, bool)> {
            let mut union: Vec<usize> = rows[j]
                .iter()
                .chain(rows[k].iter())
                .copied()
                .filter(|&m| m != j && m != k)
                .collect();
            union.sort_unstable();
            union.dedup();
            let fallback = union.len() > n.saturating_sub(2);
            let submodel: Vec<usize> = if fallback {
                (0..p).filter(|&m| m != j && m != k).collect()
            } else {
                union
            };
            let pair = [j.min(k), j.max(k)];
            let submodels = vec![submodel.clone(), submodel];
            let fit = fit_block_restricted(x, &pair, lambda, opts, &submodels)?;
            Ok((pair[0], pair[1], fit.omega_block[(0, 1)], fallback))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut values = est.values().clone();
    let mut unrestricted_links = 0;
    for (j, k, v, fallback) in updates {
        values[(j, k)] = v;
        values[(k, j)] = v;
        if fallback {
            unrestricted_links += 1;
        }
    }
    let estimate = PrecisionEstimate::new(values, EstimatorKind::Refined)?;
    Ok(RefineOutcome {
        estimate,
        unrestricted_links,
    })
}
