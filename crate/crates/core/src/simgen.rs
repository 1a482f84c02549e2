//! Ground-truth precision matrix generators and Gaussian sampling for
//! simulation studies.

use nalgebra::SymmetricEigen;
use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{Mat, Vector};
use crate::rng::{stream, Purpose};

/// Record of how a ground truth was generated; serialized into run manifests.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub model: String,
    pub p: usize,
    pub seed: u64,
    pub block_size: Option<usize>,
    pub edge_count: usize,
}

/// A known precision matrix with its edge set and the permutation that was
/// applied to scramble the generator's structure.
#[derive(Debug, Clone)]
pub struct GroundTruth {
    pub omega: Mat,
    /// Unordered off-diagonal pairs (j < k) with nonzero entries.
    pub support: Vec<(usize, usize)>,
    pub permutation: Vec<usize>,
    pub spec: GeneratorSpec,
}

impl GroundTruth {
    /// Wraps an explicit symmetric positive definite matrix.
    pub fn from_omega(omega: Mat, model: String, seed: u64) -> Result<Self> {
        let p = omega.nrows();
        if omega.ncols() != p {
            return Err(Error::invalid_input("precision matrix must be square"));
        }
        verify_spd(&omega)?;
        let support = support_of(&omega);
        let edge_count = support.len();
        Ok(GroundTruth {
            omega,
            support,
            permutation: (0..p).collect(),
            spec: GeneratorSpec {
                model,
                p,
                seed,
                block_size: None,
                edge_count,
            },
        })
    }

    pub fn p(&self) -> usize {
        self.omega.nrows()
    }
}

fn support_of(omega: &Mat) -> Vec<(usize, usize)> {
    let p = omega.nrows();
    let mut support = Vec::new();
    for j in 0..p {
        for k in (j + 1)..p {
            if omega[(j, k)] != 0.0 {
                support.push((j, k));
            }
        }
    }
    support
}

fn verify_spd(omega: &Mat) -> Result<()> {
    for j in 0..omega.nrows() {
        for k in 0..j {
            if omega[(j, k)] != omega[(k, j)] {
                return Err(Error::invalid_input("precision matrix is not symmetric"));
            }
        }
    }
    if omega.clone().cholesky().is_none() {
        return Err(Error::invalid_input(
            "precision matrix is not positive definite",
        ));
    }
    Ok(())
}

fn apply_permutation(base: &Mat, perm: &[usize]) -> Mat {
    let p = base.nrows();
    let mut out = Mat::zeros(p, p);
    for i in 0..p {
        for j in 0..p {
            out[(perm[i], perm[j])] = base[(i, j)];
        }
    }
    out
}

fn validate_permutation(perm: &[usize], p: usize) -> Result<()> {
    if perm.len() != p {
        return Err(Error::invalid_input("permutation length must equal p"));
    }
    let mut seen = vec![false; p];
    for &v in perm {
        if v >= p || seen[v] {
            return Err(Error::invalid_input("not a permutation"));
        }
        seen[v] = true;
    }
    Ok(())
}

/// Band precision matrix: unit diagonal, first off-diagonals 0.5, then a
/// uniformly random symmetric permutation of rows and columns.
pub fn band_precision(p: usize, seed: u64) -> Result<GroundTruth> {
    let mut perm: Vec<usize> = (0..p).collect();
    perm.shuffle(&mut stream(seed, Purpose::BandPermutation, 0));
    band_precision_with_permutation(p, perm, seed, "band")
}

/// [`band_precision`] with an explicit permutation, for reproducing specific
/// instances.
pub fn band_precision_with_permutation(
    p: usize,
    perm: Vec<usize>,
    seed: u64,
    model: &str,
) -> Result<GroundTruth> {
    if p < 2 {
        return Err(Error::invalid_input("band model requires p >= 2"));
    }
    validate_permutation(&perm, p)?;
    let mut base = Mat::identity(p, p);
    for i in 0..p - 1 {
        base[(i, i + 1)] = 0.5;
        base[(i + 1, i)] = 0.5;
    }
    let omega = apply_permutation(&base, &perm);
    verify_spd(&omega)?;
    let mut support: Vec<(usize, usize)> = (0..p - 1)
        .map(|i| {
            let (a, b) = (perm[i], perm[i + 1]);
            (a.min(b), a.max(b))
        })
        .collect();
    support.sort_unstable();
    Ok(GroundTruth {
        omega,
        support,
        permutation: perm,
        spec: GeneratorSpec {
            model: model.to_string(),
            p,
            seed,
            block_size: None,
            edge_count: p - 1,
        },
    })
}

const BLOCK_SIZE: usize = 20;

/// Block-diagonal precision matrix: independent blocks of size 20 with unit
/// diagonal and off-diagonal entries equal to 0.5 with probability 0.3, each
/// block shifted so its smallest eigenvalue is exactly 0.1, then a random
/// symmetric permutation. `p` must be a positive multiple of 20.
pub fn block_precision(p: usize, seed: u64) -> Result<GroundTruth> {
    if p == 0 || !p.is_multiple_of(BLOCK_SIZE) {
        return Err(Error::invalid_input(format!(
            "block model requires p to be a positive multiple of {BLOCK_SIZE}, got {p}"
        )));
    }
    let num_blocks = p / BLOCK_SIZE;
    let mut base = Mat::zeros(p, p);
    for b in 0..num_blocks {
        let mut rng = stream(seed, Purpose::BlockEntries, b as u64);
        let mut block = Mat::identity(BLOCK_SIZE, BLOCK_SIZE);
        for i in 0..BLOCK_SIZE {
            for j in (i + 1)..BLOCK_SIZE {
                if rng.sample::<f64, _>(rand::distr::StandardUniform) < 0.3 {
                    block[(i, j)] = 0.5;
                    block[(j, i)] = 0.5;
                }
            }
        }
        let lambda_min = SymmetricEigen::new(block.clone()).eigenvalues.min();
        let shift = 0.1 - lambda_min;
        for i in 0..BLOCK_SIZE {
            block[(i, i)] += shift;
        }
        let off = b * BLOCK_SIZE;
        base.view_mut((off, off), (BLOCK_SIZE, BLOCK_SIZE)).copy_from(&block);
    }

    let mut perm: Vec<usize> = (0..p).collect();
    perm.shuffle(&mut stream(seed, Purpose::BlockPermutation, 0));
    let omega = apply_permutation(&base, &perm);
    verify_spd(&omega)?;
    let support = support_of(&omega);
    let edge_count = support.len();
    Ok(GroundTruth {
        omega,
        support,
        permutation: perm,
        spec: GeneratorSpec {
            model: "block".to_string(),
            p,
            seed,
            block_size: Some(BLOCK_SIZE),
            edge_count,
        },
    })
}

/// Draws `n` i.i.d. rows from the zero-mean Gaussian whose covariance is the
/// inverse of the ground-truth precision matrix. With `omega = L L'`, a
/// standard normal vector `z` maps to a sample through `L' x = z`.
pub fn sample_gaussian(truth: &GroundTruth, n: usize, seed: u64) -> Result<Mat> {
    if n < 1 {
        return Err(Error::invalid_input("need n >= 1 samples"));
    }
    let p = truth.p();
    let chol = truth
        .omega
        .clone()
        .cholesky()
        .ok_or_else(|| Error::invalid_input("ground truth precision is not positive definite"))?;
    let upper = chol.l().transpose();
    let mut rng = stream(seed, Purpose::GaussianSample, 0);
    let mut x = Mat::zeros(n, p);
    let mut z = Vector::zeros(p);
    for i in 0..n {
        for v in z.iter_mut() {
            *v = StandardNormal.sample(&mut rng);
        }
        let row = upper
            .solve_upper_triangular(&z)
            .ok_or_else(|| Error::numerical("triangular solve failed"))?;
        x.row_mut(i).copy_from(&row.transpose());
    }
    Ok(x)
}
