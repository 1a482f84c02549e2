//! Small dense linear algebra helpers shared across the crate.
//!
//! Hot kernels are written over column slices so that results are bitwise
//! identical regardless of the rayon worker count: every output entry is
//! produced by a single sequential accumulation.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};

pub type Mat = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// Dot product of two equal-length slices.
#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut s = 0.0;
    for (x, y) in a.iter().zip(b) {
        s += x * y;
    }
    s
}

/// Adds `alpha * x` to `y` in place.
#[inline]
pub fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

/// Per-column L2 norms divided by sqrt(n), the scale convention used by the
/// weighted penalty.
pub fn column_scales(m: &Mat) -> Vector {
    let n = m.nrows() as f64;
    Vector::from_iterator(m.ncols(), m.column_iter().map(|c| (c.dot(&c) / n).sqrt()))
}

/// Computes `m' * m / m.nrows()` exploiting symmetry. The result is exactly
/// symmetric: each upper-triangle entry is computed once and mirrored.
pub fn scaled_gram(m: &Mat) -> Mat {
    let n = m.nrows();
    let p = m.ncols();
    let inv_n = 1.0 / n as f64;
    let data = m.as_slice();
    let cols: Vec<&[f64]> = (0..p).map(|j| &data[j * n..(j + 1) * n]).collect();
    // One row of the upper triangle per task; entry (i, j) is a single dot.
    let rows: Vec<Vec<f64>> = (0..p)
        .into_par_iter()
        .map(|i| (i..p).map(|j| dot(cols[i], cols[j]) * inv_n).collect())
        .collect();
    let mut out = Mat::zeros(p, p);
    for (i, row) in rows.iter().enumerate() {
        for (off, &v) in row.iter().enumerate() {
            let j = i + off;
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    out
}

/// Largest absolute off-diagonal entry, 0 for matrices with no off-diagonal.
pub fn max_abs_off_diagonal(m: &Mat) -> f64 {
    let p = m.nrows();
    let mut best = 0.0f64;
    for j in 0..p {
        for i in 0..p {
            if i != j {
                best = best.max(m[(i, j)].abs());
            }
        }
    }
    best
}

/// Entrywise max absolute difference.
pub fn linf_error(a: &Mat, b: &Mat) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Inverts a small symmetric matrix, falling back to a ridged inverse when the
/// factorization fails. Returns the (symmetrized) inverse and whether the
/// ridge was needed.
pub fn invert_small_symmetric(gram: &Mat, ridge_scale: f64) -> Result<(Mat, bool)> {
    debug_assert_eq!(gram.nrows(), gram.ncols());
    if let Some(inv) = try_invert(gram) {
        return Ok((symmetrize_average(&inv), false));
    }
    let k = gram.nrows();
    let jitter = ridge_scale * gram.trace() / k as f64;
    let mut ridged = gram.clone();
    for i in 0..k {
        ridged[(i, i)] += jitter;
    }
    match try_invert(&ridged) {
        Some(inv) => Ok((symmetrize_average(&inv), true)),
        None => Err(Error::numerical(format!(
            "singular {k}x{k} residual Gram even after ridge jitter {jitter:e}"
        ))),
    }
}

fn try_invert(m: &Mat) -> Option<Mat> {
    let inv = m.clone().try_inverse()?;
    if inv.iter().all(|v| v.is_finite()) {
        Some(inv)
    } else {
        None
    }
}

/// Averages a nearly symmetric matrix with its transpose. The output is
/// bitwise symmetric.
pub fn symmetrize_average(m: &Mat) -> Mat {
    let p = m.nrows();
    let mut out = m.clone();
    for j in 0..p {
        for i in 0..j {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    out
}

/// Checks that a matrix is bitwise symmetric.
pub fn is_exactly_symmetric(m: &Mat) -> bool {
    let p = m.nrows();
    if p != m.ncols() {
        return false;
    }
    for j in 0..p {
        for i in 0..j {
            if m[(i, j)].to_bits() != m[(j, i)].to_bits() {
                return false;
            }
        }
    }
    true
}

/// Solves `a * x = b` for symmetric positive definite `a`, falling back to a
/// pseudo-inverse solve when the Cholesky factorization fails.
pub fn solve_spd_or_pinv(a: &Mat, b: &Vector) -> Result<Vector> {
    if let Some(chol) = a.clone().cholesky() {
        return Ok(chol.solve(b));
    }
    pinv_solve(a, b)
}

/// Pseudo-inverse solve via SVD.
pub fn pinv_solve(a: &Mat, b: &Vector) -> Result<Vector> {
    let svd = a.clone().svd(true, true);
    let eps = 1e-12 * svd.singular_values.max().max(1.0);
    let pinv = svd
        .pseudo_inverse(eps)
        .map_err(|e| Error::numerical(format!("pseudo-inverse failed: {e}")))?;
    Ok(&pinv * b)
}
