//! Downstream consumers of a precision estimate: support-restricted refit,
//! linear discriminant classification, classification metrics, mean-variance
//! portfolio weights, and innovated regression scores.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::linalg::{pinv_solve, scaled_gram, Mat, Vector};
use crate::pipeline::{EstimatorKind, InnovatedMatrix, PrecisionEstimate};

/// Fraction of the sample size beyond which the restricted covariance system
/// is solved with a pseudo-inverse instead of a direct factorization.
const PINV_SUPPORT_FRACTION: f64 = 0.9;

/// Re-estimates a precision matrix column by column on a given support: for
/// each column j, the restricted system `Sigma[S, S] w = e_j` is solved with
/// `S` the column's support (always including the diagonal), and the result
/// is symmetrized by averaging the two solutions of every pair.
pub fn refit_columns(x: &Mat, support: &[(usize, usize)]) -> Result<PrecisionEstimate> {
    let (n, p) = (x.nrows(), x.ncols());
    if n < 2 {
        return Err(Error::invalid_input("refit needs at least 2 observations"));
    }
    let mut neighbors = vec![Vec::new(); p];
    for &(a, b) in support {
        if a == b || a >= p || b >= p {
            return Err(Error::invalid_input("support must be off-diagonal pairs in range"));
        }
        neighbors[a].push(b);
        neighbors[b].push(a);
    }
    for list in &mut neighbors {
        list.sort_unstable();
        list.dedup();
    }

    let sigma = scaled_gram(x);
    let columns: Vec<Vec<(usize, f64)>> = (0..p)
        .into_par_iter()
        .map(|j| -> Result<Vec<(usize, f64)>> {
            let mut s: Vec<usize> = Vec::with_capacity(neighbors[j].len() + 1);
            s.extend(neighbors[j].iter().copied());
            s.push(j);
            s.sort_unstable();
            let k = s.len();
            let mut sub = Mat::zeros(k, k);
            for (a, &ia) in s.iter().enumerate() {
                for (b, &ib) in s.iter().enumerate() {
                    sub[(a, b)] = sigma[(ia, ib)];
                }
            }
            let pos = s.iter().position(|&v| v == j).unwrap();
            let mut rhs = Vector::zeros(k);
            rhs[pos] = 1.0;
            let sol = if (k as f64) < PINV_SUPPORT_FRACTION * n as f64 {
                crate::linalg::solve_spd_or_pinv(&sub, &rhs)?
            } else {
                pinv_solve(&sub, &rhs)?
            };
            Ok(s.iter().enumerate().map(|(a, &ia)| (ia, sol[a])).collect())
        })
        .collect::<Result<Vec<_>>>()?;

    let mut raw = Mat::zeros(p, p);
    for (j, col) in columns.iter().enumerate() {
        for &(i, v) in col {
            raw[(i, j)] = v;
        }
    }
    let mut values = Mat::zeros(p, p);
    for j in 0..p {
        values[(j, j)] = raw[(j, j)];
        for k in (j + 1)..p {
            let v = 0.5 * (raw[(j, k)] + raw[(k, j)]);
            values[(j, k)] = v;
            values[(k, j)] = v;
        }
    }
    PrecisionEstimate::new(values, EstimatorKind::Refit)
}

/// Class label of the two-group discriminant rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LdaClass {
    One,
    Two,
}

/// Sample means and sizes of the two training classes.
#[derive(Debug, Clone)]
pub struct ClassStats {
    pub mu1: Vector,
    pub mu2: Vector,
    pub n1: usize,
    pub n2: usize,
}

impl ClassStats {
    pub fn validate(&self) -> Result<()> {
        if self.n1 < 1 || self.n2 < 1 {
            return Err(Error::invalid_input("both classes need at least one sample"));
        }
        if self.mu1.len() != self.mu2.len() {
            return Err(Error::invalid_input("class mean dimensions differ"));
        }
        if self.mu1.iter().chain(self.mu2.iter()).any(|v| !v.is_finite()) {
            return Err(Error::invalid_input("non-finite class mean"));
        }
        Ok(())
    }
}

/// Discriminant score `(x - mean_avg)' Omega mu_diff + log(n1 / n2)` with the
/// mean difference entrywise thresholded at `tau_mu`. Scores above zero are
/// class one; zero and below are class two.
pub fn lda_score(
    omega: &PrecisionEstimate,
    stats: &ClassStats,
    tau_mu: f64,
    x: &Vector,
) -> Result<(f64, LdaClass)> {
    stats.validate()?;
    let p = omega.p();
    if stats.mu1.len() != p || x.len() != p {
        return Err(Error::DimensionMismatch {
            expected: format!("vectors of length {p}"),
            actual: format!("mu {} / x {}", stats.mu1.len(), x.len()),
        });
    }
    if tau_mu < 0.0 {
        return Err(Error::invalid_config("tau_mu must be nonnegative"));
    }
    let mut mu_diff = &stats.mu1 - &stats.mu2;
    for v in mu_diff.iter_mut() {
        if v.abs() < tau_mu {
            *v = 0.0;
        }
    }
    let mu_bar = (&stats.mu1 + &stats.mu2) * 0.5;
    let centered = x - mu_bar;
    let score =
        (omega.values() * &mu_diff).dot(&centered) + (stats.n1 as f64 / stats.n2 as f64).ln();
    let class = if score > 0.0 { LdaClass::One } else { LdaClass::Two };
    Ok((score, class))
}

/// Specificity, sensitivity, and the Matthews correlation coefficient, with
/// class one as the positive class. A zero denominator gives MCC 0; a
/// specificity or sensitivity with an empty denominator is vacuously 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassificationMetrics {
    pub specificity: f64,
    pub sensitivity: f64,
    pub mcc: f64,
}

pub fn classification_metrics(
    predicted: &[LdaClass],
    truth: &[LdaClass],
) -> Result<ClassificationMetrics> {
    if predicted.len() != truth.len() {
        return Err(Error::invalid_input("label vectors must have equal length"));
    }
    let (mut tp, mut tn, mut fp, mut fneg) = (0f64, 0f64, 0f64, 0f64);
    for (&pred, &actual) in predicted.iter().zip(truth) {
        match (pred, actual) {
            (LdaClass::One, LdaClass::One) => tp += 1.0,
            (LdaClass::Two, LdaClass::Two) => tn += 1.0,
            (LdaClass::One, LdaClass::Two) => fp += 1.0,
            (LdaClass::Two, LdaClass::One) => fneg += 1.0,
        }
    }
    let specificity = if tn + fp > 0.0 { tn / (tn + fp) } else { 1.0 };
    let sensitivity = if tp + fneg > 0.0 { tp / (tp + fneg) } else { 1.0 };
    let denom = ((tp + fp) * (tp + fneg) * (tn + fp) * (tn + fneg)).sqrt();
    let mcc = if denom > 0.0 {
        (tp * tn - fp * fneg) / denom
    } else {
        0.0
    };
    Ok(ClassificationMetrics {
        specificity,
        sensitivity,
        mcc,
    })
}

/// Target mean return and per-asset expected returns for the mean-variance
/// problem.
#[derive(Debug, Clone)]
pub struct PortfolioSpec {
    pub mu: Vector,
    pub gamma: f64,
}

impl PortfolioSpec {
    pub fn validate(&self) -> Result<()> {
        if self.mu.iter().any(|v| !v.is_finite()) || !self.gamma.is_finite() {
            return Err(Error::invalid_input("non-finite portfolio specification"));
        }
        Ok(())
    }
}

/// Closed-form minimum-variance weights under a budget and a target-return
/// constraint:
///
/// ```text
/// xi = (d1 - gamma d2) / (d3 d1 - d2^2) * Omega 1
///    + (gamma d3 - d2) / (d3 d1 - d2^2) * Omega mu
/// ```
///
/// with `d1 = mu' Omega mu`, `d2 = 1' Omega mu`, `d3 = 1' Omega 1`. When the
/// denominator degenerates (mean returns proportional to ones) the target
/// return is forced to `d2 / d3`; any other target is infeasible.
pub fn markowitz_weights(omega: &PrecisionEstimate, spec: &PortfolioSpec) -> Result<Vector> {
    spec.validate()?;
    let p = omega.p();
    if spec.mu.len() != p {
        return Err(Error::DimensionMismatch {
            expected: format!("mu of length {p}"),
            actual: format!("{}", spec.mu.len()),
        });
    }
    let ones = Vector::from_element(p, 1.0);
    let omega_mu = omega.values() * &spec.mu;
    let omega_one = omega.values() * &ones;
    let d1 = spec.mu.dot(&omega_mu);
    let d2 = ones.dot(&omega_mu);
    let d3 = ones.dot(&omega_one);
    let denom = d3 * d1 - d2 * d2;
    let scale = (d3 * d1).abs().max(d2 * d2).max(1.0);
    if denom.abs() <= 1e-12 * scale {
        let forced = d2 / d3;
        if (spec.gamma - forced).abs() <= 1e-10 * forced.abs().max(1.0) {
            return Ok(omega_one / d3);
        }
        return Err(Error::invalid_config(format!(
            "degenerate mean-variance system: only target return {forced} is attainable"
        )));
    }
    let a = (d1 - spec.gamma * d2) / denom;
    let b = (spec.gamma * d3 - d2) / denom;
    Ok(omega_one * a + omega_mu * b)
}

/// Scores `xhat' y / n`, the innovated proxy for the regression coefficients
/// of `y` on the original columns.
pub fn innovated_scores(xhat: &InnovatedMatrix, y: &Vector) -> Result<Vector> {
    if y.len() != xhat.n() {
        return Err(Error::DimensionMismatch {
            expected: format!("response of length {}", xhat.n()),
            actual: format!("{}", y.len()),
        });
    }
    Ok(xhat.values().transpose() * y / xhat.n() as f64)
}
