//! Graph recovery and estimation error metrics.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::linalg::Mat;

use super::estimate::PrecisionEstimate;

/// Edge recovery rates.
///
/// `tpr` is the fraction of identified edges that are true edges. `fpr` is
/// the fraction of identified non-edges that are actually edges (the
/// denominator counts declared non-edges). Vacuous cases: with no identified
/// edges, `tpr` is 1 when the true graph is empty and 0 otherwise; with no
/// identified non-edges, `fpr` is 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RecoveryMetrics {
    pub tpr: f64,
    pub fpr: f64,
}

fn normalize(support: &[(usize, usize)], p: usize) -> Result<BTreeSet<(usize, usize)>> {
    let mut set = BTreeSet::new();
    for &(a, b) in support {
        if a == b {
            return Err(Error::invalid_input("support must contain off-diagonal pairs"));
        }
        if a >= p || b >= p {
            return Err(Error::invalid_input("support pair out of range"));
        }
        set.insert((a.min(b), a.max(b)));
    }
    Ok(set)
}

pub fn recovery_metrics(
    est_support: &[(usize, usize)],
    true_support: &[(usize, usize)],
    p: usize,
) -> Result<RecoveryMetrics> {
    let est = normalize(est_support, p)?;
    let truth = normalize(true_support, p)?;
    let total_pairs = p * (p - 1) / 2;

    let correct = est.intersection(&truth).count();
    let tpr = if est.is_empty() {
        if truth.is_empty() {
            1.0
        } else {
            0.0
        }
    } else {
        correct as f64 / est.len() as f64
    };

    let declared_nonedges = total_pairs - est.len();
    let missed = truth.difference(&est).count();
    let fpr = if declared_nonedges == 0 {
        0.0
    } else {
        missed as f64 / declared_nonedges as f64
    };

    Ok(RecoveryMetrics { tpr, fpr })
}

/// Frobenius distance between two matrices of equal shape.
pub fn frobenius_distance(a: &Mat, b: &Mat) -> Result<f64> {
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch {
            expected: format!("{:?}", a.shape()),
            actual: format!("{:?}", b.shape()),
        });
    }
    Ok(a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt())
}

/// Frobenius distance between an estimate and a true precision matrix.
pub fn frobenius_error(est: &PrecisionEstimate, truth: &Mat) -> Result<f64> {
    frobenius_distance(est.values(), truth)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_recovery() {
        let support = vec![(0, 1), (2, 3)];
        let m = recovery_metrics(&support, &support, 5).unwrap();
        assert_eq!(m.tpr, 1.0);
        assert_eq!(m.fpr, 0.0);
    }

    #[test]
    fn worked_example_counts() {
        // 10 identified edges of which 8 correct; 3 true edges sit among the
        // 95 declared non-edges (p = 15 gives 105 pairs total).
        let est: Vec<(usize, usize)> = (1..11).map(|k| (0, k)).collect();
        let mut truth: Vec<(usize, usize)> = (1..9).map(|k| (0, k)).collect();
        truth.push((1, 2));
        truth.push((3, 4));
        truth.push((5, 6));
        let m = recovery_metrics(&est, &truth, 15).unwrap();
        assert!((m.tpr - 0.8).abs() < 1e-15);
        assert!((m.fpr - 3.0 / 95.0).abs() < 1e-15);
    }

    #[test]
    fn empty_estimate_conventions() {
        let truth = vec![(0, 1)];
        let m = recovery_metrics(&[], &truth, 4).unwrap();
        assert_eq!(m.tpr, 0.0);
        assert!((m.fpr - 1.0 / 6.0).abs() < 1e-15);

        let m = recovery_metrics(&[], &[], 4).unwrap();
        assert_eq!(m.tpr, 1.0);
        assert_eq!(m.fpr, 0.0);
    }

    #[test]
    fn full_estimate_has_zero_fpr() {
        let est: Vec<(usize, usize)> = (0..3).flat_map(|a| ((a + 1)..3).map(move |b| (a, b))).collect();
        let m = recovery_metrics(&est, &[(0, 1)], 3).unwrap();
        assert_eq!(m.fpr, 0.0);
    }

    #[test]
    fn rejects_diagonal_pairs() {
        assert!(recovery_metrics(&[(1, 1)], &[], 3).is_err());
    }

    #[test]
    fn frobenius_examples() {
        let a = Mat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 1.0]);
        assert_eq!(frobenius_distance(&a, &a).unwrap(), 0.0);
        let mut b = a.clone();
        b[(0, 1)] = 3.0;
        assert_eq!(frobenius_distance(&a, &b).unwrap(), 3.0);
    }
}
