//! Scalable estimation of large sparse precision matrices.
//!
//! A Gaussian graphical model is recovered by converting precision matrix
//! estimation into covariance estimation: multiplying the data by the
//! precision matrix yields transformed variables whose covariance is the
//! precision matrix itself. That transformed data matrix is estimated block
//! by block through small nodewise penalized regressions, and the estimate's
//! sample covariance is thresholded to recover the graph.
//!
//! The crate provides the penalized solver ([`scaled_lasso`]), the estimation
//! pipeline ([`pipeline`]), marginal-correlation screening for very large
//! node counts ([`screening`]), simulation-design generators ([`simgen`]),
//! and downstream applications ([`applications`]).

pub mod applications;
pub mod error;
pub mod linalg;
pub mod pipeline;
pub mod rng;
pub mod scaled_lasso;
pub mod screening;
pub mod simgen;
pub mod student_t;

pub use error::{Error, Result};
pub use linalg::{Mat, Vector};

pub use applications::{
    classification_metrics, innovated_scores, lda_score, markowitz_weights, refit_columns,
    ClassStats, ClassificationMetrics, LdaClass, PortfolioSpec,
};
pub use pipeline::{
    assemble_xhat, bias_corrected, cv_threshold, fit_all_blocks, fit_block, frobenius_distance,
    frobenius_error, initial_estimator, innovated_sample_covariance, make_partition,
    oracle_block_fit, permutation_ensemble, recovery_metrics, refine, single_run, tau_grid,
    threshold, threshold_with, BlockFit, CvConfig, CvResult, EstimatorKind, InnovatedMatrix,
    Partition, PrecisionEstimate, RecoveryMetrics, RefineOutcome, SingleRun,
};
pub use scaled_lasso::{
    fit_scaled_lasso, kkt_max_violation, theoretical_lambda, universal_lambda, RegressionProblem,
    ScaledLassoFit, SolverOptions,
};
pub use screening::{fit_block_sis, sis_screen, ScreenConfig};
pub use simgen::{
    band_precision, band_precision_with_permutation, block_precision, sample_gaussian,
    GeneratorSpec, GroundTruth,
};
