pub mod benchmark;
pub mod classify;
pub mod estimate;
pub mod evaluate;
pub mod portfolio;
pub mod refit;
pub mod scores;
pub mod simulate;

use clap::{Args, ValueEnum};
use serde::Serialize;

use isee_core::{
    assemble_xhat, bias_corrected, cv_threshold, fit_all_blocks, initial_estimator,
    make_partition, permutation_ensemble, refine, theoretical_lambda, threshold,
    universal_lambda, CvConfig, Mat, PrecisionEstimate, ScreenConfig, SolverOptions,
};

use crate::error::{CliError, CliResult};
use crate::manifest::StageTimer;

/// Estimator configuration shared by every command that fits the model.
#[derive(Args, Debug, Clone, Serialize)]
pub struct EstimatorOpts {
    /// Which estimator to produce
    #[arg(long, value_enum, default_value_t = KindArg::Ensemble)]
    pub kind: KindArg,
    /// Penalty level override; defaults to the automatic t-quantile rule
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Use the theoretical penalty (1 + epsilon) * sqrt(2 delta log(p) / n)
    #[arg(long)]
    pub theoretical_lambda: bool,
    /// delta for the theoretical penalty
    #[arg(long, default_value_t = 2.0)]
    pub delta: f64,
    /// epsilon for the theoretical penalty
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    /// Ensemble repetitions (column permutations)
    #[arg(long, default_value_t = 5)]
    pub n2: usize,
    /// Threshold candidates in the cross-validation grid
    #[arg(long, default_value_t = 20)]
    pub cv_grid: usize,
    /// Fraction of rows in the first cross-validation fold
    #[arg(long, default_value_t = 0.9)]
    pub cv_fraction: f64,
    /// Number of random cross-validation splits
    #[arg(long, default_value_t = 5)]
    pub cv_splits: usize,
    /// Restrict each nodewise regression to a marginal-correlation submodel
    #[arg(long)]
    pub sis: bool,
    /// Screened submodel size fraction (submodel keeps floor(zeta * n) columns)
    #[arg(long, default_value_t = 0.5)]
    pub zeta: f64,
    /// Iterative re-screening rounds (0 disables)
    #[arg(long, default_value_t = 0)]
    pub isis: usize,
    /// Skip column mean-centering of the input
    #[arg(long)]
    pub no_center: bool,
}

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KindArg {
    Initial,
    Thresholded,
    Refined,
    BiasCorrected,
    Ensemble,
}

impl EstimatorOpts {
    pub fn resolve_lambda(&self, n: usize, p: usize) -> CliResult<f64> {
        if let Some(l) = self.lambda {
            if !l.is_finite() || l <= 0.0 {
                return Err(CliError::validation("lambda must be positive"));
            }
            return Ok(l);
        }
        if self.theoretical_lambda {
            return Ok(theoretical_lambda(n, p, self.delta, self.epsilon)?);
        }
        Ok(universal_lambda(n, p)?)
    }

    pub fn cv_config(&self, seed: u64) -> CvConfig {
        CvConfig {
            grid_size: self.cv_grid,
            n1_fraction: self.cv_fraction,
            num_splits: self.cv_splits,
            rng_seed: seed,
        }
    }

    pub fn screen_config(&self) -> Option<ScreenConfig> {
        if self.sis {
            Some(ScreenConfig {
                zeta: self.zeta,
                standardize: true,
                isis_iterations: self.isis,
            })
        } else {
            None
        }
    }
}

/// Validates the estimation input shape.
pub fn validate_data(x: &Mat) -> CliResult<()> {
    if x.nrows() < 10 {
        return Err(CliError::validation(format!(
            "need at least 10 observations, found {}",
            x.nrows()
        )));
    }
    if x.ncols() < 2 {
        return Err(CliError::validation(format!(
            "need at least 2 columns, found {}",
            x.ncols()
        )));
    }
    Ok(())
}

/// Subtracts each column's mean in place.
pub fn center_columns(x: &mut Mat) {
    let n = x.nrows();
    for mut col in x.column_iter_mut() {
        let mean = col.iter().sum::<f64>() / n as f64;
        for v in col.iter_mut() {
            *v -= mean;
        }
    }
}

/// What an estimation run produced, for manifests and reporting.
pub struct EstimateOutcome {
    pub estimate: PrecisionEstimate,
    pub lambda: f64,
    /// Cross-validated threshold, when the estimator kind uses one directly.
    pub cv_tau: Option<f64>,
    pub cv_degenerate: bool,
}

/// Runs the configured estimator, recording per-stage timings.
pub fn compute_estimate(
    x: &Mat,
    opts: &EstimatorOpts,
    seed: u64,
    timer: &mut StageTimer,
) -> CliResult<EstimateOutcome> {
    let (n, p) = (x.nrows(), x.ncols());
    let lambda = opts.resolve_lambda(n, p)?;
    let solver = SolverOptions::default();
    let screen = opts.screen_config();
    let cv_cfg = opts.cv_config(seed);
    let mut cv_tau = None;
    let mut cv_degenerate = false;

    let estimate = match opts.kind {
        KindArg::Ensemble => {
            timer.stage("ensemble");
            permutation_ensemble(x, opts.n2, seed, &cv_cfg, lambda, &solver, screen.as_ref())?
        }
        _ => {
            timer.stage("fit");
            let partition = make_partition(p)?;
            let blocks = fit_all_blocks(x, &partition, lambda, &solver, screen.as_ref())?;
            timer.stage("assemble");
            let xhat = assemble_xhat(x, &blocks)?;
            let initial = initial_estimator(&xhat, &blocks)?;
            match opts.kind {
                KindArg::Initial => initial,
                KindArg::BiasCorrected => {
                    timer.stage("bias_correction");
                    bias_corrected(&initial, &blocks)?
                }
                KindArg::Thresholded | KindArg::Refined => {
                    timer.stage("cv");
                    let cv = cv_threshold(&xhat, &cv_cfg)?;
                    if cv.degenerate {
                        eprintln!(
                            "warning: cross-validation risk is flat; using the smallest threshold {}",
                            cv.tau
                        );
                    }
                    cv_tau = Some(cv.tau);
                    cv_degenerate = cv.degenerate;
                    timer.stage("threshold");
                    let thresholded = threshold(&initial, cv.tau)?;
                    if opts.kind == KindArg::Thresholded {
                        thresholded
                    } else {
                        timer.stage("refine");
                        refine(x, &thresholded, &partition, lambda, &solver)?.estimate
                    }
                }
                KindArg::Ensemble => unreachable!(),
            }
        }
    };
    Ok(EstimateOutcome {
        estimate,
        lambda,
        cv_tau,
        cv_degenerate,
    })
}

/// Thread count resolution: the ISEE_THREADS environment variable overrides
/// the --threads flag; unset means the default rayon pool.
pub fn resolve_threads(flag: Option<usize>) -> CliResult<Option<usize>> {
    if let Ok(value) = std::env::var("ISEE_THREADS") {
        let parsed: usize = value.parse().map_err(|_| {
            CliError::validation(format!("ISEE_THREADS='{value}' is not a thread count"))
        })?;
        return Ok(Some(parsed));
    }
    Ok(flag)
}

/// Runs `f` inside a pool of the requested size, or the default pool.
pub fn with_pool<T: Send>(
    threads: Option<usize>,
    f: impl FnOnce() -> CliResult<T> + Send,
) -> CliResult<T> {
    match resolve_threads(threads)? {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| CliError::validation(format!("thread pool: {e}")))?
            .install(f),
        None => f(),
    }
}
