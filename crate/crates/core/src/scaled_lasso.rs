//! Joint penalized estimation of regression coefficients and the noise scale.
//!
//! Solves
//!
//! ```text
//! min over (beta, sigma > 0):  ||y - X beta||^2 / (2 n sigma) + sigma / 2
//!                              + lambda * sum_k scale_k * |beta_k|
//! ```
//!
//! where `scale_k` is the L2 norm of column k divided by sqrt(n). The weighted
//! penalty rescales every design column to norm sqrt(n), so the penalty level
//! `lambda` can be fixed once for all nodewise regressions. The solver
//! alternates coordinate-descent lasso steps at penalty `lambda * sigma` with
//! the closed-form scale update `sigma = ||residuals|| / sqrt(n)`.

use crate::error::{Error, Result};
use crate::linalg::{axpy, dot, Mat, Vector};
use crate::student_t::t_quantile;

/// A single nodewise regression: response vector, design matrix, and the
/// per-column penalty scales.
#[derive(Debug, Clone)]
pub struct RegressionProblem {
    response: Vector,
    design: Mat,
    column_scales: Vector,
}

impl RegressionProblem {
    /// Builds a problem, computing column scales as `||X_k||_2 / sqrt(n)`.
    pub fn new(response: Vector, design: Mat) -> Result<Self> {
        let n = response.len();
        let m = design.ncols();
        if design.nrows() != n {
            return Err(Error::DimensionMismatch {
                expected: format!("design with {n} rows"),
                actual: format!("{} rows", design.nrows()),
            });
        }
        if n < 2 {
            return Err(Error::invalid_input("need at least 2 observations"));
        }
        if m < 1 {
            return Err(Error::invalid_input("design must have at least one column"));
        }
        if response.iter().any(|v| !v.is_finite()) || design.iter().any(|v| !v.is_finite()) {
            return Err(Error::invalid_input("non-finite entry in regression data"));
        }
        let column_scales = crate::linalg::column_scales(&design);
        Ok(RegressionProblem {
            response,
            design,
            column_scales,
        })
    }

    pub fn n(&self) -> usize {
        self.response.len()
    }

    pub fn m(&self) -> usize {
        self.design.ncols()
    }

    pub fn response(&self) -> &Vector {
        &self.response
    }

    pub fn design(&self) -> &Mat {
        &self.design
    }

    pub fn column_scales(&self) -> &Vector {
        &self.column_scales
    }
}

/// Result of one scaled-lasso fit. Coefficients are on the original column
/// scale and `residuals = response - design * beta` exactly (recomputed from
/// the final iterate).
#[derive(Debug, Clone)]
pub struct ScaledLassoFit {
    pub beta: Vector,
    pub sigma: f64,
    pub residuals: Vector,
    pub objective: f64,
    pub outer_iterations: usize,
    pub converged: bool,
}

/// Solver tolerances. The defaults aim at residual-level accuracy, which is
/// what the downstream block precision estimates depend on.
#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Inner coordinate descent stops when the largest coefficient change in a
    /// sweep is at most `inner_tol * max(1, ||beta||_inf)`.
    pub inner_tol: f64,
    /// Outer loop stops when the scale update satisfies
    /// `|delta sigma| <= outer_tol * sigma`.
    pub outer_tol: f64,
    pub max_outer: usize,
    /// Guard for the budget of full coordinate sweeps within one lasso solve.
    pub max_sweeps: usize,
    /// Lower bound on sigma; the objective is singular at sigma = 0.
    pub sigma_floor: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            inner_tol: 1e-9,
            outer_tol: 1e-8,
            max_outer: 100,
            max_sweeps: 10_000,
            sigma_floor: 1e-12,
        }
    }
}

/// The penalized objective at `(beta, sigma)` with residuals supplied by the
/// caller.
pub fn objective_value(
    problem: &RegressionProblem,
    lambda: f64,
    beta: &Vector,
    sigma: f64,
    residuals: &Vector,
) -> f64 {
    let n = problem.n() as f64;
    let rss = residuals.dot(residuals);
    let penalty: f64 = beta
        .iter()
        .zip(problem.column_scales.iter())
        .map(|(b, s)| s * b.abs())
        .sum();
    rss / (2.0 * n * sigma) + 0.5 * sigma + lambda * penalty
}

/// The automatic penalty level `B / sqrt(n - 1 + B^2)` with
/// `B = t_quantile(1 - sqrt(n) / (2 p log p), n - 1)`.
///
/// Deterministic in `(n, p)`. Fails when the quantile argument leaves (0, 1)
/// or the resulting penalty is not positive (both mean `n` is too large
/// relative to `p` for this rule; supply a penalty manually instead).
pub fn universal_lambda(n: usize, p: usize) -> Result<f64> {
    if n < 3 {
        return Err(Error::invalid_config("penalty rule requires n >= 3"));
    }
    if p < 2 {
        return Err(Error::invalid_config("penalty rule requires p >= 2"));
    }
    let nf = n as f64;
    let pf = p as f64;
    let arg = 1.0 - nf.sqrt() / (2.0 * pf * pf.ln());
    if !(arg > 0.0 && arg < 1.0) {
        return Err(Error::invalid_config(format!(
            "quantile argument {arg} outside (0, 1) for n={n}, p={p}; supply lambda manually"
        )));
    }
    let b = t_quantile(arg, (n - 1) as f64)?;
    let lambda = b / ((n as f64 - 1.0) + b * b).sqrt();
    if !lambda.is_finite() || lambda <= 0.0 {
        return Err(Error::invalid_config(format!(
            "penalty rule gives non-positive lambda {lambda} for n={n}, p={p}; supply lambda manually"
        )));
    }
    Ok(lambda)
}

/// The theoretical penalty `(1 + epsilon) * sqrt(2 delta log(p) / n)`,
/// exposed as an alternative to [`universal_lambda`].
pub fn theoretical_lambda(n: usize, p: usize, delta: f64, epsilon: f64) -> Result<f64> {
    if n < 2 || p < 2 {
        return Err(Error::invalid_config("theoretical penalty requires n, p >= 2"));
    }
    if delta <= 0.0 || epsilon < 0.0 {
        return Err(Error::invalid_config(
            "theoretical penalty requires delta > 0 and epsilon >= 0",
        ));
    }
    Ok((1.0 + epsilon) * (2.0 * delta * (p as f64).ln() / n as f64).sqrt())
}

/// Fits the scaled lasso by alternating minimization.
///
/// Columns with zero scale are excluded and their coefficients forced to zero.
/// Non-convergence after `max_outer` scale updates returns the current iterate
/// with `converged = false`.
pub fn fit_scaled_lasso(
    problem: &RegressionProblem,
    lambda: f64,
    opts: &SolverOptions,
) -> Result<ScaledLassoFit> {
    if lambda < 0.0 {
        return Err(Error::invalid_config("lambda must be nonnegative"));
    }
    let n = problem.n();
    let m = problem.m();
    let sqrt_n = (n as f64).sqrt();

    let design_data = problem.design.as_slice();
    let cols: Vec<&[f64]> = (0..m).map(|k| &design_data[k * n..(k + 1) * n]).collect();
    let scales: Vec<f64> = problem.column_scales.iter().copied().collect();
    // (1/n) ||X_k||^2, the curvature of each coordinate update.
    let curvature: Vec<f64> = scales.iter().map(|s| s * s).collect();

    let mut beta = vec![0.0f64; m];
    let mut residuals: Vec<f64> = problem.response.iter().copied().collect();
    let mut sigma = (norm2(&residuals) / sqrt_n).max(opts.sigma_floor);
    let mut prev_objective = f64::INFINITY;

    let mut converged = false;
    let mut outer = 0;
    let mut sweep_budget = opts.max_sweeps;
    while outer < opts.max_outer {
        outer += 1;
        let lasso_done = coordinate_descent(
            &cols,
            &curvature,
            &scales,
            lambda * sigma,
            opts.inner_tol,
            &mut beta,
            &mut residuals,
            &mut sweep_budget,
            n,
        );
        let sigma_new = (norm2(&residuals) / sqrt_n).max(opts.sigma_floor);

        if cfg!(debug_assertions) {
            let beta_v = Vector::from_column_slice(&beta);
            let res_v = Vector::from_column_slice(&residuals);
            let obj = objective_value(problem, lambda, &beta_v, sigma_new, &res_v);
            debug_assert!(
                obj <= prev_objective * (1.0 + 1e-12) + 1e-12,
                "objective increased across outer iterations: {prev_objective} -> {obj}"
            );
            prev_objective = obj;
        }

        let delta = (sigma_new - sigma).abs();
        sigma = sigma_new;
        if lasso_done && delta <= opts.outer_tol * sigma.max(opts.sigma_floor) {
            converged = true;
            break;
        }
        if sweep_budget == 0 {
            break;
        }
    }

    // Recompute residuals from the final coefficients so that the identity
    // residuals = response - design * beta holds to one rounding.
    let beta = Vector::from_column_slice(&beta);
    let mut residuals = problem.response.clone();
    for k in 0..m {
        if beta[k] != 0.0 {
            axpy(-beta[k], cols[k], residuals.as_mut_slice());
        }
    }
    let sigma = (residuals.norm() / sqrt_n).max(opts.sigma_floor);
    let objective = objective_value(problem, lambda, &beta, sigma, &residuals);

    Ok(ScaledLassoFit {
        beta,
        sigma,
        residuals,
        objective,
        outer_iterations: outer,
        converged,
    })
}

/// Lasso coordinate descent at fixed penalty `penalty * scale_k` per column.
/// Full sweeps admit new coordinates; between full sweeps the active set is
/// iterated to convergence. Returns whether the final full sweep moved no
/// coordinate beyond tolerance.
#[allow(clippy::too_many_arguments)]
fn coordinate_descent(
    cols: &[&[f64]],
    curvature: &[f64],
    scales: &[f64],
    penalty: f64,
    inner_tol: f64,
    beta: &mut [f64],
    residuals: &mut [f64],
    sweep_budget: &mut usize,
    n: usize,
) -> bool {
    let m = cols.len();
    let inv_n = 1.0 / n as f64;
    let mut active: Vec<usize> = Vec::with_capacity(64);

    let update = |k: usize, beta: &mut [f64], residuals: &mut [f64]| -> f64 {
        let q = curvature[k];
        if q == 0.0 {
            // Zero-scale column: coefficient pinned at zero.
            if beta[k] != 0.0 {
                axpy(beta[k], cols[k], residuals);
                let moved = beta[k].abs();
                beta[k] = 0.0;
                return moved;
            }
            return 0.0;
        }
        let g = dot(cols[k], residuals) * inv_n;
        let rho = g + q * beta[k];
        let t = penalty * scales[k];
        let new = soft_threshold(rho, t) / q;
        let delta = new - beta[k];
        if delta != 0.0 {
            axpy(-delta, cols[k], residuals);
            beta[k] = new;
        }
        delta.abs()
    };

    loop {
        if *sweep_budget == 0 {
            return false;
        }
        *sweep_budget -= 1;

        let mut max_delta = 0.0f64;
        for k in 0..m {
            max_delta = max_delta.max(update(k, beta, residuals));
        }
        let beta_inf = beta.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        if max_delta <= inner_tol * beta_inf.max(1.0) {
            return true;
        }

        while *sweep_budget > 0 {
            *sweep_budget -= 1;
            active.clear();
            active.extend((0..m).filter(|&k| beta[k] != 0.0));
            let mut max_delta = 0.0f64;
            for &k in &active {
                max_delta = max_delta.max(update(k, beta, residuals));
            }
            let beta_inf = beta.iter().fold(0.0f64, |a, b| a.max(b.abs()));
            if max_delta <= inner_tol * beta_inf.max(1.0) {
                break;
            }
        }
    }
}

#[inline]
fn soft_threshold(x: f64, t: f64) -> f64 {
    if x > t {
        x - t
    } else if x < -t {
        x + t
    } else {
        0.0
    }
}

fn norm2(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// Largest violation of the stationarity conditions at the returned fit.
///
/// For every column k the gradient `g_k = X_k' residuals / n` must satisfy
/// `|g_k| <= lambda * sigma * scale_k`, with equality on the active set.
pub fn kkt_max_violation(problem: &RegressionProblem, lambda: f64, fit: &ScaledLassoFit) -> f64 {
    let n = problem.n() as f64;
    let mut worst = 0.0f64;
    for k in 0..problem.m() {
        let g = problem.design.column(k).dot(&fit.residuals) / n;
        let bound = lambda * fit.sigma * problem.column_scales[k];
        let v = if fit.beta[k] != 0.0 {
            (g - fit.beta[k].signum() * bound).abs()
        } else {
            (g.abs() - bound).max(0.0)
        };
        worst = worst.max(v);
    }
    worst
}
