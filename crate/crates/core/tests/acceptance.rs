//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! with its measurements. Run with `cargo test -p isee-core --test acceptance`
//! (add `-- --nocapture` to see the lines for passing criteria too).

mod common;

use std::collections::BTreeSet;

use common::*;
use isee_core::*;

fn support_set(est: &PrecisionEstimate) -> BTreeSet<(usize, usize)> {
    est.support().iter().copied().collect()
}

struct Clause {
    label: String,
    pass: bool,
}

fn clause(label: impl Into<String>, pass: bool) -> Clause {
    Clause {
        label: label.into(),
        pass,
    }
}

fn report(criterion: &str, clauses: &[Clause]) {
    let all = clauses.iter().all(|c| c.pass);
    println!(
        "ACCEPTANCE {criterion}: {}",
        if all { "PASS" } else { "FAIL" }
    );
    for c in clauses {
        println!(
            "  [{}] {}",
            if c.pass { "pass" } else { "FAIL" },
            c.label
        );
    }
    assert!(all, "criterion {criterion} failed; see clause list above");
}

/// Criterion 1: block-design replication at p = 1000, n = 200 with the
/// default ensemble (5 permutations, cross-validated threshold), 5 seeded
/// repetitions.
///
/// Measured against the reference values TPR 0.96799, FPR 0.05005,
/// Frobenius 3206.09. The FPR and Frobenius clauses are not attainable under
/// the literal block generator: the shifted blocks put the precision diagonal
/// near 2, so the innovated-covariance entry noise (sd about diag/sqrt(n) =
/// 0.14) overlaps the 0.5 links, and even thresholding the exact oracle
/// matrix X*Omega cannot reach the reference operating point (precision 0.93
/// coincides with a miss rate of 0.62 on the oracle frontier). A per-rep
/// Frobenius distance is bounded by ~130 for any sane estimator here, so the
/// reference 3206.09 is evidently a 100-repetition aggregate; the per-rep
/// mean times 100 does land inside the +/-25% bracket. Both clauses are
/// asserted as written and their diagnostics printed.
#[test]
fn criterion_01_block_model_table_replication() {
    let p = 1000usize;
    let n = 200usize;
    let reps = 5u64;
    let lambda = universal_lambda(n, p).unwrap();
    let opts = SolverOptions::default();
    let cfg = CvConfig::default();

    let mut tprs = Vec::new();
    let mut fprs = Vec::new();
    let mut miss_rates = Vec::new();
    let mut frobs = Vec::new();
    let started = std::time::Instant::now();
    for seed in 0..reps {
        let truth = block_precision(p, seed).unwrap();
        let x = sample_gaussian(&truth, n, seed + 10_000).unwrap();
        let est = permutation_ensemble(&x, 5, seed, &cfg, lambda, &opts, None).unwrap();
        let m = recovery_metrics(est.support(), &truth.support, p).unwrap();
        let est_set = support_set(&est);
        let missed = truth.support.iter().filter(|e| !est_set.contains(e)).count();
        tprs.push(m.tpr);
        fprs.push(m.fpr);
        miss_rates.push(missed as f64 / truth.support.len() as f64);
        frobs.push(frobenius_error(&est, &truth.omega).unwrap());
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let (tpr, fpr, miss, frob) = (mean(&tprs), mean(&fprs), mean(&miss_rates), mean(&frobs));
    println!(
        "criterion 1 measurements: mean tpr={tpr:.5} fpr={fpr:.6} missrate={miss:.5} \
         frobenius={frob:.2} (x100 = {:.1}) runtime={:.1}s",
        100.0 * frob,
        started.elapsed().as_secs_f64()
    );

    report(
        "1 (block design, p=1000)",
        &[
            clause(format!("mean TPR {tpr:.5} in [0.92, 1.0]"), (0.92..=1.0).contains(&tpr)),
            clause(
                format!("mean FPR {fpr:.6} in [0.01, 0.09] (reference 0.05005)"),
                (0.01..=0.09).contains(&fpr),
            ),
            clause(
                format!("mean Frobenius {frob:.2} within +/-25% of 3206.09"),
                (0.75 * 3206.09..=1.25 * 3206.09).contains(&frob),
            ),
        ],
    );
}

/// Criterion 2: band design at p = 200, n = 200, 10 repetitions with the
/// default ensemble; TPR >= 0.90, FPR <= 0.05, total runtime under 2 minutes.
#[test]
fn criterion_02_band_model_desk_scale() {
    let p = 200usize;
    let n = 200usize;
    let lambda = universal_lambda(n, p).unwrap();
    let opts = SolverOptions::default();
    let cfg = CvConfig::default();

    let started = std::time::Instant::now();
    let mut tprs = Vec::new();
    let mut fprs = Vec::new();
    for seed in 0..10u64 {
        let truth = band_precision(p, seed).unwrap();
        let x = sample_gaussian(&truth, n, seed + 100).unwrap();
        let est = permutation_ensemble(&x, 5, seed, &cfg, lambda, &opts, None).unwrap();
        let m = recovery_metrics(est.support(), &truth.support, p).unwrap();
        tprs.push(m.tpr);
        fprs.push(m.fpr);
    }
    let elapsed = started.elapsed().as_secs_f64();
    let tpr = tprs.iter().sum::<f64>() / 10.0;
    let fpr = fprs.iter().sum::<f64>() / 10.0;
    println!("criterion 2 measurements: mean tpr={tpr:.4} fpr={fpr:.6} runtime={elapsed:.1}s");

    report(
        "2 (band design, p=200)",
        &[
            clause(format!("mean TPR {tpr:.4} >= 0.90"), tpr >= 0.90),
            clause(format!("mean FPR {fpr:.6} <= 0.05"), fpr <= 0.05),
            clause(format!("runtime {elapsed:.1}s < 120s"), elapsed < 120.0),
        ],
    );
}

/// Criterion 3: substituting the true coefficients and block precisions
/// reproduces X * Omega to 1e-12 and the diagonal-block identity bitwise.
#[test]
fn criterion_03_oracle_pipeline_identity() {
    let mut clauses = Vec::new();
    for p in [4usize, 5, 20] {
        let truth = band_precision(p, 7 + p as u64).unwrap();
        let x = sample_gaussian(&truth, 40, 8 + p as u64).unwrap();
        let partition = make_partition(p).unwrap();
        let blocks: Vec<BlockFit> = partition
            .blocks()
            .iter()
            .map(|b| oracle_block_fit(&x, b, &truth.omega, false).unwrap())
            .collect();
        let xhat = assemble_xhat(&x, &blocks).unwrap();
        let expected = &x * &truth.omega;
        let err = linf(xhat.values(), &expected);
        clauses.push(clause(format!("p={p}: ||xhat - X*Omega||_inf = {err:.2e} <= 1e-12"), err <= 1e-12));

        let initial = initial_estimator(&xhat, &blocks).unwrap();
        let mut bitwise = true;
        for bf in &blocks {
            for (i, &a) in bf.block.iter().enumerate() {
                for (j, &b) in bf.block.iter().enumerate() {
                    bitwise &= initial.values()[(a, b)].to_bits()
                        == bf.omega_block[(i, j)].to_bits();
                }
            }
        }
        clauses.push(clause(format!("p={p}: diagonal-block identity bitwise"), bitwise));
    }
    report("3 (oracle pipeline identity)", &clauses);
}

/// Criterion 4: solver vs the derivative-free coordinate-search oracle on 20
/// random 5x3 problems; objective gap <= 1e-6 and stationarity residuals
/// <= 1e-7.
#[test]
fn criterion_04_solver_vs_brute_force() {
    let opts = SolverOptions::default();
    let lambda = 0.5;
    let mut worst_gap = 0.0f64;
    let mut worst_kkt = 0.0f64;
    for seed in 0..20u64 {
        let mut rng = seeded_rng(9_000 + seed);
        let x = gaussian_matrix(5, 3, &mut rng);
        let y = gaussian_vector(5, &mut rng);
        let problem = RegressionProblem::new(y.clone(), x.clone()).unwrap();
        let fit = fit_scaled_lasso(&problem, lambda, &opts).unwrap();
        let solver_value = oracle_objective(&y, &x, lambda, fit.beta.as_slice(), fit.sigma);
        let (_, _, oracle_value) = oracle_minimize(&y, &x, lambda, opts.sigma_floor);
        worst_gap = worst_gap.max((solver_value - oracle_value).abs());
        worst_kkt = worst_kkt.max(kkt_max_violation(&problem, lambda, &fit));
    }
    println!("criterion 4 measurements: worst gap={worst_gap:.2e} worst kkt={worst_kkt:.2e}");
    report(
        "4 (solver vs brute force)",
        &[
            clause(format!("objective gap {worst_gap:.2e} <= 1e-6"), worst_gap <= 1e-6),
            clause(format!("kkt residual {worst_kkt:.2e} <= 1e-7"), worst_kkt <= 1e-7),
        ],
    );
}

/// Criterion 5: the automatic penalty rule matches an independent quadrature
/// quantile oracle to 1e-6 at the three stated (n, p) pairs.
#[test]
fn criterion_05_penalty_rule_vs_oracle() {
    let mut clauses = Vec::new();
    for (n, p) in [(200usize, 400usize), (200, 1000), (100, 5000)] {
        let lam = universal_lambda(n, p).unwrap();
        let oracle = oracle_universal_lambda(n, p);
        let err = (lam - oracle).abs();
        clauses.push(clause(
            format!("n={n}, p={p}: |{lam:.8} - {oracle:.8}| = {err:.2e} <= 1e-6"),
            err <= 1e-6,
        ));
    }
    report("5 (penalty rule vs quantile oracle)", &clauses);
}

/// Criterion 6: band design at p = 50, n = 200; the cross-validated threshold
/// keeps every true link in at least 9 of 10 seeded repetitions.
#[test]
fn criterion_06_cv_threshold_screening() {
    let p = 50usize;
    let n = 200usize;
    let lambda = universal_lambda(n, p).unwrap();
    let opts = SolverOptions::default();
    let mut superset = 0;
    for seed in 0..10u64 {
        let truth = band_precision(p, seed).unwrap();
        let x = sample_gaussian(&truth, n, seed + 1000).unwrap();
        let cfg = CvConfig {
            rng_seed: seed,
            ..CvConfig::default()
        };
        let run = single_run(&x, lambda, &cfg, None, &opts).unwrap();
        let est = support_set(&run.thresholded);
        if truth.support.iter().all(|e| est.contains(e)) {
            superset += 1;
        }
    }
    println!("criterion 6 measurements: support superset in {superset}/10 reps");
    report(
        "6 (cv threshold screening)",
        &[clause(format!("supp(Omega) contained in estimate in {superset}/10 >= 9"), superset >= 9)],
    );
}

/// Criterion 7: block design at p = 40, n = 200 over 20 repetitions; the
/// bias-corrected estimator's median sup-norm error does not exceed the
/// initial estimator's, and refinement is no worse in at least 16 of 20.
#[test]
fn criterion_07_bias_correction_and_refinement() {
    let p = 40usize;
    let n = 200usize;
    let lambda = universal_lambda(n, p).unwrap();
    let opts = SolverOptions::default();
    let mut init_errors = Vec::new();
    let mut bias_errors = Vec::new();
    let mut refined_no_worse = 0;
    for seed in 0..20u64 {
        let truth = block_precision(p, seed).unwrap();
        let x = sample_gaussian(&truth, n, seed + 2000).unwrap();
        let cfg = CvConfig {
            rng_seed: seed,
            ..CvConfig::default()
        };
        let partition = make_partition(p).unwrap();
        let blocks = fit_all_blocks(&x, &partition, lambda, &opts, None).unwrap();
        let xhat = assemble_xhat(&x, &blocks).unwrap();
        let initial = initial_estimator(&xhat, &blocks).unwrap();
        let cv = cv_threshold(&xhat, &cfg).unwrap();
        let thresholded = threshold(&initial, cv.tau).unwrap();
        let bias = bias_corrected(&initial, &blocks).unwrap();
        let refined = refine(&x, &thresholded, &partition, lambda, &opts).unwrap();

        let e_init = linf(initial.values(), &truth.omega);
        init_errors.push(e_init);
        bias_errors.push(linf(bias.values(), &truth.omega));
        if linf(refined.estimate.values(), &truth.omega) <= e_init {
            refined_no_worse += 1;
        }
    }
    let median = |v: &mut Vec<f64>| -> f64 {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        0.5 * (v[9] + v[10])
    };
    let med_init = median(&mut init_errors);
    let med_bias = median(&mut bias_errors);
    println!(
        "criterion 7 measurements: median init={med_init:.4} median bias-corrected={med_bias:.4} \
         refined no worse in {refined_no_worse}/20"
    );
    report(
        "7 (bias correction and refinement)",
        &[
            clause(
                format!("median bias-corrected {med_bias:.4} <= median initial {med_init:.4}"),
                med_bias <= med_init,
            ),
            clause(
                format!("refined no worse than initial in {refined_no_worse}/20 >= 16"),
                refined_no_worse >= 16,
            ),
        ],
    );
}

/// Criterion 8: portfolio constraints hold to 1e-10 on 100 random symmetric
/// positive definite instances, and the degenerate mean path errors.
#[test]
fn criterion_08_markowitz_constraints() {
    let mut rng = seeded_rng(4242);
    let mut worst_budget = 0.0f64;
    let mut worst_return = 0.0f64;
    for i in 0..100 {
        let p = 2 + (i % 7);
        let omega = PrecisionEstimate::new(random_spd(p, &mut rng), EstimatorKind::Refit).unwrap();
        let mu = gaussian_vector(p, &mut rng);
        let gamma = 0.25 + 0.01 * i as f64;
        let spec = PortfolioSpec { mu: mu.clone(), gamma };
        let xi = markowitz_weights(&omega, &spec).unwrap();
        let ones = Vector::from_element(p, 1.0);
        worst_budget = worst_budget.max((xi.dot(&ones) - 1.0).abs());
        worst_return = worst_return.max((xi.dot(&mu) - gamma).abs());
    }

    let omega = PrecisionEstimate::new(Mat::identity(4, 4), EstimatorKind::Refit).unwrap();
    let degenerate = markowitz_weights(
        &omega,
        &PortfolioSpec {
            mu: Vector::from_element(4, 0.3),
            gamma: 0.9,
        },
    );
    println!(
        "criterion 8 measurements: worst budget violation={worst_budget:.2e} \
         worst return violation={worst_return:.2e} degenerate err={}",
        degenerate.is_err()
    );
    report(
        "8 (portfolio constraints)",
        &[
            clause(format!("budget constraint violation {worst_budget:.2e} <= 1e-10"), worst_budget <= 1e-10),
            clause(format!("return constraint violation {worst_return:.2e} <= 1e-10"), worst_return <= 1e-10),
            clause("degenerate mean vector rejected".to_string(), degenerate.is_err()),
        ],
    );
}

/// Criterion 10: the reference real-data classification numbers (MCC 0.540
/// and the specificity/sensitivity curves) come from a proprietary breast
/// cancer expression dataset that is not shipped, so they are explicitly out
/// of reach here. Substitute synthetic discriminant checks: hand-computed
/// classification-metric oracles and the scale-invariance property of the
/// discriminant rule.
#[test]
fn criterion_10_lda_synthetic_substitutes() {
    println!(
        "criterion 10 note: real-data MCC 0.540 and specificity/sensitivity curves are NOT \
         reproducible (dataset not shipped); synthetic substitutes follow"
    );

    // Hand-computed oracle: TP=8, TN=80, FP=10, FN=2.
    let mut predicted = Vec::new();
    let mut truth = Vec::new();
    for (count, pair) in [
        (8, (LdaClass::One, LdaClass::One)),
        (80, (LdaClass::Two, LdaClass::Two)),
        (10, (LdaClass::One, LdaClass::Two)),
        (2, (LdaClass::Two, LdaClass::One)),
    ] {
        for _ in 0..count {
            predicted.push(pair.0);
            truth.push(pair.1);
        }
    }
    let m = classification_metrics(&predicted, &truth).unwrap();
    let mcc_oracle = (8.0 * 80.0 - 10.0 * 2.0)
        / ((8.0f64 + 10.0) * (8.0 + 2.0) * (80.0 + 10.0) * (80.0 + 2.0)).sqrt();
    let metrics_ok = (m.sensitivity - 0.8).abs() < 1e-15
        && (m.specificity - 80.0 / 90.0).abs() < 1e-15
        && (m.mcc - mcc_oracle).abs() < 1e-15;

    // Scale invariance of the label under positive scaling of the precision
    // estimate with balanced classes.
    let mut rng = seeded_rng(777);
    let mut invariant = true;
    for _ in 0..25 {
        let base = random_spd(6, &mut rng);
        let omega = PrecisionEstimate::new(base.clone(), EstimatorKind::Refit).unwrap();
        let scaled = PrecisionEstimate::new(base * 3.7, EstimatorKind::Refit).unwrap();
        let stats = ClassStats {
            mu1: gaussian_vector(6, &mut rng),
            mu2: gaussian_vector(6, &mut rng),
            n1: 9,
            n2: 9,
        };
        let x = gaussian_vector(6, &mut rng);
        invariant &= lda_score(&omega, &stats, 0.05, &x).unwrap().1
            == lda_score(&scaled, &stats, 0.05, &x).unwrap().1;
    }

    // Fully thresholded mean difference leaves only the prior log-odds.
    let omega = PrecisionEstimate::new(Mat::identity(3, 3), EstimatorKind::Refit).unwrap();
    let stats = ClassStats {
        mu1: Vector::from_column_slice(&[0.2, -0.1, 0.05]),
        mu2: Vector::from_column_slice(&[-0.1, 0.15, 0.0]),
        n1: 20,
        n2: 10,
    };
    let (score, _) = lda_score(&omega, &stats, 1.0, &gaussian_vector(3, &mut rng)).unwrap();
    let prior_only = (score - 2.0f64.ln()).abs() < 1e-12;

    report(
        "10 (synthetic discriminant substitutes)",
        &[
            clause("classification metrics match hand-computed oracle".to_string(), metrics_ok),
            clause("label invariant to positive scaling of the precision".to_string(), invariant),
            clause("fully thresholded mean difference leaves prior log-odds".to_string(), prior_only),
        ],
    );
}
