use std::path::PathBuf;

use clap::Args;

use isee_core::{classification_metrics, lda_score, ClassStats, LdaClass, Mat, Vector};

use crate::commands::{compute_estimate, validate_data, EstimatorOpts};
use crate::error::{CliError, CliResult};
use crate::formats::{read_labels_csv, read_matrix_csv, write_labels_csv};
use crate::manifest::{manifest_path_for, RunManifest, StageTimer};

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    /// Training data CSV
    #[arg(long)]
    train: PathBuf,
    /// Training labels (one of 1 or 2 per line)
    #[arg(long)]
    train_labels: PathBuf,
    /// Test data CSV
    #[arg(long)]
    test: PathBuf,
    /// Optional test labels; enables the metrics report
    #[arg(long)]
    test_labels: Option<PathBuf>,
    /// Entrywise threshold applied to the class mean difference
    #[arg(long, default_value_t = 0.0)]
    tau_mu: f64,
    /// Output predictions CSV (one label per line)
    #[arg(long)]
    out: PathBuf,
    /// Optional metrics JSON output
    #[arg(long)]
    metrics_out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    threads: Option<usize>,
    #[command(flatten)]
    opts: EstimatorOpts,
}

pub fn run(args: ClassifyArgs) -> CliResult<()> {
    crate::commands::with_pool(args.threads, || run_inner(args))
}

fn class_mean(x: &Mat, rows: &[usize]) -> Vector {
    let mut mean = Vector::zeros(x.ncols());
    for &r in rows {
        mean += x.row(r).transpose();
    }
    mean / rows.len() as f64
}

fn run_inner(args: ClassifyArgs) -> CliResult<()> {
    let mut timer = StageTimer::new();
    timer.stage("read");
    let train = read_matrix_csv(&args.train)?;
    let labels = read_labels_csv(&args.train_labels)?;
    let test = read_matrix_csv(&args.test)?;
    if labels.len() != train.nrows() {
        return Err(CliError::validation(format!(
            "{} labels for {} training rows",
            labels.len(),
            train.nrows()
        )));
    }
    if test.ncols() != train.ncols() {
        return Err(CliError::validation("train and test column counts differ"));
    }
    validate_data(&train)?;

    let class1: Vec<usize> = (0..train.nrows())
        .filter(|&i| labels[i] == LdaClass::One)
        .collect();
    let class2: Vec<usize> = (0..train.nrows())
        .filter(|&i| labels[i] == LdaClass::Two)
        .collect();
    if class1.is_empty() || class2.is_empty() {
        return Err(CliError::validation("both classes must appear in the training labels"));
    }

    timer.stage("estimate");
    let mu1 = class_mean(&train, &class1);
    let mu2 = class_mean(&train, &class2);
    // Pool the within-class centered rows; the shared precision matrix is
    // estimated from these residuals, so no further centering is applied.
    let mut pooled = train.clone();
    for i in 0..train.nrows() {
        let mu = if labels[i] == LdaClass::One { &mu1 } else { &mu2 };
        for j in 0..train.ncols() {
            pooled[(i, j)] -= mu[j];
        }
    }
    let mut no_center_opts = args.opts.clone();
    no_center_opts.no_center = true;
    let omega = compute_estimate(&pooled, &no_center_opts, args.seed, &mut timer)?.estimate;

    timer.stage("predict");
    let stats = ClassStats {
        mu1,
        mu2,
        n1: class1.len(),
        n2: class2.len(),
    };
    let mut predictions = Vec::with_capacity(test.nrows());
    for i in 0..test.nrows() {
        let x = test.row(i).transpose();
        predictions.push(lda_score(&omega, &stats, args.tau_mu, &x)?.1);
    }
    write_labels_csv(&args.out, &predictions)?;

    let mut metrics_json = None;
    if let Some(path) = &args.test_labels {
        let truth = read_labels_csv(path)?;
        if truth.len() != predictions.len() {
            return Err(CliError::validation(format!(
                "{} test labels for {} predictions",
                truth.len(),
                predictions.len()
            )));
        }
        let m = classification_metrics(&predictions, &truth)?;
        let json = serde_json::json!({
            "specificity": m.specificity,
            "sensitivity": m.sensitivity,
            "mcc": m.mcc,
        });
        let text = serde_json::to_string_pretty(&json)?;
        println!("{text}");
        if let Some(out) = &args.metrics_out {
            std::fs::write(out, &text)
                .map_err(|e| CliError::io(format!("cannot write {}: {e}", out.display())))?;
        }
        metrics_json = Some(json);
    }

    let mut manifest = RunManifest::new(
        "classify",
        args.seed,
        serde_json::json!({
            "options": args.opts,
            "tau_mu": args.tau_mu,
            "n1": stats.n1,
            "n2": stats.n2,
            "metrics": metrics_json,
        }),
    );
    manifest.checksum_input(&args.train)?;
    manifest.checksum_input(&args.train_labels)?;
    manifest.checksum_input(&args.test)?;
    if let Some(path) = &args.test_labels {
        manifest.checksum_input(path)?;
    }
    manifest.record_output(&args.out);
    manifest.stage_seconds = timer.finish();
    manifest.write(&manifest_path_for(&args.out))?;

    println!("classified {} test rows -> {}", predictions.len(), args.out.display());
    Ok(())
}
