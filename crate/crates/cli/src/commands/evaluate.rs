use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};

use isee_core::{frobenius_distance, recovery_metrics};

use crate::error::CliResult;
use crate::formats::{read_matrix_any, read_triplet, support_pairs};
use crate::manifest::{manifest_path_for, RunManifest, StageTimer};

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    /// Estimate triplet file
    #[arg(long)]
    estimate: PathBuf,
    /// True precision matrix (dense CSV or triplet)
    #[arg(long)]
    truth_omega: PathBuf,
    /// Optional separate truth support triplet; defaults to the nonzeros of
    /// the truth matrix
    #[arg(long)]
    truth_support: Option<PathBuf>,
    /// Output metrics JSON
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct MetricsReport {
    pub tpr: f64,
    pub fpr: f64,
    pub frobenius: f64,
    /// Wall-clock seconds of the estimation run, pulled from the estimate's
    /// manifest when present.
    pub cpu_seconds: Option<f64>,
}

pub fn run(args: EvaluateArgs) -> CliResult<()> {
    let mut timer = StageTimer::new();
    timer.stage("read");
    let est = read_triplet(&args.estimate)?;
    let truth = read_matrix_any(&args.truth_omega)?;
    let truth_support = match &args.truth_support {
        Some(path) => support_pairs(&read_triplet(path)?),
        None => support_pairs(&truth),
    };

    timer.stage("metrics");
    let est_support = support_pairs(&est);
    let recovery = recovery_metrics(&est_support, &truth_support, est.nrows())?;
    let frobenius = frobenius_distance(&est, &truth)?;

    let cpu_seconds = RunManifest::read(&manifest_path_for(&args.estimate))
        .ok()
        .and_then(|m| m.stage_seconds.get("total").copied());

    let report = MetricsReport {
        tpr: recovery.tpr,
        fpr: recovery.fpr,
        frobenius,
        cpu_seconds,
    };
    let json = serde_json::to_string_pretty(&report)?;
    std::fs::write(&args.out, &json)
        .map_err(|e| crate::error::CliError::io(format!("cannot write {}: {e}", args.out.display())))?;
    println!("{json}");

    let mut manifest = RunManifest::new("evaluate", 0, serde_json::json!({}));
    manifest.checksum_input(&args.estimate)?;
    manifest.checksum_input(&args.truth_omega)?;
    if let Some(path) = &args.truth_support {
        manifest.checksum_input(path)?;
    }
    manifest.record_output(&args.out);
    manifest.stage_seconds = timer.finish();
    manifest.write(&manifest_path_for(&args.out))?;
    Ok(())
}
