use std::path::PathBuf;

use clap::Args;

use isee_core::{markowitz_weights, EstimatorKind, PortfolioSpec, PrecisionEstimate};

use crate::error::CliResult;
use crate::formats::{read_triplet, read_vector_csv, write_vector_csv};
use crate::manifest::{manifest_path_for, RunManifest, StageTimer};

#[derive(Args, Debug)]
pub struct PortfolioArgs {
    /// Precision estimate triplet file
    #[arg(long)]
    estimate: PathBuf,
    /// Mean returns CSV (one value per asset)
    #[arg(long)]
    mu: PathBuf,
    /// Target portfolio return
    #[arg(long)]
    gamma: f64,
    /// Output weights CSV
    #[arg(long)]
    out: PathBuf,
}

pub fn run(args: PortfolioArgs) -> CliResult<()> {
    let mut timer = StageTimer::new();
    timer.stage("read");
    let omega_values = read_triplet(&args.estimate)?;
    // Loaded estimates carry no kind tag; the ensemble kind imposes no
    // diagonal constraints.
    let omega = PrecisionEstimate::new(omega_values, EstimatorKind::Ensemble)?;
    let mu = read_vector_csv(&args.mu)?;

    timer.stage("solve");
    let spec = PortfolioSpec {
        mu,
        gamma: args.gamma,
    };
    let weights = markowitz_weights(&omega, &spec)?;

    timer.stage("write");
    write_vector_csv(&args.out, &weights)?;

    let mut manifest = RunManifest::new(
        "portfolio",
        0,
        serde_json::json!({ "gamma": args.gamma, "p": omega.p() }),
    );
    manifest.checksum_input(&args.estimate)?;
    manifest.checksum_input(&args.mu)?;
    manifest.record_output(&args.out);
    manifest.stage_seconds = timer.finish();
    manifest.write(&manifest_path_for(&args.out))?;

    println!("portfolio weights for {} assets -> {}", omega.p(), args.out.display());
    Ok(())
}
