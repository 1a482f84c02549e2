use std::path::PathBuf;

use clap::Args;

use crate::commands::{center_columns, compute_estimate, validate_data, EstimatorOpts};
use crate::error::CliResult;
use crate::formats::{read_matrix_csv, write_triplet};
use crate::manifest::{manifest_path_for, RunManifest, StageTimer};

#[derive(Args, Debug)]
pub struct EstimateArgs {
    /// Input data CSV (rows are observations)
    #[arg(long)]
    input: PathBuf,
    /// Output triplet file for the estimate
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Worker threads (ISEE_THREADS overrides)
    #[arg(long)]
    threads: Option<usize>,
    #[command(flatten)]
    opts: EstimatorOpts,
}

pub fn run(args: EstimateArgs) -> CliResult<()> {
    crate::commands::with_pool(args.threads, || run_inner(args))
}

fn run_inner(args: EstimateArgs) -> CliResult<()> {
    let mut timer = StageTimer::new();
    timer.stage("read");
    let mut x = read_matrix_csv(&args.input)?;
    validate_data(&x)?;
    if !args.opts.no_center {
        center_columns(&mut x);
    }

    let outcome = compute_estimate(&x, &args.opts, args.seed, &mut timer)?;
    let (estimate, lambda) = (outcome.estimate, outcome.lambda);

    timer.stage("write");
    write_triplet(&args.out, estimate.values())?;

    let mut manifest = RunManifest::new(
        "estimate",
        args.seed,
        serde_json::json!({
            "options": args.opts,
            "lambda": lambda,
            "cv_tau": outcome.cv_tau,
            "cv_degenerate": outcome.cv_degenerate,
            "n": x.nrows(),
            "p": x.ncols(),
            "kind": estimate.kind().as_str(),
        }),
    );
    manifest.checksum_input(&args.input)?;
    manifest.record_output(&args.out);
    manifest.stage_seconds = timer.finish();
    manifest.write(&manifest_path_for(&args.out))?;

    println!(
        "{} estimate: p={}, support size {}, lambda {:.6} -> {}",
        estimate.kind().as_str(),
        estimate.p(),
        estimate.support().len(),
        lambda,
        args.out.display()
    );
    Ok(())
}
