use std::path::PathBuf;

use clap::Args;

use isee_core::{
    assemble_xhat, fit_all_blocks, innovated_scores, make_partition, SolverOptions,
};

use crate::commands::{center_columns, validate_data, EstimatorOpts};
use crate::error::{CliError, CliResult};
use crate::formats::{read_matrix_csv, read_vector_csv, write_vector_csv};
use crate::manifest::{manifest_path_for, RunManifest, StageTimer};

#[derive(Args, Debug)]
pub struct ScoresArgs {
    /// Input data CSV
    #[arg(long)]
    input: PathBuf,
    /// Response vector CSV (one value per observation)
    #[arg(long)]
    response: PathBuf,
    /// Output scores CSV (one value per column)
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    threads: Option<usize>,
    #[command(flatten)]
    opts: EstimatorOpts,
}

pub fn run(args: ScoresArgs) -> CliResult<()> {
    crate::commands::with_pool(args.threads, || run_inner(args))
}

fn run_inner(args: ScoresArgs) -> CliResult<()> {
    let mut timer = StageTimer::new();
    timer.stage("read");
    let mut x = read_matrix_csv(&args.input)?;
    validate_data(&x)?;
    let y = read_vector_csv(&args.response)?;
    if y.len() != x.nrows() {
        return Err(CliError::validation(format!(
            "response has {} entries for {} observations",
            y.len(),
            x.nrows()
        )));
    }
    if !args.opts.no_center {
        center_columns(&mut x);
    }

    timer.stage("fit");
    let lambda = args.opts.resolve_lambda(x.nrows(), x.ncols())?;
    let partition = make_partition(x.ncols())?;
    let screen = args.opts.screen_config();
    let blocks = fit_all_blocks(
        &x,
        &partition,
        lambda,
        &SolverOptions::default(),
        screen.as_ref(),
    )?;
    timer.stage("assemble");
    let xhat = assemble_xhat(&x, &blocks)?;
    timer.stage("scores");
    let scores = innovated_scores(&xhat, &y)?;
    write_vector_csv(&args.out, &scores)?;

    let mut manifest = RunManifest::new(
        "scores",
        args.seed,
        serde_json::json!({
            "options": args.opts,
            "lambda": lambda,
            "n": x.nrows(),
            "p": x.ncols(),
        }),
    );
    manifest.checksum_input(&args.input)?;
    manifest.checksum_input(&args.response)?;
    manifest.record_output(&args.out);
    manifest.stage_seconds = timer.finish();
    manifest.write(&manifest_path_for(&args.out))?;

    println!("{} innovated scores -> {}", scores.len(), args.out.display());
    Ok(())
}
