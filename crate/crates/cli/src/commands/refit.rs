use std::path::PathBuf;

use clap::Args;

use isee_core::refit_columns;

use crate::commands::{center_columns, validate_data};
use crate::error::CliResult;
use crate::formats::{read_matrix_csv, read_triplet, support_pairs, write_triplet};
use crate::manifest::{manifest_path_for, RunManifest, StageTimer};

#[derive(Args, Debug)]
pub struct RefitArgs {
    /// Input data CSV
    #[arg(long)]
    input: PathBuf,
    /// Support triplet (typically a previous estimate)
    #[arg(long)]
    support: PathBuf,
    /// Output triplet file
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    no_center: bool,
}

pub fn run(args: RefitArgs) -> CliResult<()> {
    crate::commands::with_pool(args.threads, || run_inner(args))
}

fn run_inner(args: RefitArgs) -> CliResult<()> {
    let mut timer = StageTimer::new();
    timer.stage("read");
    let mut x = read_matrix_csv(&args.input)?;
    validate_data(&x)?;
    if !args.no_center {
        center_columns(&mut x);
    }
    let support_matrix = read_triplet(&args.support)?;
    if support_matrix.nrows() != x.ncols() {
        return Err(crate::error::CliError::validation(format!(
            "support is for p={} but data has p={}",
            support_matrix.nrows(),
            x.ncols()
        )));
    }
    let support = support_pairs(&support_matrix);

    timer.stage("refit");
    let estimate = refit_columns(&x, &support)?;

    timer.stage("write");
    write_triplet(&args.out, estimate.values())?;

    let mut manifest = RunManifest::new(
        "refit",
        0,
        serde_json::json!({
            "support_links": support.len(),
            "n": x.nrows(),
            "p": x.ncols(),
        }),
    );
    manifest.checksum_input(&args.input)?;
    manifest.checksum_input(&args.support)?;
    manifest.record_output(&args.out);
    manifest.stage_seconds = timer.finish();
    manifest.write(&manifest_path_for(&args.out))?;

    println!(
        "refit on {} links -> {}",
        support.len(),
        args.out.display()
    );
    Ok(())
}
