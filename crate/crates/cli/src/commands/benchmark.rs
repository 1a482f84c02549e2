use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};

use isee_core::{
    band_precision, block_precision, frobenius_error, recovery_metrics, rng, sample_gaussian,
};

use crate::commands::{compute_estimate, EstimatorOpts, KindArg};
use crate::error::{CliError, CliResult};
use crate::manifest::{manifest_path_for, RunManifest, StageTimer};

#[derive(Args, Debug)]
pub struct BenchmarkArgs {
    /// Benchmark specification JSON
    #[arg(long)]
    spec: PathBuf,
    /// Output aggregate CSV
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    threads: Option<usize>,
}

/// Grid description: every (model, p, n) cell is repeated `reps` times with
/// per-repetition derived seeds.
#[derive(Debug, Serialize, Deserialize)]
pub struct BenchSpec {
    pub model: String,
    pub p: Vec<usize>,
    pub n: usize,
    pub reps: usize,
    #[serde(default)]
    pub seed: u64,
    /// Estimator kind; defaults to the ensemble
    #[serde(default)]
    pub kind: Option<String>,
    #[serde(default)]
    pub n2: Option<usize>,
}

/// One completed repetition, appended to the checkpoint file as a JSON line.
#[derive(Debug, Serialize, Deserialize, Clone)]
pub struct RepResult {
    pub model: String,
    pub p: usize,
    pub n: usize,
    pub rep: usize,
    pub seed: u64,
    pub frobenius: f64,
    pub tpr: f64,
    pub fpr: f64,
    pub cpu_seconds: f64,
}

pub fn run(args: BenchmarkArgs) -> CliResult<()> {
    crate::commands::with_pool(args.threads, || run_inner(args))
}

fn kind_from_str(s: &str) -> CliResult<KindArg> {
    match s {
        "initial" => Ok(KindArg::Initial),
        "thresholded" => Ok(KindArg::Thresholded),
        "refined" => Ok(KindArg::Refined),
        "bias-corrected" => Ok(KindArg::BiasCorrected),
        "ensemble" => Ok(KindArg::Ensemble),
        other => Err(CliError::validation(format!("unknown estimator kind '{other}'"))),
    }
}

fn run_inner(args: BenchmarkArgs) -> CliResult<()> {
    let mut timer = StageTimer::new();
    timer.stage("read");
    let text = std::fs::read_to_string(&args.spec)
        .map_err(|e| CliError::io(format!("cannot read {}: {e}", args.spec.display())))?;
    let spec: BenchSpec = serde_json::from_str(&text)
        .map_err(|e| CliError::validation(format!("{}: {e}", args.spec.display())))?;
    if spec.reps == 0 || spec.p.is_empty() {
        return Err(CliError::validation("benchmark needs reps >= 1 and at least one p"));
    }
    let kind = kind_from_str(spec.kind.as_deref().unwrap_or("ensemble"))?;

    let checkpoint_path = checkpoint_path_for(&args.out);
    // Checkpoint entries from a different grid configuration are ignored so a
    // changed spec never resumes stale results.
    let mut done: Vec<RepResult> = load_checkpoint(&checkpoint_path)?
        .into_iter()
        .filter(|r| r.model == spec.model && r.n == spec.n && r.seed == spec.seed)
        .collect();
    let done_keys: BTreeSet<(usize, usize)> = done.iter().map(|r| (r.p, r.rep)).collect();

    let mut checkpoint = std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(&checkpoint_path)
        .map_err(|e| CliError::io(format!("cannot open {}: {e}", checkpoint_path.display())))?;

    timer.stage("run");
    let mut computed = 0usize;
    let mut resumed = 0usize;
    for &p in &spec.p {
        for rep in 0..spec.reps {
            if done_keys.contains(&(p, rep)) {
                resumed += 1;
                continue;
            }
            let result = run_one(&spec, kind, p, rep)?;
            let line = serde_json::to_string(&result)?;
            writeln!(checkpoint, "{line}")
                .map_err(|e| CliError::io(format!("checkpoint write: {e}")))?;
            checkpoint
                .flush()
                .map_err(|e| CliError::io(format!("checkpoint flush: {e}")))?;
            done.push(result);
            computed += 1;
        }
    }

    timer.stage("aggregate");
    let csv = aggregate_csv(&spec, &done);
    std::fs::write(&args.out, csv)
        .map_err(|e| CliError::io(format!("cannot write {}: {e}", args.out.display())))?;

    let mut manifest = RunManifest::new(
        "benchmark",
        spec.seed,
        serde_json::json!({
            "spec": spec,
            "computed": computed,
            "resumed": resumed,
        }),
    );
    manifest.checksum_input(&args.spec)?;
    manifest.record_output(&args.out);
    manifest.record_output(&checkpoint_path);
    manifest.stage_seconds = timer.finish();
    manifest.write(&manifest_path_for(&args.out))?;

    println!(
        "benchmark: {computed} repetitions computed, {resumed} resumed from checkpoint -> {}",
        args.out.display()
    );
    Ok(())
}

fn run_one(spec: &BenchSpec, kind: KindArg, p: usize, rep: usize) -> CliResult<RepResult> {
    let gen_seed = rng::derive_seed(spec.seed, rng::Purpose::Generic, (p as u64) << 20 | rep as u64);
    let truth = match spec.model.as_str() {
        "band" => band_precision(p, gen_seed)?,
        "block" => block_precision(p, gen_seed)?,
        other => return Err(CliError::validation(format!("unknown model '{other}'"))),
    };
    let x = sample_gaussian(&truth, spec.n, gen_seed ^ 1)?;

    let opts = EstimatorOpts {
        kind,
        lambda: None,
        theoretical_lambda: false,
        delta: 2.0,
        epsilon: 0.1,
        n2: spec.n2.unwrap_or(5),
        cv_grid: 20,
        cv_fraction: 0.9,
        cv_splits: 5,
        sis: false,
        zeta: 0.5,
        isis: 0,
        no_center: false,
    };
    let started = std::time::Instant::now();
    let mut rep_timer = StageTimer::new();
    let estimate = compute_estimate(&x, &opts, gen_seed, &mut rep_timer)?.estimate;
    let cpu_seconds = started.elapsed().as_secs_f64();

    let recovery = recovery_metrics(estimate.support(), &truth.support, p)?;
    let frobenius = frobenius_error(&estimate, &truth.omega)?;
    Ok(RepResult {
        model: spec.model.clone(),
        p,
        n: spec.n,
        rep,
        seed: spec.seed,
        frobenius,
        tpr: recovery.tpr,
        fpr: recovery.fpr,
        cpu_seconds,
    })
}

pub fn checkpoint_path_for(out: &Path) -> PathBuf {
    let mut name = out
        .file_name()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_else(|| "results".to_string());
    name.push_str(".checkpoint.jsonl");
    out.with_file_name(name)
}

fn load_checkpoint(path: &Path) -> CliResult<Vec<RepResult>> {
    if !path.exists() {
        return Ok(Vec::new());
    }
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::io(format!("cannot read {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for line in text.lines() {
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(line).map_err(|e| {
            CliError::validation(format!("{}: corrupt checkpoint line: {e}", path.display()))
        })?);
    }
    Ok(out)
}

/// Mean and standard error (sample standard deviation over sqrt(reps)).
pub fn mean_and_se(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt() / (n as f64).sqrt())
}

fn aggregate_csv(spec: &BenchSpec, results: &[RepResult]) -> String {
    let mut out = String::from(
        "model,p,n,reps,frob_mean,frob_se,tpr_mean,tpr_se,fpr_mean,fpr_se,cpu_mean,cpu_se\n",
    );
    for &p in &spec.p {
        let rows: Vec<&RepResult> = results.iter().filter(|r| r.p == p).collect();
        if rows.is_empty() {
            continue;
        }
        let col = |f: fn(&RepResult) -> f64| -> Vec<f64> { rows.iter().map(|r| f(r)).collect() };
        let (fm, fs) = mean_and_se(&col(|r| r.frobenius));
        let (tm, ts) = mean_and_se(&col(|r| r.tpr));
        let (pm, ps) = mean_and_se(&col(|r| r.fpr));
        let (cm, cs) = mean_and_se(&col(|r| r.cpu_seconds));
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            spec.model, p, spec.n, rows.len(), fm, fs, tm, ts, pm, ps, cm, cs
        );
    }
    out
}
