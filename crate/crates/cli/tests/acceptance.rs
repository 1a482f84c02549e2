//! Acceptance criterion 9: every command is bitwise-reproducible across
//! thread counts for a fixed seed. Each threaded command runs with one and
//! with four workers and the primary outputs are compared byte for byte.

use std::path::{Path, PathBuf};
use std::process::Command;

fn isee() -> Command {
    Command::new(env!("CARGO_BIN_EXE_isee"))
}

fn run_ok(cmd: &mut Command) {
    let out = cmd.output().expect("failed to launch isee");
    assert!(
        out.status.success(),
        "command failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn bytes(path: &Path) -> Vec<u8> {
    std::fs::read(path).unwrap_or_else(|e| panic!("cannot read {}: {e}", path.display()))
}

fn simulate(dir: &Path, seed: u64) -> PathBuf {
    let sim = dir.join(format!("sim-{seed}"));
    run_ok(isee()
        .arg("simulate")
        .args(["--model", "band", "--p", "60", "--n", "100"])
        .args(["--seed", &seed.to_string()])
        .arg("--out-dir")
        .arg(&sim));
    sim
}

#[test]
fn criterion_09_cli_determinism_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let sim = simulate(dir.path(), 5);
    let data = sim.join("data.csv");
    let mut clauses: Vec<(String, bool)> = Vec::new();

    // simulate: repeated invocation reproduces identical files.
    let sim2 = simulate(dir.path(), 105);
    let sim3 = {
        let d = dir.path().join("sim-repeat");
        run_ok(isee()
            .arg("simulate")
            .args(["--model", "band", "--p", "60", "--n", "100", "--seed", "105"])
            .arg("--out-dir")
            .arg(&d));
        d
    };
    clauses.push((
        "simulate reproducible".into(),
        bytes(&sim2.join("data.csv")) == bytes(&sim3.join("data.csv"))
            && bytes(&sim2.join("truth_omega.csv")) == bytes(&sim3.join("truth_omega.csv")),
    ));

    // estimate (ensemble, the most parallel path), across 1 vs 4 threads.
    let est1 = dir.path().join("est-t1.triplet");
    let est4 = dir.path().join("est-t4.triplet");
    for (threads, out) in [("1", &est1), ("4", &est4)] {
        run_ok(isee()
            .arg("estimate")
            .arg("--input")
            .arg(&data)
            .arg("--out")
            .arg(out)
            .args(["--seed", "5", "--n2", "3", "--threads", threads]));
    }
    clauses.push(("estimate ensemble identical 1 vs 4 threads".into(), bytes(&est1) == bytes(&est4)));

    // estimate with screening enabled.
    let sis1 = dir.path().join("sis-t1.triplet");
    let sis4 = dir.path().join("sis-t4.triplet");
    for (threads, out) in [("1", &sis1), ("4", &sis4)] {
        run_ok(isee()
            .arg("estimate")
            .arg("--input")
            .arg(&data)
            .arg("--out")
            .arg(out)
            .args(["--seed", "5", "--kind", "thresholded", "--sis", "--zeta", "0.4"])
            .args(["--threads", threads]));
    }
    clauses.push(("estimate with screening identical 1 vs 4 threads".into(), bytes(&sis1) == bytes(&sis4)));

    // refit on the estimated support.
    let refit1 = dir.path().join("refit-t1.triplet");
    let refit4 = dir.path().join("refit-t4.triplet");
    for (threads, out) in [("1", &refit1), ("4", &refit4)] {
        run_ok(isee()
            .arg("refit")
            .arg("--input")
            .arg(&data)
            .arg("--support")
            .arg(&est1)
            .arg("--out")
            .arg(out)
            .args(["--threads", threads]));
    }
    clauses.push(("refit identical 1 vs 4 threads".into(), bytes(&refit1) == bytes(&refit4)));

    // scores.
    let y = dir.path().join("y.csv");
    let mut y_text = String::new();
    for i in 0..100 {
        y_text.push_str(&format!("{}\n", (i as f64) * 0.01 - 0.5));
    }
    std::fs::write(&y, y_text).unwrap();
    let sc1 = dir.path().join("scores-t1.csv");
    let sc4 = dir.path().join("scores-t4.csv");
    for (threads, out) in [("1", &sc1), ("4", &sc4)] {
        run_ok(isee()
            .arg("scores")
            .arg("--input")
            .arg(&data)
            .arg("--response")
            .arg(&y)
            .arg("--out")
            .arg(out)
            .args(["--seed", "5", "--threads", threads]));
    }
    clauses.push(("scores identical 1 vs 4 threads".into(), bytes(&sc1) == bytes(&sc4)));

    // benchmark on a small grid.
    let spec = dir.path().join("bench.json");
    std::fs::write(
        &spec,
        r#"{"model":"band","p":[20],"n":60,"reps":2,"seed":3,"kind":"thresholded"}"#,
    )
    .unwrap();
    let bm1 = dir.path().join("bm-t1.csv");
    let bm4 = dir.path().join("bm-t4.csv");
    for (threads, out) in [("1", &bm1), ("4", &bm4)] {
        run_ok(isee()
            .arg("benchmark")
            .arg("--spec")
            .arg(&spec)
            .arg("--out")
            .arg(out)
            .args(["--threads", threads]));
    }
    // Strip the CPU-time columns, which legitimately differ.
    let strip = |path: &Path| -> Vec<String> {
        String::from_utf8(bytes(path))
            .unwrap()
            .lines()
            .map(|l| l.split(',').take(10).collect::<Vec<_>>().join(","))
            .collect()
    };
    clauses.push(("benchmark metrics identical 1 vs 4 threads".into(), strip(&bm1) == strip(&bm4)));

    // classify.
    let labels = dir.path().join("labels.csv");
    let mut label_text = String::new();
    for i in 0..100 {
        label_text.push_str(if i % 2 == 0 { "1\n" } else { "2\n" });
    }
    std::fs::write(&labels, label_text).unwrap();
    let cl1 = dir.path().join("pred-t1.csv");
    let cl4 = dir.path().join("pred-t4.csv");
    for (threads, out) in [("1", &cl1), ("4", &cl4)] {
        run_ok(isee()
            .arg("classify")
            .arg("--train")
            .arg(&data)
            .arg("--train-labels")
            .arg(&labels)
            .arg("--test")
            .arg(&data)
            .arg("--out")
            .arg(out)
            .args(["--seed", "5", "--kind", "thresholded", "--threads", threads]));
    }
    clauses.push(("classify identical 1 vs 4 threads".into(), bytes(&cl1) == bytes(&cl4)));

    let all = clauses.iter().all(|(_, ok)| *ok);
    println!("ACCEPTANCE 9 (cli determinism): {}", if all { "PASS" } else { "FAIL" });
    for (label, ok) in &clauses {
        println!("  [{}] {label}", if *ok { "pass" } else { "FAIL" });
    }
    assert!(all, "criterion 9 failed; see clause list above");
}
