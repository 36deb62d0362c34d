//! End-to-end tests of the command-line binary: every subcommand, the
//! documented examples, and the machine-readable error contract.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pipecond"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawning the binary")
}

/// Runs the binary, asserting success, and returns stdout.
fn run_ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {args:?} failed\nstdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("stdout is utf-8")
}

/// Runs the binary expecting exit code 1, and returns the parsed error
/// JSON from the first stdout line.
fn run_err(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(1), "command {args:?} should exit 1");
    let stdout = String::from_utf8(out.stdout).expect("stdout is utf-8");
    let line = stdout.lines().next().unwrap_or_default();
    serde_json::from_str(line).unwrap_or_else(|e| panic!("stdout {line:?} is not error JSON: {e}"))
}

fn path_str(p: &Path) -> &str {
    p.to_str().expect("temp paths are utf-8")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_slice(&fs::read(path).unwrap()).unwrap()
}

/// Sorted (name, bytes) pairs of every file in a directory.
fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut entries: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    entries.sort();
    entries
}

/// Generates the default synthetic dataset into `dir` and returns its path.
fn generate_input(dir: &Path) -> PathBuf {
    let input = dir.join("data.csv");
    run_ok(&["generate", "--out", path_str(&input)]);
    input
}

#[test]
fn generate_writes_header_plus_rows_and_identical_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let stdout = run_ok(&["generate", "--out", path_str(&a)]);
    assert!(stdout.contains("wrote 612 rows"), "stdout: {stdout}");
    assert!(stdout.contains("seed"), "stdout: {stdout}");
    assert!(stdout.contains("xoshiro256++"), "stdout: {stdout}");
    let content = fs::read_to_string(&a).unwrap();
    assert_eq!(content.lines().count(), 613, "header plus 612 rows");
    assert!(content.starts_with("AGE,PIPEDIA,LENGTH,DEPTH,SEGMENTSL,SOILTYPE,PACPRATING"));

    // An identical invocation produces identical bytes, log level aside.
    bin()
        .args(["generate", "--out", path_str(&b)])
        .env("PIPECOND_LOG", "debug")
        .output()
        .unwrap();
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());

    let c = dir.path().join("c.csv");
    run_ok(&["generate", "--out", path_str(&c), "--n", "25", "--seed", "3"]);
    assert_eq!(fs::read_to_string(&c).unwrap().lines().count(), 26);
}

#[test]
fn missing_input_is_an_io_error_without_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let err = run_err(&[
        "run",
        "--input",
        path_str(&dir.path().join("absent.csv")),
        "--out",
        path_str(&out),
    ]);
    assert_eq!(err["kind"], "io", "error JSON: {err}");
    assert!(err["message"].as_str().unwrap().contains("absent.csv"));
    assert!(!out.exists(), "failed run must not leave artifacts behind");
}

#[test]
fn mlr_run_writes_the_artifact_set_and_report_tables() {
    let dir = tempfile::tempdir().unwrap();
    let input = generate_input(dir.path());
    let out = dir.path().join("run");
    let stdout = run_ok(&["run", "--input", path_str(&input), "--out", path_str(&out)]);
    assert!(stdout.contains("report.txt"), "stdout: {stdout}");

    for name in [
        "config_echo.json",
        "cleaned.csv",
        "drop_log.csv",
        "split.json",
        "model.json",
        "metrics_train.json",
        "metrics_test.json",
        "regression_statistics.json",
        "regression_statistics.csv",
        "anova.json",
        "anova.csv",
        "coefficients.json",
        "coefficients.csv",
        "error_histogram.csv",
        "predictions_scatter.csv",
        "feature_importance.csv",
        "report.txt",
    ] {
        assert!(out.join(name).exists(), "missing artifact {name}");
    }

    // Seven coefficient rows, intercept first, satisfying the fit
    // invariants that tie the columns together.
    let rows = read_json(&out.join("coefficients.json"));
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 7);
    assert_eq!(rows[0]["term"], "Intercept");
    for row in rows {
        let coefficient = row["coefficient"].as_f64().unwrap();
        let se = row["standard_error"].as_f64().unwrap();
        let t = row["t_stat"].as_f64().unwrap();
        let p = row["p_value"].as_f64().unwrap();
        let lower = row["lower"].as_f64().unwrap();
        let upper = row["upper"].as_f64().unwrap();
        assert!(se > 0.0);
        assert!(
            (t - coefficient / se).abs() <= 1e-12 * t.abs().max(1.0),
            "t_stat inconsistent with coefficient / SE"
        );
        assert!((0.0..=1.0).contains(&p));
        assert!(lower < upper && lower <= coefficient && coefficient <= upper);
    }

    // The consolidated report renders the regression tables with the
    // documented columns and one row per term.
    let report = fs::read_to_string(out.join("report.txt")).unwrap();
    for heading in [
        "Regression Statistics",
        "ANOVA",
        "Coefficients",
        "Model Performance",
        "Provenance",
    ] {
        assert!(report.contains(heading), "report lacks {heading}");
    }
    for column in [
        "Coefficient",
        "Standard Error",
        "t Stat",
        "P-value",
        "Lower 95%",
        "Upper 95%",
    ] {
        assert!(report.contains(column), "report lacks column {column}");
    }
    for term in [
        "Intercept",
        "AGE",
        "PIPEDIA",
        "LENGTH",
        "DEPTH",
        "SEGMENTSL",
        "SOILTYPE",
    ] {
        assert!(
            report.lines().any(|l| l.trim_start().starts_with(term)),
            "report lacks a row for {term}"
        );
    }

    // The report subcommand prints the same document.
    let printed = run_ok(&["report", "--out", path_str(&out)]);
    assert!(printed.contains("Regression Statistics"));

    // A different master seed changes the split.
    let out2 = dir.path().join("run-seed7");
    run_ok(&[
        "run",
        "--input",
        path_str(&input),
        "--out",
        path_str(&out2),
        "--seed",
        "7",
    ]);
    assert_ne!(
        fs::read(out.join("split.json")).unwrap(),
        fs::read(out2.join("split.json")).unwrap(),
        "master seed must steer the split"
    );
}

/// With the noise turned off the generated target is an exact linear
/// function of the features, so the fitted R Square reaches 1 up to the
/// last couple of floating-point digits (the two sums of squares are
/// accumulated independently, which costs ~1e-15).
#[test]
fn noiseless_run_drives_r_square_to_one() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("noiseless.csv");
    run_ok(&[
        "generate",
        "--out",
        path_str(&input),
        "--noise-sigma",
        "0",
    ]);
    let out = dir.path().join("run");
    run_ok(&["run", "--input", path_str(&input), "--out", path_str(&out)]);
    let stats = read_json(&out.join("regression_statistics.json"));
    let r_square = stats["r_square"].as_f64().unwrap();
    assert!(
        (r_square - 1.0).abs() <= 1e-12,
        "noiseless R Square {r_square} should be 1 within 1e-12"
    );
    let table = fs::read_to_string(out.join("regression_statistics.csv")).unwrap();
    let printed: f64 = table
        .lines()
        .find_map(|l| l.strip_prefix("R Square,"))
        .expect("R Square row in the statistics table")
        .parse()
        .unwrap();
    assert_eq!(printed, r_square, "table value must round-trip the fit");
}

#[test]
fn ann_runs_are_reproducible_and_report_the_metrics_block() {
    let dir = tempfile::tempdir().unwrap();
    let input = generate_input(dir.path());
    let config = dir.path().join("ann.json");
    fs::write(
        &config,
        r#"{"model": {"model": "ann", "hidden_layers": [8], "train": {"epochs": 5}}}"#,
    )
    .unwrap();
    let out_a = dir.path().join("a");
    let out_b = dir.path().join("b");
    for out in [&out_a, &out_b] {
        run_ok(&[
            "run",
            "--config",
            path_str(&config),
            "--input",
            path_str(&input),
            "--out",
            path_str(out),
        ]);
    }
    assert_eq!(
        fs::read(out_a.join("metrics_test.json")).unwrap(),
        fs::read(out_b.join("metrics_test.json")).unwrap(),
        "seeded ANN runs must produce byte-identical metrics"
    );
    assert_eq!(dir_bytes(&out_a), dir_bytes(&out_b));

    let curves = fs::read_to_string(out_a.join("loss_curves.csv")).unwrap();
    assert_eq!(curves.lines().count(), 6, "header plus one line per epoch");
    assert!(curves.starts_with("epoch,train_loss,val_loss"));
    assert!(!out_a.join("anova.json").exists(), "ANN runs have no ANOVA");

    let report = fs::read_to_string(out_a.join("report.txt")).unwrap();
    for needle in ["RMSE", "MAE", "R Square", "neural network", "model seed"] {
        assert!(report.contains(needle), "ANN report lacks {needle}");
    }
}

#[test]
fn report_on_an_empty_directory_lists_missing_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let err = run_err(&["report", "--out", path_str(dir.path())]);
    assert_eq!(err["kind"], "incomplete_run", "error JSON: {err}");
    let message = err["message"].as_str().unwrap();
    assert!(message.contains("config_echo.json"), "message: {message}");
    assert!(message.contains("model.json"), "message: {message}");
}

#[test]
fn tool_subcommands_cover_the_analysis_workflow() {
    let dir = tempfile::tempdir().unwrap();
    let input = generate_input(dir.path());

    let cleaned_dir = dir.path().join("cleaned");
    let stdout = run_ok(&[
        "clean",
        "--input",
        path_str(&input),
        "--out",
        path_str(&cleaned_dir),
    ]);
    assert!(stdout.contains("kept"), "stdout: {stdout}");
    assert!(cleaned_dir.join("cleaned.csv").exists());
    assert!(cleaned_dir.join("drop_log.csv").exists());

    let mlr_dir = dir.path().join("mlr");
    let stdout = run_ok(&[
        "fit-mlr",
        "--input",
        path_str(&input),
        "--out",
        path_str(&mlr_dir),
    ]);
    assert!(stdout.contains("R Square"), "stdout: {stdout}");
    let model = mlr_dir.join("model.json");
    assert!(model.exists() && mlr_dir.join("regression_statistics.json").exists());

    let eval_dir = dir.path().join("eval");
    let stdout = run_ok(&[
        "evaluate",
        "--model",
        path_str(&model),
        "--input",
        path_str(&input),
        "--bins",
        "8",
        "--out",
        path_str(&eval_dir),
    ]);
    assert!(stdout.contains("RMSE"), "stdout: {stdout}");
    for name in ["metrics.json", "error_histogram.csv", "predictions_scatter.csv"] {
        assert!(eval_dir.join(name).exists(), "missing {name}");
    }
    assert_eq!(
        fs::read_to_string(eval_dir.join("error_histogram.csv"))
            .unwrap()
            .lines()
            .count(),
        9,
        "header plus one line per bin"
    );

    let stdout = run_ok(&[
        "cross-validate",
        "--input",
        path_str(&input),
        "--k",
        "5",
    ]);
    assert!(stdout.contains("5-fold"), "stdout: {stdout}");
    assert!(stdout.contains("pooled"), "stdout: {stdout}");

    let stdout = run_ok(&[
        "importance",
        "--model",
        path_str(&model),
        "--input",
        path_str(&input),
        "--repeats",
        "3",
        "--seed",
        "9",
    ]);
    assert!(stdout.contains("baseline RMSE"), "stdout: {stdout}");
    assert!(stdout.contains("AGE"), "stdout: {stdout}");

    let stdout = run_ok(&[
        "sensitivity",
        "--model",
        path_str(&model),
        "--input",
        path_str(&input),
        "--feature",
        "AGE",
        "--grid-size",
        "5",
    ]);
    assert!(stdout.contains("sensitivity of PACPRATING over AGE"));
    assert!(stdout.contains("held at"), "stdout: {stdout}");

    // train-ann without a config falls back to the default ANN recipe;
    // --seed steers its weight initialization and shuffling.
    let ann_dir = dir.path().join("ann");
    let stdout = run_ok(&[
        "train-ann",
        "--input",
        path_str(&input),
        "--out",
        path_str(&ann_dir),
        "--seed",
        "7",
    ]);
    assert!(stdout.contains("stopped epoch"), "stdout: {stdout}");
    assert!(ann_dir.join("loss_curves.csv").exists());

    // Family mismatch: pointing train-ann at an MLR model section fails.
    let mlr_config = dir.path().join("mlr.json");
    fs::write(&mlr_config, r#"{"model": {"model": "mlr"}}"#).unwrap();
    let err = run_err(&[
        "train-ann",
        "--input",
        path_str(&input),
        "--out",
        path_str(&dir.path().join("mismatch")),
        "--config",
        path_str(&mlr_config),
    ]);
    assert_eq!(err["kind"], "config", "error JSON: {err}");
}
