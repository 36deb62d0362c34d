//! Command-line surface for the pipe-condition pipeline.
//!
//! Subcommands cover the individual stages (generate, clean, fit-mlr,
//! train-ann, evaluate, cross-validate, importance, sensitivity, report)
//! plus `run` for the whole clean → split → fit → evaluate → report flow.
//! Failures print one machine-readable JSON line (`{"kind", "message"}`)
//! to stdout and exit 1; logs go to stderr, level set by PIPECOND_LOG.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use pipecond::ann::TrainHistory;
use pipecond::dataset::{clean_table, default_schema, k_fold_plan, load_table, Table};
use pipecond::evaluate::{
    compute_metrics, cross_validate, error_histogram, permutation_importance,
    sensitivity_analysis, MetricsReport,
};
use pipecond::model::{
    fit_model, load_model, predict_matrix, predict_table, AnnRecipe, FittedArtifact, FittedModel,
    ModelRecipe,
};
use pipecond::numeric::{RandomSource, ALGORITHM_ID};
use pipecond::pipeline::{
    coefficient_rows, emit_report, fmt_float, run_pipeline, RegressionStatistics, RunConfig,
};
use pipecond::preprocess::assemble_design;
use pipecond::synth::{generate, Distribution, GeneratorConfig};
use pipecond::{Error, Result};

#[derive(Parser)]
#[command(
    name = "pipecond",
    version,
    about = "Sewer pipe condition prediction: cleaning, linear regression with inference, and a neural network regressor"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generate a synthetic pipe-inventory CSV from the reference model.
    Generate(GenerateArgs),
    /// Drop incomplete rows and remove outliers from a CSV.
    Clean(CleanArgs),
    /// Fit the linear regression on a CSV and write its artifacts.
    FitMlr(FitMlrArgs),
    /// Train the neural network on a CSV and write its artifacts.
    TrainAnn(TrainAnnArgs),
    /// Score a saved model on a CSV and report the six metrics.
    Evaluate(EvaluateArgs),
    /// K-fold cross-validation of the configured model.
    CrossValidate(CrossValidateArgs),
    /// Permutation feature importance of a saved model.
    Importance(ImportanceArgs),
    /// One-feature response curve of a saved model.
    Sensitivity(SensitivityArgs),
    /// Render the consolidated report for a completed run directory.
    Report(ReportArgs),
    /// Full pipeline: clean, split, fit, evaluate, report.
    Run(RunArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// Output CSV path.
    #[arg(long)]
    out: PathBuf,
    /// Generator config JSON; omitted fields take the documented defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Number of rows (overrides the config).
    #[arg(long)]
    n: Option<usize>,
    /// Generator seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
    /// Noise standard deviation (overrides the config).
    #[arg(long)]
    noise_sigma: Option<f64>,
}

#[derive(Args)]
struct CleanArgs {
    /// Input CSV.
    #[arg(long)]
    input: PathBuf,
    /// Output directory for cleaned.csv and drop_log.csv.
    #[arg(long)]
    out: PathBuf,
    /// Run config JSON (schema and cleaning sections are used).
    #[arg(long)]
    config: Option<PathBuf>,
    /// IQR whisker multiplier (overrides the config).
    #[arg(long)]
    whisker: Option<f64>,
    /// Mahalanobis chi-square quantile (overrides the config).
    #[arg(long)]
    mahalanobis_quantile: Option<f64>,
}

#[derive(Args)]
struct FitMlrArgs {
    /// Input CSV.
    #[arg(long)]
    input: PathBuf,
    /// Output directory for the model and table artifacts.
    #[arg(long)]
    out: PathBuf,
    /// Run config JSON; its model section must be "mlr" when present.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct TrainAnnArgs {
    /// Input CSV.
    #[arg(long)]
    input: PathBuf,
    /// Output directory for the model and loss-curve artifacts.
    #[arg(long)]
    out: PathBuf,
    /// Run config JSON; its model section must be "ann" when present.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Training seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Saved model JSON.
    #[arg(long)]
    model: PathBuf,
    /// Input CSV to score (should already be clean).
    #[arg(long)]
    input: PathBuf,
    /// Optional directory for metrics.json and figure data.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Error-histogram bin count.
    #[arg(long, default_value_t = 20)]
    bins: usize,
    /// Run config JSON (schema section is used).
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct CrossValidateArgs {
    /// Input CSV.
    #[arg(long)]
    input: PathBuf,
    /// Run config JSON (schema, cleaning, and model sections are used).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Fold count.
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// Fold-plan seed.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Optional path for the full cross_validation.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ImportanceArgs {
    /// Saved model JSON.
    #[arg(long)]
    model: PathBuf,
    /// Input CSV to permute (should already be clean).
    #[arg(long)]
    input: PathBuf,
    /// Permutations per feature.
    #[arg(long, default_value_t = 10)]
    repeats: usize,
    /// Permutation seed.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Optional path for feature_importance.csv.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run config JSON (schema section is used).
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct SensitivityArgs {
    /// Saved model JSON.
    #[arg(long)]
    model: PathBuf,
    /// Input CSV providing the sweep range and held values.
    #[arg(long)]
    input: PathBuf,
    /// Numeric feature to sweep.
    #[arg(long)]
    feature: String,
    /// Number of grid points.
    #[arg(long, default_value_t = 25)]
    grid_size: usize,
    /// Optional path for the curve CSV.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Run config JSON (schema section is used).
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// Completed run directory; report.txt is (re)written there.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RunArgs {
    /// Run config JSON; omitted fields take the documented defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Input CSV (overrides the config).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("PIPECOND_LOG", "warn"))
        .format_timestamp(None)
        .init();
    let cli = Cli::parse();
    if let Err(e) = dispatch(cli.command) {
        let payload = serde_json::json!({ "kind": e.kind(), "message": e.to_string() });
        println!("{payload}");
        std::process::exit(1);
    }
}

fn dispatch(command: Cmd) -> Result<()> {
    match command {
        Cmd::Generate(args) => cmd_generate(args),
        Cmd::Clean(args) => cmd_clean(args),
        Cmd::FitMlr(args) => cmd_fit_mlr(args),
        Cmd::TrainAnn(args) => cmd_train_ann(args),
        Cmd::Evaluate(args) => cmd_evaluate(args),
        Cmd::CrossValidate(args) => cmd_cross_validate(args),
        Cmd::Importance(args) => cmd_importance(args),
        Cmd::Sensitivity(args) => cmd_sensitivity(args),
        Cmd::Report(args) => cmd_report(args),
        Cmd::Run(args) => cmd_run(args),
    }
}

fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn load_run_config(path: Option<&PathBuf>) -> Result<RunConfig> {
    match path {
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::default()),
    }
}

fn load_input(path: &Path, config: &RunConfig) -> Result<Table> {
    let schema = config.schema.clone().unwrap_or_else(default_schema);
    load_table(path, schema)
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

fn distribution_text(d: &Distribution) -> String {
    match d {
        Distribution::Uniform { lo, hi } => format!("uniform[{lo}, {hi}]"),
        Distribution::UniformInt { lo, hi } => format!("uniform_int{{{lo}..{hi}}}"),
    }
}

fn cmd_generate(args: GenerateArgs) -> Result<()> {
    let mut config: GeneratorConfig = match &args.config {
        Some(path) => serde_json::from_str(&read_to_string(path)?)?,
        None => GeneratorConfig::default(),
    };
    if let Some(n) = args.n {
        config.n = n;
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(sigma) = args.noise_sigma {
        config.noise_sigma = sigma;
    }
    let table = generate(&config)?;
    if let Some(parent) = args.out.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
        }
    }
    table.write_csv(&args.out)?;
    println!("wrote {} rows to {}", config.n, args.out.display());
    println!("  {:<14} {}", "seed", config.seed);
    println!("  {:<14} {}", "noise_sigma", config.noise_sigma);
    println!("  {:<14} {}", "coefficients", config.coefficients[0]);
    for (f, b) in config.features.iter().zip(config.coefficients.iter().skip(1)) {
        println!("    {:<12} {}", f.name, b);
    }
    println!("  ranges");
    for f in &config.features {
        println!("    {:<12} {}", f.name, distribution_text(&f.distribution));
    }
    println!("  {:<14} {}", "algorithm_id", ALGORITHM_ID);
    Ok(())
}

fn cmd_clean(args: CleanArgs) -> Result<()> {
    let mut config = load_run_config(args.config.as_ref())?;
    if let Some(w) = args.whisker {
        config.cleaning.whisker = w;
    }
    if let Some(q) = args.mahalanobis_quantile {
        config.cleaning.mahalanobis_quantile = q;
    }
    let table = load_input(&args.input, &config)?;
    let cleaned = clean_table(&table, &config.clean_config())?;
    fs::create_dir_all(&args.out).map_err(|e| Error::io(&args.out, e))?;
    cleaned.write_csv(&args.out.join("cleaned.csv"))?;
    let mut log = String::from("row_id,reason\n");
    for e in cleaned.drop_log() {
        log.push_str(&format!("{},{}\n", e.row_id, e.reason));
    }
    write_text(&args.out.join("drop_log.csv"), &log)?;
    println!(
        "kept {} of {} rows ({} dropped); artifacts in {}",
        cleaned.n_rows(),
        table.n_rows(),
        cleaned.drop_log().len(),
        args.out.display()
    );
    let mut missing = 0;
    let mut iqr = 0;
    let mut mahalanobis = 0;
    for e in cleaned.drop_log() {
        if e.reason.starts_with("missing:") {
            missing += 1;
        } else if e.reason == "outlier:iqr" {
            iqr += 1;
        } else if e.reason == "outlier:mahalanobis" {
            mahalanobis += 1;
        }
    }
    println!("  missing {missing}, iqr outliers {iqr}, mahalanobis outliers {mahalanobis}");
    Ok(())
}

fn prepare_training_table(args_input: &Path, config: &RunConfig) -> Result<(Table, Table)> {
    let table = load_input(args_input, config)?;
    let cleaned = if config.cleaning.enabled {
        clean_table(&table, &config.clean_config())?
    } else {
        table.clone()
    };
    Ok((table, cleaned))
}

fn write_fit_common(out: &Path, cleaned: &Table, model: &FittedModel) -> Result<()> {
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    cleaned.write_csv(&out.join("cleaned.csv"))?;
    let mut log = String::from("row_id,reason\n");
    for e in cleaned.drop_log() {
        log.push_str(&format!("{},{}\n", e.row_id, e.reason));
    }
    write_text(&out.join("drop_log.csv"), &log)?;
    write_json(&out.join("model.json"), model)
}

fn cmd_fit_mlr(args: FitMlrArgs) -> Result<()> {
    let config = load_run_config(args.config.as_ref())?;
    if !matches!(config.model, ModelRecipe::Mlr(_)) {
        return Err(Error::InvalidConfig(
            "config model section is \"ann\"; use train-ann for it".to_string(),
        ));
    }
    let (table, cleaned) = prepare_training_table(&args.input, &config)?;
    let model = fit_model(&config.model, &cleaned, &config.target)?;
    let FittedArtifact::Mlr { ref fit, .. } = model.artifact else {
        unreachable!("mlr recipe always yields an mlr artifact");
    };
    write_fit_common(&args.out, &cleaned, &model)?;
    let stats = RegressionStatistics::from_fit(fit);
    write_json(&args.out.join("regression_statistics.json"), &stats)?;
    write_json(&args.out.join("anova.json"), &fit.anova)?;
    let rows = coefficient_rows(&model.feature_names, fit);
    write_json(&args.out.join("coefficients.json"), &rows)?;
    println!(
        "fit mlr on {} of {} rows; artifacts in {}",
        cleaned.n_rows(),
        table.n_rows(),
        args.out.display()
    );
    println!("  {:<20} {}", "R Square", fmt_float(fit.r_square));
    println!("  {:<20} {}", "Adjusted R Square", fmt_float(fit.adjusted_r_square));
    println!(
        "  {:<20} {}",
        "Standard Error",
        fmt_float(fit.standard_error_of_estimate)
    );
    println!("  {:<20} {}", "F", fmt_float(fit.anova.f_stat));
    Ok(())
}

fn history_lines(history: &TrainHistory) -> Vec<String> {
    let mut lines = vec![
        format!("  {:<20} {}", "stopped epoch", history.stopped_epoch),
        format!("  {:<20} {}", "best epoch", history.best_epoch),
    ];
    if let Some(&last) = history.train_loss.last() {
        lines.push(format!("  {:<20} {}", "final train loss", fmt_float(last)));
    }
    if let Some(&last) = history.val_loss.last() {
        if !last.is_nan() {
            lines.push(format!("  {:<20} {}", "final val loss", fmt_float(last)));
        }
    }
    lines
}

fn cmd_train_ann(args: TrainAnnArgs) -> Result<()> {
    let mut config = load_run_config(args.config.as_ref())?;
    if args.config.is_none() {
        config.model = ModelRecipe::Ann(AnnRecipe::default());
    }
    let ModelRecipe::Ann(ref mut recipe) = config.model else {
        return Err(Error::InvalidConfig(
            "config model section is \"mlr\"; use fit-mlr for it".to_string(),
        ));
    };
    if let Some(seed) = args.seed {
        recipe.train.seed = seed;
    }
    let (table, cleaned) = prepare_training_table(&args.input, &config)?;
    let model = fit_model(&config.model, &cleaned, &config.target)?;
    let FittedArtifact::Ann { ref history, .. } = model.artifact else {
        unreachable!("ann recipe always yields an ann artifact");
    };
    write_fit_common(&args.out, &cleaned, &model)?;
    let mut curves = String::from("epoch,train_loss,val_loss\n");
    for (i, train) in history.train_loss.iter().enumerate() {
        let val = history.val_loss[i];
        if val.is_nan() {
            curves.push_str(&format!("{},{},\n", i + 1, train));
        } else {
            curves.push_str(&format!("{},{},{}\n", i + 1, train, val));
        }
    }
    write_text(&args.out.join("loss_curves.csv"), &curves)?;
    println!(
        "trained ann on {} of {} rows; artifacts in {}",
        cleaned.n_rows(),
        table.n_rows(),
        args.out.display()
    );
    for line in history_lines(history) {
        println!("{line}");
    }
    Ok(())
}

fn print_metrics(label: &str, m: &MetricsReport) {
    println!("{label}");
    println!("  {:<12} {}", "RMSE", fmt_float(m.rmse));
    println!("  {:<12} {}", "MAE", fmt_float(m.mae));
    println!("  {:<12} {}", "R Square", fmt_float(m.r_square));
    println!("  {:<12} {}", "RAE", fmt_float(m.rae));
    println!("  {:<12} {}", "RRSE", fmt_float(m.rrse));
    println!("  {:<12} {}", "MAPE (%)", fmt_float(m.mape));
    if m.mape_excluded > 0 {
        println!("  ({} rows with zero actuals excluded from MAPE)", m.mape_excluded);
    }
}

fn cmd_evaluate(args: EvaluateArgs) -> Result<()> {
    let config = load_run_config(args.config.as_ref())?;
    let model = load_model(&args.model)?;
    let table = load_input(&args.input, &config)?;
    let y = table.numeric_column(&model.target)?;
    let yhat = predict_table(&model, &table)?;
    let metrics = compute_metrics(&y, &yhat)?;
    print_metrics(
        &format!("metrics on {} rows from {}", y.len(), args.input.display()),
        &metrics,
    );
    if let Some(out) = &args.out {
        fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
        write_json(&out.join("metrics.json"), &metrics)?;
        let hist = error_histogram(&y, &yhat, args.bins)?;
        let mut text = String::from("bin_low,bin_high,count\n");
        for (i, count) in hist.counts.iter().enumerate() {
            text.push_str(&format!(
                "{},{},{}\n",
                fmt_float(hist.edges[i]),
                fmt_float(hist.edges[i + 1]),
                count
            ));
        }
        write_text(&out.join("error_histogram.csv"), &text)?;
        let mut scatter = String::from("row_id,actual,predicted\n");
        for i in 0..y.len() {
            scatter.push_str(&format!(
                "{},{},{}\n",
                table.row_id(i),
                fmt_float(y[i]),
                fmt_float(yhat[i])
            ));
        }
        write_text(&out.join("predictions_scatter.csv"), &scatter)?;
        println!("artifacts in {}", out.display());
    }
    Ok(())
}

fn cmd_cross_validate(args: CrossValidateArgs) -> Result<()> {
    let config = load_run_config(args.config.as_ref())?;
    let table = load_input(&args.input, &config)?;
    let cleaned = if config.cleaning.enabled {
        clean_table(&table, &config.clean_config())?
    } else {
        table.clone()
    };
    let plan = k_fold_plan(cleaned.n_rows(), args.k, args.seed)?;
    let report = cross_validate(&config.model, &cleaned, &config.target, &plan)?;
    println!(
        "{}-fold cross-validation on {} rows (seed {})",
        args.k,
        cleaned.n_rows(),
        args.seed
    );
    println!(
        "  {:<6} {:<6} {:<22} {:<22} {}",
        "fold", "n", "RMSE", "MAE", "R Square"
    );
    for fold in &report.folds {
        match (&fold.metrics, &fold.skipped) {
            (Some(m), _) => println!(
                "  {:<6} {:<6} {:<22} {:<22} {}",
                fold.fold,
                fold.n_eval,
                fmt_float(m.rmse),
                fmt_float(m.mae),
                fmt_float(m.r_square)
            ),
            (None, Some(reason)) => {
                println!("  {:<6} {:<6} skipped: {}", fold.fold, fold.n_eval, reason)
            }
            (None, None) => unreachable!("skipped folds always carry a reason"),
        }
    }
    print_metrics(
        &format!("pooled over {} held-out predictions", report.pooled.n),
        &report.pooled,
    );
    if let (Some(mean), Some(sd)) = (&report.fold_mean, &report.fold_stddev) {
        println!("fold mean (stddev)");
        println!(
            "  {:<12} {} ({})",
            "RMSE",
            fmt_float(mean.rmse),
            fmt_float(sd.rmse)
        );
        println!("  {:<12} {} ({})", "MAE", fmt_float(mean.mae), fmt_float(sd.mae));
        println!(
            "  {:<12} {} ({})",
            "R Square",
            fmt_float(mean.r_square),
            fmt_float(sd.r_square)
        );
    }
    if let Some(out) = &args.out {
        write_json(out, &report)?;
        println!("wrote {}", out.display());
    }
    Ok(())
}

fn cmd_importance(args: ImportanceArgs) -> Result<()> {
    if args.repeats == 0 {
        return Err(Error::InvalidConfig("repeats must be >= 1".to_string()));
    }
    let config = load_run_config(args.config.as_ref())?;
    let model = load_model(&args.model)?;
    let table = load_input(&args.input, &config)?;
    let (design, _) = assemble_design(&table, &model.design, Some(&model.transforms), &model.target)?;
    let mut rng = RandomSource::new(args.seed);
    let report = permutation_importance(
        |x| predict_matrix(&model, x),
        &design.x,
        &design.y,
        &design.feature_names,
        args.repeats,
        &mut rng,
    )?;
    println!(
        "permutation importance over {} rows ({} repeats, seed {})",
        design.x.rows(),
        args.repeats,
        args.seed
    );
    println!("  {:<6} {:<14} {:<24} {}", "rank", "feature", "score", "stddev");
    for e in &report.entries {
        println!(
            "  {:<6} {:<14} {:<24} {}",
            e.rank,
            e.name,
            fmt_float(e.score),
            fmt_float(e.stddev)
        );
    }
    println!("  baseline RMSE {}", fmt_float(report.baseline_rmse));
    if let Some(out) = &args.out {
        let mut text = String::from("rank,feature,score,stddev\n");
        for e in &report.entries {
            text.push_str(&format!(
                "{},{},{},{}\n",
                e.rank,
                e.name,
                fmt_float(e.score),
                fmt_float(e.stddev)
            ));
        }
        write_text(out, &text)?;
        println!("wrote {}", out.display());
    }
    Ok(())
}

fn cmd_sensitivity(args: SensitivityArgs) -> Result<()> {
    let config = load_run_config(args.config.as_ref())?;
    let model = load_model(&args.model)?;
    let table = load_input(&args.input, &config)?;
    let curve = sensitivity_analysis(
        |t| predict_table(&model, t),
        &table,
        &model.target,
        &args.feature,
        args.grid_size,
    )?;
    println!("sensitivity of {} over {}", model.target, curve.feature);
    println!("held at:");
    for (name, value) in &curve.held_at {
        println!("  {name:<14} {value}");
    }
    println!("  {:<24} {}", curve.feature.as_str(), "prediction");
    for (&v, &out) in curve.grid.iter().zip(&curve.outputs) {
        println!("  {:<24} {}", fmt_float(v), fmt_float(out));
    }
    if let Some(out) = &args.out {
        let mut text = format!("{},prediction\n", curve.feature);
        for (&v, &o) in curve.grid.iter().zip(&curve.outputs) {
            text.push_str(&format!("{},{}\n", fmt_float(v), fmt_float(o)));
        }
        write_text(out, &text)?;
        println!("wrote {}", out.display());
    }
    Ok(())
}

fn cmd_report(args: ReportArgs) -> Result<()> {
    let path = emit_report(&args.out)?;
    let text = read_to_string(&path)?;
    print!("{text}");
    println!("wrote {}", path.display());
    Ok(())
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let mut config = load_run_config(args.config.as_ref())?;
    if let Some(input) = args.input {
        config.input = Some(input);
    }
    if let Some(out) = args.out {
        config.out = Some(out);
    }
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let summary = run_pipeline(&config)?;
    println!("run complete: {}", summary.out_dir.display());
    println!(
        "  rows: {} input, {} cleaned, {} train, {} test",
        summary.n_input, summary.n_cleaned, summary.n_train, summary.n_test
    );
    println!("  config hash: {}", summary.config_hash);
    println!("  artifacts:");
    for name in &summary.artifacts {
        println!("    {name}");
    }
    Ok(())
}
