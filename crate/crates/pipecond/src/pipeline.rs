//! Full-run orchestration: load → clean → split → fit → evaluate → report.
//!
//! A run is configured by one JSON document ([`RunConfig`]); every default
//! is filled in and echoed to `config_echo.json` so the output directory is
//! self-describing. Artifacts are rendered in memory and written in one
//! pass at the end, so a failed run leaves no partial files. Numbers are
//! serialized in shortest round-trip form and all containers have a fixed
//! order, which makes rerunning the same config byte-identical.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::dataset::{
    clean_table, default_schema, load_table, train_test_split, CleanConfig, ColumnSchema,
    SplitIndices, Table, TARGET_COLUMN,
};
use crate::error::{Error, Result};
use crate::evaluate::{
    compute_metrics, error_histogram, permutation_importance, ErrorHistogram, ImportanceReport,
    MetricsReport,
};
use crate::mlr::{AnovaTable, OlsFit};
use crate::model::{
    fit_model, load_model, predict_matrix, predict_table, FittedArtifact, MlrRecipe, ModelRecipe,
};
use crate::numeric::{derive_seed, RandomSource};
use crate::preprocess::assemble_design;
use crate::ann::TrainHistory;

/// Child-stream index for the train/test split seed.
pub const STAGE_SPLIT: u64 = 1;
/// Child-stream index for the permutation-importance seed.
pub const STAGE_IMPORTANCE: u64 = 2;

/// Shortest decimal form that reads well in tables: positional for
/// ordinary magnitudes, scientific past the point where positional would
/// pad with long zero runs. Both forms parse back to the exact same f64.
pub fn fmt_float(v: f64) -> String {
    let a = v.abs();
    if v.is_finite() && v != 0.0 && !(1e-4..1e16).contains(&a) {
        format!("{v:e}")
    } else {
        format!("{v}")
    }
}

/// FNV-1a 64-bit hash, used to fingerprint the echoed config.
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

/// Cleaning stage settings.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct CleaningSection {
    pub enabled: bool,
    pub whisker: f64,
    pub mahalanobis_quantile: f64,
    /// None screens every numeric column, target included.
    pub outlier_columns: Option<Vec<String>>,
}

impl Default for CleaningSection {
    fn default() -> Self {
        Self {
            enabled: true,
            whisker: 1.5,
            mahalanobis_quantile: 0.975,
            outlier_columns: None,
        }
    }
}

/// Train/test partition settings. A `seed` of None derives one from the
/// master seed.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SplitSection {
    pub train_fraction: f64,
    pub seed: Option<u64>,
}

impl Default for SplitSection {
    fn default() -> Self {
        Self {
            train_fraction: 0.7,
            seed: None,
        }
    }
}

/// Evaluation-stage settings (figure data and importance).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct EvaluationSection {
    pub histogram_bins: usize,
    pub importance_repeats: usize,
    /// None derives a seed from the master seed.
    pub importance_seed: Option<u64>,
}

impl Default for EvaluationSection {
    fn default() -> Self {
        Self {
            histogram_bins: 20,
            importance_repeats: 10,
            importance_seed: None,
        }
    }
}

/// One self-contained run description. Defaults fill every omitted field;
/// the model section is a tagged enum, so exactly one estimator family is
/// configured by construction.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub target: String,
    /// None uses the default pipe-inventory schema.
    pub schema: Option<Vec<ColumnSchema>>,
    pub cleaning: CleaningSection,
    pub split: SplitSection,
    pub model: ModelRecipe,
    pub evaluation: EvaluationSection,
    /// Master seed; stage seeds left unset are derived from it.
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input: None,
            out: None,
            target: TARGET_COLUMN.to_string(),
            schema: None,
            cleaning: CleaningSection::default(),
            split: SplitSection::default(),
            model: ModelRecipe::Mlr(MlrRecipe::default()),
            evaluation: EvaluationSection::default(),
            seed: 42,
        }
    }
}

impl RunConfig {
    /// Parses a config document, filling defaults for every omitted field.
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Reads and parses a config file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    /// Copy with every derived seed made explicit, so the echoed config
    /// reproduces the run without knowing the derivation rule.
    pub fn resolved(&self) -> Self {
        let mut c = self.clone();
        c.split.seed = Some(
            c.split
                .seed
                .unwrap_or_else(|| derive_seed(c.seed, STAGE_SPLIT)),
        );
        c.evaluation.importance_seed = Some(
            c.evaluation
                .importance_seed
                .unwrap_or_else(|| derive_seed(c.seed, STAGE_IMPORTANCE)),
        );
        c
    }

    /// The dataset-level cleaning settings of this run.
    pub fn clean_config(&self) -> CleanConfig {
        CleanConfig {
            outlier_columns: self.cleaning.outlier_columns.clone(),
            whisker: self.cleaning.whisker,
            mahalanobis_quantile: self.cleaning.mahalanobis_quantile,
        }
    }
}

/// "Regression Statistics" summary block of a linear fit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegressionStatistics {
    pub multiple_r: f64,
    pub r_square: f64,
    pub adjusted_r_square: f64,
    pub standard_error: f64,
    pub observations: usize,
}

impl RegressionStatistics {
    pub fn from_fit(fit: &OlsFit) -> Self {
        Self {
            multiple_r: fit.multiple_r,
            r_square: fit.r_square,
            adjusted_r_square: fit.adjusted_r_square,
            standard_error: fit.standard_error_of_estimate,
            observations: fit.n,
        }
    }
}

/// One row of the coefficient table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CoefficientRow {
    pub term: String,
    pub coefficient: f64,
    pub standard_error: f64,
    pub t_stat: f64,
    pub p_value: f64,
    pub p_value_log10: f64,
    pub lower: f64,
    pub upper: f64,
}

/// Builds the coefficient table from a fit and its design column names.
pub fn coefficient_rows(feature_names: &[String], fit: &OlsFit) -> Vec<CoefficientRow> {
    feature_names
        .iter()
        .enumerate()
        .map(|(j, name)| CoefficientRow {
            term: name.clone(),
            coefficient: fit.coefficients[j],
            standard_error: fit.standard_errors[j],
            t_stat: fit.t_stats[j],
            p_value: fit.p_values[j],
            p_value_log10: fit.p_values_log10[j],
            lower: fit.ci_low[j],
            upper: fit.ci_high[j],
        })
        .collect()
}

/// In-memory artifact set; nothing touches disk until `write_all`.
#[derive(Default)]
struct Staging {
    files: Vec<(String, Vec<u8>)>,
}

impl Staging {
    fn add(&mut self, name: &str, bytes: Vec<u8>) {
        self.files.push((name.to_string(), bytes));
    }

    fn add_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.add(name, text.into_bytes());
        Ok(())
    }

    /// Writes every staged file; on any failure the files already written
    /// by this call are removed before returning the error.
    fn write_all(self, dir: &Path) -> Result<Vec<String>> {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let mut written: Vec<String> = Vec::new();
        for (name, bytes) in &self.files {
            let path = dir.join(name);
            if let Err(e) = fs::write(&path, bytes) {
                remove_artifacts(dir, &written);
                return Err(Error::io(path, e));
            }
            written.push(name.clone());
        }
        Ok(written)
    }
}

fn remove_artifacts(dir: &Path, names: &[String]) {
    for name in names {
        let _ = fs::remove_file(dir.join(name));
    }
}

fn drop_log_csv(t: &Table) -> String {
    let mut s = String::from("row_id,reason\n");
    for e in t.drop_log() {
        let _ = writeln!(s, "{},{}", e.row_id, e.reason);
    }
    s
}

fn loss_curves_csv(history: &TrainHistory) -> String {
    let mut s = String::from("epoch,train_loss,val_loss\n");
    for (i, &train) in history.train_loss.iter().enumerate() {
        let val = history.val_loss[i];
        if val.is_nan() {
            let _ = writeln!(s, "{},{},", i + 1, fmt_float(train));
        } else {
            let _ = writeln!(s, "{},{},{}", i + 1, fmt_float(train), fmt_float(val));
        }
    }
    s
}

fn histogram_csv(h: &ErrorHistogram) -> String {
    let mut s = String::from("bin_low,bin_high,count\n");
    for (i, count) in h.counts.iter().enumerate() {
        let _ = writeln!(
            s,
            "{},{},{}",
            fmt_float(h.edges[i]),
            fmt_float(h.edges[i + 1]),
            count
        );
    }
    s
}

fn scatter_csv(t: &Table, y: &[f64], yhat: &[f64]) -> String {
    let mut s = String::from("row_id,actual,predicted\n");
    for i in 0..y.len() {
        let _ = writeln!(s, "{},{},{}", t.row_id(i), fmt_float(y[i]), fmt_float(yhat[i]));
    }
    s
}

fn importance_csv(report: &ImportanceReport) -> String {
    let mut s = String::from("rank,feature,score,stddev\n");
    for e in &report.entries {
        let _ = writeln!(
            s,
            "{},{},{},{}",
            e.rank,
            e.name,
            fmt_float(e.score),
            fmt_float(e.stddev)
        );
    }
    s
}

fn regression_statistics_csv(stats: &RegressionStatistics) -> String {
    let mut s = String::from("statistic,value\n");
    let _ = writeln!(s, "Multiple R,{}", fmt_float(stats.multiple_r));
    let _ = writeln!(s, "R Square,{}", fmt_float(stats.r_square));
    let _ = writeln!(s, "Adjusted R Square,{}", fmt_float(stats.adjusted_r_square));
    let _ = writeln!(s, "Standard Error,{}", fmt_float(stats.standard_error));
    let _ = writeln!(s, "Observations,{}", stats.observations);
    s
}

fn anova_csv(a: &AnovaTable) -> String {
    let mut s = String::from("source,df,ss,ms,f,significance_f\n");
    let _ = writeln!(
        s,
        "Regression,{},{},{},{},{}",
        a.df_regression,
        fmt_float(a.ss_regression),
        fmt_float(a.ms_regression),
        fmt_float(a.f_stat),
        fmt_float(a.significance_f)
    );
    let _ = writeln!(
        s,
        "Residual,{},{},{},,",
        a.df_residual,
        fmt_float(a.ss_residual),
        fmt_float(a.ms_residual)
    );
    let _ = writeln!(s, "Total,{},{},,,", a.df_total, fmt_float(a.ss_total));
    s
}

fn coefficients_csv(rows: &[CoefficientRow]) -> String {
    let mut s = String::from("term,coefficient,standard_error,t_stat,p_value,lower,upper\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.term,
            fmt_float(r.coefficient),
            fmt_float(r.standard_error),
            fmt_float(r.t_stat),
            fmt_float(r.p_value),
            fmt_float(r.lower),
            fmt_float(r.upper)
        );
    }
    s
}

/// What a completed run produced.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunSummary {
    pub out_dir: PathBuf,
    pub artifacts: Vec<String>,
    pub n_input: usize,
    pub n_cleaned: usize,
    pub n_train: usize,
    pub n_test: usize,
    pub config_hash: String,
}

/// Runs the whole pipeline per `config`. Requires `input` and `out` to be
/// set (the CLI fills them from flags). On success the output directory
/// holds the cleaned data, drop log, split, model, metrics, table
/// renderings, figure data, config echo, and the consolidated report.
pub fn run_pipeline(config: &RunConfig) -> Result<RunSummary> {
    let resolved = config.resolved();
    let input = resolved
        .input
        .as_ref()
        .ok_or_else(|| Error::InvalidConfig("input path is required".to_string()))?;
    let out_dir = resolved
        .out
        .clone()
        .ok_or_else(|| Error::InvalidConfig("output directory is required".to_string()))?;

    let schema = resolved.schema.clone().unwrap_or_else(default_schema);
    log::info!("loading {}", input.display());
    let table = load_table(input, schema)?;
    let n_input = table.n_rows();
    table.column_index(&resolved.target)?;

    let mut staging = Staging::default();

    // The echo omits the output directory (the file's location says it),
    // so runs into different directories stay byte-identical.
    let mut echo = resolved.clone();
    echo.out = None;
    let mut echo_text = serde_json::to_string_pretty(&echo)?;
    echo_text.push('\n');
    let config_hash = format!("{:016x}", fnv1a64(echo_text.as_bytes()));
    staging.add("config_echo.json", echo_text.into_bytes());

    log::info!("cleaning {} rows", n_input);
    let cleaned = if resolved.cleaning.enabled {
        clean_table(&table, &resolved.clean_config())?
    } else {
        table.clone()
    };
    let n_cleaned = cleaned.n_rows();
    staging.add("cleaned.csv", cleaned.to_csv_string()?.into_bytes());
    staging.add("drop_log.csv", drop_log_csv(&cleaned).into_bytes());

    let split_seed = resolved.split.seed.expect("resolved");
    let split = train_test_split(&cleaned, resolved.split.train_fraction, split_seed)?;
    staging.add_json("split.json", &split)?;
    let train_table = cleaned.select_rows(&split.train);
    let test_table = cleaned.select_rows(&split.test);

    log::info!(
        "fitting on {} rows, holding out {}",
        train_table.n_rows(),
        test_table.n_rows()
    );
    let model = fit_model(&resolved.model, &train_table, &resolved.target)?;
    staging.add_json("model.json", &model)?;

    let y_train = train_table.numeric_column(&resolved.target)?;
    let yhat_train = predict_table(&model, &train_table)?;
    staging.add_json("metrics_train.json", &compute_metrics(&y_train, &yhat_train)?)?;
    let y_test = test_table.numeric_column(&resolved.target)?;
    let yhat_test = predict_table(&model, &test_table)?;
    staging.add_json("metrics_test.json", &compute_metrics(&y_test, &yhat_test)?)?;

    match &model.artifact {
        FittedArtifact::Mlr { fit, .. } => {
            let stats = RegressionStatistics::from_fit(fit);
            staging.add_json("regression_statistics.json", &stats)?;
            staging.add(
                "regression_statistics.csv",
                regression_statistics_csv(&stats).into_bytes(),
            );
            staging.add_json("anova.json", &fit.anova)?;
            staging.add("anova.csv", anova_csv(&fit.anova).into_bytes());
            let rows = coefficient_rows(&model.feature_names, fit);
            staging.add_json("coefficients.json", &rows)?;
            staging.add("coefficients.csv", coefficients_csv(&rows).into_bytes());
        }
        FittedArtifact::Ann { history, .. } => {
            staging.add("loss_curves.csv", loss_curves_csv(history).into_bytes());
        }
    }

    let hist = error_histogram(&y_test, &yhat_test, resolved.evaluation.histogram_bins)?;
    staging.add("error_histogram.csv", histogram_csv(&hist).into_bytes());
    staging.add(
        "predictions_scatter.csv",
        scatter_csv(&test_table, &y_test, &yhat_test).into_bytes(),
    );

    let (test_design, _) = assemble_design(
        &test_table,
        &model.design,
        Some(&model.transforms),
        &resolved.target,
    )?;
    let mut rng = RandomSource::new(resolved.evaluation.importance_seed.expect("resolved"));
    let importance = permutation_importance(
        |x| predict_matrix(&model, x),
        &test_design.x,
        &test_design.y,
        &test_design.feature_names,
        resolved.evaluation.importance_repeats,
        &mut rng,
    )?;
    staging.add("feature_importance.csv", importance_csv(&importance).into_bytes());

    let mut artifacts = staging.write_all(&out_dir)?;
    if let Err(e) = emit_report(&out_dir) {
        remove_artifacts(&out_dir, &artifacts);
        return Err(e);
    }
    artifacts.push("report.txt".to_string());

    Ok(RunSummary {
        out_dir,
        artifacts,
        n_input,
        n_cleaned,
        n_train: split.train.len(),
        n_test: split.test.len(),
        config_hash,
    })
}

/// Artifacts every run must leave behind, regardless of model family.
const BASE_ARTIFACTS: [&str; 10] = [
    "config_echo.json",
    "cleaned.csv",
    "drop_log.csv",
    "split.json",
    "model.json",
    "metrics_train.json",
    "metrics_test.json",
    "error_histogram.csv",
    "predictions_scatter.csv",
    "feature_importance.csv",
];

fn read_json<T: for<'de> Deserialize<'de>>(dir: &Path, name: &str) -> Result<T> {
    let path = dir.join(name);
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    Ok(serde_json::from_str(&text)?)
}

/// Renders `report.txt` in `dir` from the artifacts a completed run left
/// there, returning its path. Missing artifacts fail with `IncompleteRun`
/// naming every absent file.
pub fn emit_report(dir: &Path) -> Result<PathBuf> {
    let mut missing: Vec<String> = BASE_ARTIFACTS
        .iter()
        .filter(|name| !dir.join(name).is_file())
        .map(|name| name.to_string())
        .collect();
    let model = if dir.join("model.json").is_file() {
        let model = load_model(&dir.join("model.json"))?;
        let family_files: &[&str] = match &model.artifact {
            FittedArtifact::Mlr { .. } => &[
                "regression_statistics.json",
                "regression_statistics.csv",
                "anova.json",
                "anova.csv",
                "coefficients.json",
                "coefficients.csv",
            ],
            FittedArtifact::Ann { .. } => &["loss_curves.csv"],
        };
        missing.extend(
            family_files
                .iter()
                .filter(|name| !dir.join(name).is_file())
                .map(|name| name.to_string()),
        );
        Some(model)
    } else {
        None
    };
    if !missing.is_empty() {
        return Err(Error::IncompleteRun(missing));
    }
    let model = model.expect("model.json verified present");

    let echo_path = dir.join("config_echo.json");
    let echo_text = fs::read_to_string(&echo_path).map_err(|e| Error::io(&echo_path, e))?;
    let config: RunConfig = serde_json::from_str(&echo_text)?;
    let config_hash = format!("{:016x}", fnv1a64(echo_text.as_bytes()));
    let split: SplitIndices = read_json(dir, "split.json")?;
    let m_train: MetricsReport = read_json(dir, "metrics_train.json")?;
    let m_test: MetricsReport = read_json(dir, "metrics_test.json")?;
    let dropped = {
        let path = dir.join("drop_log.csv");
        let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
        text.lines().count().saturating_sub(1)
    };

    let mut r = String::new();
    let _ = writeln!(r, "Pipe Condition Prediction Report");
    let _ = writeln!(r, "================================");
    let _ = writeln!(r);
    let family = match &model.artifact {
        FittedArtifact::Mlr { .. } => "multiple linear regression",
        FittedArtifact::Ann { .. } => "neural network (multilayer perceptron)",
    };
    let _ = writeln!(r, "Model: {family}");
    let _ = writeln!(r, "Target: {}", model.target);
    if let Some(input) = &config.input {
        let _ = writeln!(r, "Input: {}", input.display());
    }
    let _ = writeln!(
        r,
        "Rows: {} train / {} test after cleaning ({} dropped)",
        split.train.len(),
        split.test.len(),
        dropped
    );
    let _ = writeln!(r);

    match &model.artifact {
        FittedArtifact::Mlr { confidence, .. } => {
            let stats: RegressionStatistics = read_json(dir, "regression_statistics.json")?;
            let anova: AnovaTable = read_json(dir, "anova.json")?;
            let rows: Vec<CoefficientRow> = read_json(dir, "coefficients.json")?;
            render_mlr_tables(&mut r, &stats, &anova, &rows, *confidence);
        }
        FittedArtifact::Ann { history, .. } => {
            render_ann_block(&mut r, history);
        }
    }

    let _ = writeln!(r, "Model Performance");
    let _ = writeln!(r, "  {:<12} {:<24} {:<24}", "Metric", "Train", "Test");
    for (label, a, b) in [
        ("RMSE", m_train.rmse, m_test.rmse),
        ("MAE", m_train.mae, m_test.mae),
        ("R Square", m_train.r_square, m_test.r_square),
        ("RAE", m_train.rae, m_test.rae),
        ("RRSE", m_train.rrse, m_test.rrse),
        ("MAPE (%)", m_train.mape, m_test.mape),
    ] {
        let _ = writeln!(r, "  {:<12} {:<24} {:<24}", label, fmt_float(a), fmt_float(b));
    }
    let _ = writeln!(r);

    let _ = writeln!(r, "Provenance");
    let _ = writeln!(r, "  {:<22} {}", "algorithm_id", model.algorithm_id);
    let _ = writeln!(r, "  {:<22} {}", "master seed", config.seed);
    if let Some(seed) = config.split.seed {
        let _ = writeln!(r, "  {:<22} {}", "split seed", seed);
    }
    if let Some(seed) = model.seed {
        let _ = writeln!(r, "  {:<22} {}", "model seed", seed);
    }
    if let Some(seed) = config.evaluation.importance_seed {
        let _ = writeln!(r, "  {:<22} {}", "importance seed", seed);
    }
    let _ = writeln!(r, "  {:<22} {}", "config hash", config_hash);

    let report_path = dir.join("report.txt");
    fs::write(&report_path, r).map_err(|e| Error::io(&report_path, e))?;
    Ok(report_path)
}

fn render_mlr_tables(
    r: &mut String,
    stats: &RegressionStatistics,
    anova: &AnovaTable,
    rows: &[CoefficientRow],
    confidence: f64,
) {
    let _ = writeln!(r, "Regression Statistics");
    let _ = writeln!(r, "  {:<22} {}", "Multiple R", fmt_float(stats.multiple_r));
    let _ = writeln!(r, "  {:<22} {}", "R Square", fmt_float(stats.r_square));
    let _ = writeln!(
        r,
        "  {:<22} {}",
        "Adjusted R Square",
        fmt_float(stats.adjusted_r_square)
    );
    let _ = writeln!(r, "  {:<22} {}", "Standard Error", fmt_float(stats.standard_error));
    let _ = writeln!(r, "  {:<22} {}", "Observations", stats.observations);
    let _ = writeln!(r);

    let _ = writeln!(r, "ANOVA");
    let _ = writeln!(
        r,
        "  {:<12} {:<6} {:<24} {:<24} {:<24} {}",
        "Source", "df", "SS", "MS", "F", "Significance F"
    );
    let _ = writeln!(
        r,
        "  {:<12} {:<6} {:<24} {:<24} {:<24} {}",
        "Regression",
        anova.df_regression,
        fmt_float(anova.ss_regression),
        fmt_float(anova.ms_regression),
        fmt_float(anova.f_stat),
        fmt_float(anova.significance_f)
    );
    let _ = writeln!(
        r,
        "  {:<12} {:<6} {:<24} {:<24}",
        "Residual",
        anova.df_residual,
        fmt_float(anova.ss_residual),
        fmt_float(anova.ms_residual)
    );
    let _ = writeln!(
        r,
        "  {:<12} {:<6} {:<24}",
        "Total",
        anova.df_total,
        fmt_float(anova.ss_total)
    );
    let _ = writeln!(r);

    let level = confidence * 100.0;
    let lower_header = format!("Lower {level}%");
    let upper_header = format!("Upper {level}%");
    let _ = writeln!(r, "Coefficients");
    let term_width = rows
        .iter()
        .map(|row| row.term.len())
        .max()
        .unwrap_or(4)
        .max("Term".len());
    let _ = writeln!(
        r,
        "  {:<term_width$} {:<24} {:<24} {:<24} {:<24} {:<24} {}",
        "Term", "Coefficient", "Standard Error", "t Stat", "P-value", lower_header, upper_header
    );
    for row in rows {
        let _ = writeln!(
            r,
            "  {:<term_width$} {:<24} {:<24} {:<24} {:<24} {:<24} {}",
            row.term,
            fmt_float(row.coefficient),
            fmt_float(row.standard_error),
            fmt_float(row.t_stat),
            fmt_float(row.p_value),
            fmt_float(row.lower),
            fmt_float(row.upper)
        );
    }
    let _ = writeln!(r);
}

fn render_ann_block(r: &mut String, history: &TrainHistory) {
    let _ = writeln!(r, "Training");
    let _ = writeln!(r, "  {:<22} {}", "epochs run", history.stopped_epoch);
    let _ = writeln!(r, "  {:<22} {}", "best epoch", history.best_epoch);
    if let Some(&last) = history.train_loss.last() {
        let _ = writeln!(r, "  {:<22} {}", "final train loss", fmt_float(last));
    }
    if let Some(&last) = history.val_loss.last() {
        if !last.is_nan() {
            let _ = writeln!(r, "  {:<22} {}", "final val loss", fmt_float(last));
        }
    }
    let _ = writeln!(r);
}
