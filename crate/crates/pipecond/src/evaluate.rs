//! Evaluation suite: the six-metric report, k-fold cross-validation,
//! permutation feature importance, one-dimensional sensitivity curves, and
//! error-histogram extraction for plot data files.
//!
//! Conventions that change values and are therefore fixed here: the error
//! sign is e = predicted − actual; relative metrics on an evaluation set
//! use that set's own target mean; MAPE skips rows with a zero actual and
//! reports how many were skipped.

use serde::{Deserialize, Serialize};

use crate::dataset::{ColumnKind, FoldPlan, Table, Value};
use crate::error::{Error, Result};
use crate::model::{fit_model, predict_table, ModelRecipe};
use crate::numeric::{derive_seed, Matrix, RandomSource};

/// The six metrics over one evaluation set, plus the counts needed to
/// interpret them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub rmse: f64,
    pub mae: f64,
    pub r_square: f64,
    pub rae: f64,
    pub rrse: f64,
    /// Percent (0–100), averaged over rows with a nonzero actual.
    pub mape: f64,
    pub n: usize,
    /// Rows skipped by MAPE because the actual value was zero.
    pub mape_excluded: usize,
}

/// Root mean squared error alone, for callers that need a bare score.
pub fn rmse_of(y: &[f64], yhat: &[f64]) -> Result<f64> {
    if y.len() != yhat.len() || y.is_empty() {
        return Err(Error::LengthMismatch(format!(
            "actuals {} vs predictions {}",
            y.len(),
            yhat.len()
        )));
    }
    let sse: f64 = y
        .iter()
        .zip(yhat)
        .map(|(a, p)| {
            let e = p - a;
            e * e
        })
        .sum();
    Ok((sse / y.len() as f64).sqrt())
}

/// Computes all six metrics. The mean-prediction baseline uses this set's
/// own mean, so relative metrics are self-contained.
pub fn compute_metrics(y: &[f64], yhat: &[f64]) -> Result<MetricsReport> {
    if y.len() != yhat.len() || y.is_empty() {
        return Err(Error::LengthMismatch(format!(
            "actuals {} vs predictions {}",
            y.len(),
            yhat.len()
        )));
    }
    let n = y.len();
    let nf = n as f64;
    let mean = y.iter().sum::<f64>() / nf;
    let mut sse = 0.0;
    let mut sae = 0.0;
    let mut sst = 0.0;
    let mut sat = 0.0;
    let mut mape_sum = 0.0;
    let mut excluded = 0usize;
    for (&actual, &pred) in y.iter().zip(yhat) {
        let e = pred - actual;
        sse += e * e;
        sae += e.abs();
        let d = actual - mean;
        sst += d * d;
        sat += d.abs();
        if actual == 0.0 {
            excluded += 1;
        } else {
            mape_sum += (e / actual).abs();
        }
    }
    if sst == 0.0 {
        return Err(Error::ZeroVariance);
    }
    let q = sse / sst;
    Ok(MetricsReport {
        rmse: (sse / nf).sqrt(),
        mae: sae / nf,
        r_square: 1.0 - q,
        rae: sae / sat,
        rrse: q.sqrt(),
        mape: mape_sum / (n - excluded) as f64 * 100.0,
        n,
        mape_excluded: excluded,
    })
}

/// Per-metric mean or spread across folds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsSummary {
    pub rmse: f64,
    pub mae: f64,
    pub r_square: f64,
    pub rae: f64,
    pub rrse: f64,
    pub mape: f64,
}

fn summarize<F: Fn(&MetricsReport) -> f64>(reports: &[&MetricsReport], get: F) -> (f64, f64) {
    let k = reports.len() as f64;
    let mean = reports.iter().map(|r| get(r)).sum::<f64>() / k;
    let var = reports
        .iter()
        .map(|r| {
            let d = get(r) - mean;
            d * d
        })
        .sum::<f64>()
        / (k - 1.0);
    (mean, var.sqrt())
}

fn fold_summaries(reports: &[&MetricsReport]) -> (MetricsSummary, MetricsSummary) {
    let (rmse_m, rmse_s) = summarize(reports, |r| r.rmse);
    let (mae_m, mae_s) = summarize(reports, |r| r.mae);
    let (r2_m, r2_s) = summarize(reports, |r| r.r_square);
    let (rae_m, rae_s) = summarize(reports, |r| r.rae);
    let (rrse_m, rrse_s) = summarize(reports, |r| r.rrse);
    let (mape_m, mape_s) = summarize(reports, |r| r.mape);
    (
        MetricsSummary {
            rmse: rmse_m,
            mae: mae_m,
            r_square: r2_m,
            rae: rae_m,
            rrse: rrse_m,
            mape: mape_m,
        },
        MetricsSummary {
            rmse: rmse_s,
            mae: mae_s,
            r_square: r2_s,
            rae: rae_s,
            rrse: rrse_s,
            mape: mape_s,
        },
    )
}

/// One row's actual/predicted pair in a cross-validation fold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PredictionRecord {
    pub row_id: usize,
    pub actual: f64,
    pub predicted: f64,
}

/// One fold's outcome. `metrics` is None when the fold was scored but its
/// own target was constant (single-row folds, for example), in which case
/// `skipped` explains why; predictions are always recorded.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FoldReport {
    pub fold: usize,
    pub n_eval: usize,
    pub metrics: Option<MetricsReport>,
    pub skipped: Option<String>,
    pub predictions: Vec<PredictionRecord>,
}

/// Cross-validation outcome: per-fold reports, metrics pooled over every
/// held-out prediction, and mean/stddev across folds that produced a
/// per-fold report (stddev needs at least two).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CrossValidation {
    pub folds: Vec<FoldReport>,
    pub pooled: MetricsReport,
    pub evaluated_folds: usize,
    pub fold_mean: Option<MetricsSummary>,
    pub fold_stddev: Option<MetricsSummary>,
}

/// Runs k-fold cross-validation. Fold f's model is fitted (transforms
/// included) on every row outside fold f, with its training randomness
/// seeded by `derive_seed(plan.seed, f)`, then scored on fold f.
pub fn cross_validate(
    recipe: &ModelRecipe,
    table: &Table,
    target: &str,
    plan: &FoldPlan,
) -> Result<CrossValidation> {
    let n = table.n_rows();
    let mut seen = vec![false; n];
    for fold in &plan.folds {
        for &i in fold {
            if i >= n || seen[i] {
                return Err(Error::InvalidConfig(format!(
                    "fold plan does not partition the table (row {i})"
                )));
            }
            seen[i] = true;
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(Error::InvalidConfig(
            "fold plan does not cover every table row".to_string(),
        ));
    }

    let y_all = table.numeric_column(target)?;
    let table_constant = y_all.windows(2).all(|w| w[0] == w[1]);

    let mut folds = Vec::with_capacity(plan.folds.len());
    let mut pooled_y = Vec::with_capacity(n);
    let mut pooled_yhat = Vec::with_capacity(n);
    for (f, fold_rows) in plan.folds.iter().enumerate() {
        let in_fold: Vec<bool> = {
            let mut mask = vec![false; n];
            for &i in fold_rows {
                mask[i] = true;
            }
            mask
        };
        let train_rows: Vec<usize> = (0..n).filter(|&i| !in_fold[i]).collect();
        let train_table = table.select_rows(&train_rows);
        let eval_table = table.select_rows(fold_rows);
        let wrap = |e: Error| Error::Fold {
            fold: f,
            source: Box::new(e),
        };
        let fold_recipe = recipe.with_seed(derive_seed(plan.seed, f as u64));
        let model = fit_model(&fold_recipe, &train_table, target).map_err(wrap)?;
        let yhat = predict_table(&model, &eval_table).map_err(wrap)?;
        let y_eval = eval_table.numeric_column(target).map_err(wrap)?;
        let predictions: Vec<PredictionRecord> = (0..eval_table.n_rows())
            .map(|r| PredictionRecord {
                row_id: eval_table.row_id(r),
                actual: y_eval[r],
                predicted: yhat[r],
            })
            .collect();
        pooled_y.extend_from_slice(&y_eval);
        pooled_yhat.extend_from_slice(&yhat);
        let (metrics, skipped) = match compute_metrics(&y_eval, &yhat) {
            Ok(m) => (Some(m), None),
            Err(Error::ZeroVariance) if !table_constant => (
                None,
                Some(
                    "fold target is constant; relative metrics are undefined on it".to_string(),
                ),
            ),
            Err(e) => return Err(wrap(e)),
        };
        folds.push(FoldReport {
            fold: f,
            n_eval: fold_rows.len(),
            metrics,
            skipped,
            predictions,
        });
    }
    let pooled = compute_metrics(&pooled_y, &pooled_yhat)
        .map_err(|e| Error::Fold {
            fold: 0,
            source: Box::new(e),
        })?;
    let evaluated: Vec<&MetricsReport> = folds.iter().filter_map(|f| f.metrics.as_ref()).collect();
    let evaluated_folds = evaluated.len();
    let (fold_mean, fold_stddev) = match evaluated_folds {
        0 => (None, None),
        1 => {
            let (mean, _) = fold_summaries(&evaluated);
            (Some(mean), None)
        }
        _ => {
            let (mean, sd) = fold_summaries(&evaluated);
            (Some(mean), Some(sd))
        }
    };
    drop(evaluated);
    Ok(CrossValidation {
        folds,
        pooled,
        evaluated_folds,
        fold_mean,
        fold_stddev,
    })
}

/// One feature's permutation-importance outcome.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceEntry {
    pub name: String,
    /// Mean RMSE degradation over repeats (permuted minus baseline).
    pub score: f64,
    /// Sample standard deviation over repeats (0 when repeats = 1).
    pub stddev: f64,
    /// 1 = largest score; ties keep first-seen column order.
    pub rank: usize,
}

/// Permutation importance over an evaluation design matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ImportanceReport {
    pub entries: Vec<ImportanceEntry>,
    pub repeats: usize,
    pub baseline_rmse: f64,
}

/// Groups design-matrix columns by feature: one-hot columns named
/// `NAME=label` permute together under NAME, and the intercept column is
/// not a feature.
fn feature_groups(feature_names: &[String]) -> Vec<(String, Vec<usize>)> {
    let mut groups: Vec<(String, Vec<usize>)> = Vec::new();
    for (idx, name) in feature_names.iter().enumerate() {
        if name == "Intercept" {
            continue;
        }
        let base = name.split('=').next().unwrap_or(name).to_string();
        match groups.iter_mut().find(|(g, _)| *g == base) {
            Some((_, cols)) => cols.push(idx),
            None => groups.push((base, vec![idx])),
        }
    }
    groups
}

/// Measures RMSE degradation when each feature's column block is permuted
/// on the evaluation matrix. One fresh permutation is drawn per (feature,
/// repeat), features in first-seen order, repeats innermost; the same
/// permutation is applied to every column of a one-hot block so permuted
/// rows stay valid indicator rows.
pub fn permutation_importance<F>(
    predict: F,
    x: &Matrix,
    y: &[f64],
    feature_names: &[String],
    repeats: usize,
    rng: &mut RandomSource,
) -> Result<ImportanceReport>
where
    F: Fn(&Matrix) -> Result<Vec<f64>>,
{
    if repeats == 0 {
        return Err(Error::InvalidConfig("repeats must be >= 1".to_string()));
    }
    if x.rows() != y.len() {
        return Err(Error::LengthMismatch(format!(
            "matrix rows {} vs actuals {}",
            x.rows(),
            y.len()
        )));
    }
    if feature_names.len() != x.cols() {
        return Err(Error::LengthMismatch(format!(
            "feature names {} vs matrix columns {}",
            feature_names.len(),
            x.cols()
        )));
    }
    let baseline_rmse = rmse_of(y, &predict(x)?)?;
    let n = x.rows();
    let groups = feature_groups(feature_names);
    let mut entries = Vec::with_capacity(groups.len());
    for (name, cols) in &groups {
        let mut deltas = Vec::with_capacity(repeats);
        for _ in 0..repeats {
            let perm = rng.permutation(n);
            let mut permuted = x.clone();
            for &c in cols {
                for r in 0..n {
                    permuted.set(r, c, x.get(perm[r], c));
                }
            }
            let score = rmse_of(y, &predict(&permuted)?)?;
            deltas.push(score - baseline_rmse);
        }
        let mean = deltas.iter().sum::<f64>() / repeats as f64;
        let stddev = if repeats > 1 {
            (deltas.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>()
                / (repeats - 1) as f64)
                .sqrt()
        } else {
            0.0
        };
        entries.push(ImportanceEntry {
            name: name.clone(),
            score: mean,
            stddev,
            rank: 0,
        });
    }
    // Stable sort: ties keep first-seen order.
    let mut order: Vec<usize> = (0..entries.len()).collect();
    order.sort_by(|&a, &b| {
        entries[b]
            .score
            .partial_cmp(&entries[a].score)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut ranked: Vec<ImportanceEntry> = Vec::with_capacity(entries.len());
    for (pos, &idx) in order.iter().enumerate() {
        let mut e = entries[idx].clone();
        e.rank = pos + 1;
        ranked.push(e);
    }
    Ok(ImportanceReport {
        entries: ranked,
        repeats,
        baseline_rmse,
    })
}

/// A one-dimensional model response curve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SensitivityCurve {
    pub feature: String,
    pub grid: Vec<f64>,
    pub outputs: Vec<f64>,
    /// (column, value) pairs describing where every other feature was held.
    pub held_at: Vec<(String, String)>,
}

fn modal_label(table: &Table, col: usize) -> Result<String> {
    let mut counts: Vec<(String, usize)> = Vec::new();
    for r in 0..table.n_rows() {
        let label = match table.value(r, col) {
            Value::Label(l) => l.clone(),
            Value::Number(v) => format!("{v}"),
            Value::Missing => {
                return Err(Error::Parse {
                    row: table.row_id(r),
                    column: table.schema()[col].name.clone(),
                    message: "missing value; clean the table first".to_string(),
                })
            }
        };
        match counts.iter_mut().find(|(l, _)| *l == label) {
            Some((_, c)) => *c += 1,
            None => counts.push((label, 1)),
        }
    }
    // Highest count wins; ties keep first appearance.
    Ok(counts
        .iter()
        .max_by(|a, b| a.1.cmp(&b.1).then(std::cmp::Ordering::Greater))
        .map(|(l, _)| l.clone())
        .unwrap_or_default())
}

/// Sweeps one numeric feature over its observed [min, max] with all other
/// features held fixed (numerics at their mean, categoricals at their
/// modal level) and returns the model's response. The `target` column is
/// filled with zeros in the probe table; models ignore it when predicting.
pub fn sensitivity_analysis<F>(
    predict: F,
    table: &Table,
    target: &str,
    feature: &str,
    grid_size: usize,
) -> Result<SensitivityCurve>
where
    F: Fn(&Table) -> Result<Vec<f64>>,
{
    if grid_size < 2 {
        return Err(Error::InvalidConfig("grid_size must be >= 2".to_string()));
    }
    let feature_col = table
        .column_index(feature)
        .map_err(|_| Error::UnknownFeature(feature.to_string()))?;
    let target_col = table.column_index(target)?;
    if feature_col == target_col {
        return Err(Error::UnknownFeature(format!(
            "{feature} is the target, not a feature"
        )));
    }
    if table.schema()[feature_col].kind != ColumnKind::Numeric {
        return Err(Error::InvalidConfig(format!(
            "feature {feature:?} is categorical; sensitivity sweeps numeric features"
        )));
    }
    let values = table.numeric_column(feature)?;
    let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !(hi > lo) {
        return Err(Error::DegenerateInput(format!(
            "feature {feature:?} is constant at {lo}; no range to sweep"
        )));
    }
    let mut grid: Vec<f64> = (0..grid_size)
        .map(|i| lo + i as f64 * (hi - lo) / (grid_size - 1) as f64)
        .collect();
    grid[grid_size - 1] = hi;

    let mut held_at = Vec::new();
    let mut template: Vec<Value> = Vec::with_capacity(table.n_cols());
    for (c, schema) in table.schema().iter().enumerate() {
        if c == target_col {
            template.push(Value::Number(0.0));
        } else if c == feature_col {
            template.push(Value::Missing); // placeholder, replaced per row
        } else if schema.kind == ColumnKind::Numeric {
            let col = table.numeric_column(&schema.name)?;
            let mean = col.iter().sum::<f64>() / col.len() as f64;
            held_at.push((schema.name.clone(), crate::pipeline::fmt_float(mean)));
            template.push(Value::Number(mean));
        } else {
            let label = modal_label(table, c)?;
            held_at.push((schema.name.clone(), label.clone()));
            template.push(Value::Label(label));
        }
    }
    let rows: Vec<Vec<Value>> = grid
        .iter()
        .map(|&v| {
            let mut row = template.clone();
            row[feature_col] = Value::Number(v);
            row
        })
        .collect();
    let probe = Table::from_rows(table.schema().to_vec(), rows)?;
    let outputs = predict(&probe)?;
    if let Some(i) = outputs.iter().position(|v| !v.is_finite()) {
        return Err(Error::Domain(format!(
            "non-finite prediction at grid point {i} ({} = {})",
            feature, grid[i]
        )));
    }
    Ok(SensitivityCurve {
        feature: feature.to_string(),
        grid,
        outputs,
        held_at,
    })
}

/// Signed-error histogram data (e = predicted − actual).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ErrorHistogram {
    /// bins + 1 strictly increasing edges; bins are right-open except the
    /// last, which is closed.
    pub edges: Vec<f64>,
    pub counts: Vec<usize>,
    pub mean_error: f64,
    /// Population standard deviation (divisor n) of the errors.
    pub stddev_error: f64,
}

/// Bins prediction errors into `bins` equal-width bins spanning the
/// observed error range. When all errors coincide the bins span a unit
/// interval centered on the common value so edges stay strictly
/// increasing.
pub fn error_histogram(y: &[f64], yhat: &[f64], bins: usize) -> Result<ErrorHistogram> {
    if bins == 0 {
        return Err(Error::InvalidConfig("bins must be >= 1".to_string()));
    }
    if y.len() != yhat.len() || y.is_empty() {
        return Err(Error::LengthMismatch(format!(
            "actuals {} vs predictions {}",
            y.len(),
            yhat.len()
        )));
    }
    let errors: Vec<f64> = y.iter().zip(yhat).map(|(a, p)| p - a).collect();
    let mut lo = errors.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut hi = errors.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if lo == hi {
        lo -= 0.5;
        hi += 0.5;
    }
    let width = (hi - lo) / bins as f64;
    let mut edges: Vec<f64> = (0..=bins).map(|i| lo + i as f64 * width).collect();
    edges[bins] = hi;
    let mut counts = vec![0usize; bins];
    for &e in &errors {
        let idx = (((e - lo) / width).floor() as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let n = errors.len() as f64;
    let mean = errors.iter().sum::<f64>() / n;
    let var = errors.iter().map(|e| (e - mean) * (e - mean)).sum::<f64>() / n;
    Ok(ErrorHistogram {
        edges,
        counts,
        mean_error: mean,
        stddev_error: var.sqrt(),
    })
}
