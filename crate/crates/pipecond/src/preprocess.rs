//! Feature transforms and design-matrix assembly.
//!
//! Two design modes exist because the two models consume features
//! differently: `MlrNumeric` keeps raw units with a leading intercept column
//! and treats the integer-coded soil class as a single numeric predictor,
//! while `AnnOnehot` standardizes numerics (z-score with training-set
//! statistics, population divisor) and expands categoricals into full
//! one-hot indicator blocks with no intercept. Transforms are fitted on
//! training data only and serialize to a JSON sidecar so new data can be
//! scored bit-identically.

use serde::{Deserialize, Serialize};

use crate::dataset::{ColumnKind, Table, Value};
use crate::error::{Error, Result};
use crate::numeric::Matrix;

/// Fitted z-score parameters: per-column mean and population stddev.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalerParams {
    pub means: Vec<f64>,
    pub stddevs: Vec<f64>,
}

fn column_mean_stddev(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

fn is_constant(mean: f64, stddev: f64) -> bool {
    stddev <= 1e-12 * (1.0 + mean.abs())
}

impl ScalerParams {
    /// Fits on the columns of `train`; errors with the offending column
    /// index if any column is constant.
    pub fn fit(train: &Matrix) -> Result<Self> {
        let mut means = Vec::with_capacity(train.cols());
        let mut stddevs = Vec::with_capacity(train.cols());
        for j in 0..train.cols() {
            let (mean, stddev) = column_mean_stddev(&train.column(j));
            if is_constant(mean, stddev) {
                return Err(Error::ConstantColumn(format!("column {j}")));
            }
            means.push(mean);
            stddevs.push(stddev);
        }
        Ok(Self { means, stddevs })
    }

    pub fn transform(&self, m: &Matrix) -> Result<Matrix> {
        if m.cols() != self.means.len() {
            return Err(Error::DimensionMismatch(format!(
                "scaler fitted on {} columns, matrix has {}",
                self.means.len(),
                m.cols()
            )));
        }
        let mut out = m.clone();
        for r in 0..m.rows() {
            for j in 0..m.cols() {
                out.set(r, j, (m.get(r, j) - self.means[j]) / self.stddevs[j]);
            }
        }
        Ok(out)
    }

    pub fn inverse_transform(&self, m: &Matrix) -> Result<Matrix> {
        if m.cols() != self.means.len() {
            return Err(Error::DimensionMismatch(format!(
                "scaler fitted on {} columns, matrix has {}",
                self.means.len(),
                m.cols()
            )));
        }
        let mut out = m.clone();
        for r in 0..m.rows() {
            for j in 0..m.cols() {
                out.set(r, j, m.get(r, j) * self.stddevs[j] + self.means[j]);
            }
        }
        Ok(out)
    }
}

/// Fits a standardizer on `train` and applies it to both matrices.
pub fn fit_apply_standardizer(
    train: &Matrix,
    apply_to: &Matrix,
) -> Result<(ScalerParams, Matrix, Matrix)> {
    let params = ScalerParams::fit(train)?;
    let train_out = params.transform(train)?;
    let apply_out = params.transform(apply_to)?;
    Ok((params, train_out, apply_out))
}

/// Ordered category labels for one categorical column.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EncoderColumn {
    pub name: String,
    pub labels: Vec<String>,
}

/// Fitted one-hot maps for every categorical column, in column order.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct EncoderMap {
    pub columns: Vec<EncoderColumn>,
}

/// Distinct labels in first-seen order.
pub fn fit_one_hot(labels: &[String]) -> Vec<String> {
    let mut seen = Vec::new();
    for l in labels {
        if !seen.iter().any(|s| s == l) {
            seen.push(l.clone());
        }
    }
    seen
}

/// Expands labels into 0/1 indicator columns per the fitted map. Unseen
/// labels produce an all-zero row and a warning record.
pub fn one_hot_encode(labels: &[String], map: &[String]) -> (Matrix, Vec<String>) {
    let mut out = Matrix::zeros(labels.len(), map.len());
    let mut warnings = Vec::new();
    for (r, label) in labels.iter().enumerate() {
        match map.iter().position(|m| m == label) {
            Some(c) => out.set(r, c, 1.0),
            None => {
                let msg = format!("row {r}: unseen category label {label:?}, encoded all-zero");
                log::warn!("{msg}");
                warnings.push(msg);
            }
        }
    }
    (out, warnings)
}

/// Which design matrix a model consumes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DesignMode {
    MlrNumeric,
    AnnOnehot,
}

/// Design-matrix request: mode, source feature columns in order, intercept.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DesignMatrixSpec {
    pub mode: DesignMode,
    pub columns: Vec<String>,
    pub intercept: bool,
}

impl DesignMatrixSpec {
    pub fn mlr_numeric(columns: Vec<String>) -> Self {
        Self {
            mode: DesignMode::MlrNumeric,
            columns,
            intercept: true,
        }
    }

    pub fn ann_onehot(columns: Vec<String>) -> Self {
        Self {
            mode: DesignMode::AnnOnehot,
            columns,
            intercept: false,
        }
    }

    /// All non-target columns of the table's schema, in schema order.
    pub fn default_for(t: &Table, target: &str, mode: DesignMode) -> Self {
        let columns = t
            .schema()
            .iter()
            .filter(|c| !c.name.eq_ignore_ascii_case(target))
            .map(|c| c.name.clone())
            .collect();
        match mode {
            DesignMode::MlrNumeric => Self::mlr_numeric(columns),
            DesignMode::AnnOnehot => Self::ann_onehot(columns),
        }
    }

    fn validate(&self, target: &str) -> Result<()> {
        let intercept_ok = match self.mode {
            DesignMode::MlrNumeric => self.intercept,
            DesignMode::AnnOnehot => !self.intercept,
        };
        if !intercept_ok {
            return Err(Error::InvalidConfig(format!(
                "{:?} mode requires intercept = {}",
                self.mode,
                matches!(self.mode, DesignMode::MlrNumeric)
            )));
        }
        if self
            .columns
            .iter()
            .any(|c| c.eq_ignore_ascii_case(target))
        {
            return Err(Error::InvalidConfig(format!(
                "target column {target} cannot be a feature"
            )));
        }
        Ok(())
    }
}

/// Transforms fitted at training time, serialized as a sidecar.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct FittedTransforms {
    pub scaler: Option<ScalerParams>,
    pub encoder: Option<EncoderMap>,
}

/// Assembled design matrix with target vector and expanded feature names.
#[derive(Debug, Clone)]
pub struct Design {
    pub x: Matrix,
    pub y: Vec<f64>,
    pub feature_names: Vec<String>,
    pub warnings: Vec<String>,
}

fn numeric_feature(t: &Table, name: &str) -> Result<Vec<f64>> {
    let idx = t.column_index(name)?;
    match t.schema()[idx].kind {
        ColumnKind::Numeric => t.numeric_column(name),
        // Integer-coded categorical read as a number (MLR path).
        ColumnKind::Categorical => (0..t.n_rows())
            .map(|r| match t.value(r, idx) {
                Value::Label(l) => l.parse::<f64>().map_err(|_| Error::Parse {
                    row: t.row_id(r),
                    column: name.to_string(),
                    message: format!("label {l:?} is not numeric-coded"),
                }),
                Value::Number(v) => Ok(*v),
                Value::Missing => Err(Error::Parse {
                    row: t.row_id(r),
                    column: name.to_string(),
                    message: "missing value; run cleaning first".to_string(),
                }),
            })
            .collect(),
    }
}

fn label_column(t: &Table, name: &str) -> Result<Vec<String>> {
    let idx = t.column_index(name)?;
    Ok((0..t.n_rows())
        .map(|r| match t.value(r, idx) {
            Value::Label(l) => l.clone(),
            Value::Number(v) => format!("{v}"),
            Value::Missing => String::new(),
        })
        .collect())
}

/// Builds (X, y, names) for a table. With `transforms` = None the scaler and
/// encoder are fitted on this table (the training call) and returned; with
/// Some they are applied as-is, so test or scoring data never leaks into the
/// fit.
pub fn assemble_design(
    t: &Table,
    spec: &DesignMatrixSpec,
    transforms: Option<&FittedTransforms>,
    target: &str,
) -> Result<(Design, FittedTransforms)> {
    spec.validate(target)?;
    if t.n_rows() == 0 {
        return Err(Error::DegenerateInput("empty table".to_string()));
    }
    let y = t.numeric_column(target)?;
    let n = t.n_rows();
    let mut warnings = Vec::new();
    match spec.mode {
        DesignMode::MlrNumeric => {
            let mut names = vec!["Intercept".to_string()];
            let mut columns: Vec<Vec<f64>> = vec![vec![1.0; n]];
            for name in &spec.columns {
                columns.push(numeric_feature(t, name)?);
                names.push(name.clone());
            }
            let x = matrix_from_columns(n, &columns)?;
            Ok((
                Design {
                    x,
                    y,
                    feature_names: names,
                    warnings,
                },
                FittedTransforms::default(),
            ))
        }
        DesignMode::AnnOnehot => {
            let numeric_names: Vec<&String> = spec
                .columns
                .iter()
                .filter(|c| {
                    t.column_index(c)
                        .map(|i| t.schema()[i].kind == ColumnKind::Numeric)
                        .unwrap_or(true)
                })
                .collect();
            let categorical_names: Vec<&String> = spec
                .columns
                .iter()
                .filter(|c| {
                    t.column_index(c)
                        .map(|i| t.schema()[i].kind == ColumnKind::Categorical)
                        .unwrap_or(false)
                })
                .collect();
            let mut raw_cols = Vec::with_capacity(numeric_names.len());
            for name in &numeric_names {
                raw_cols.push(numeric_feature(t, name)?);
            }
            let raw = matrix_from_columns(n, &raw_cols)?;
            let scaler = match transforms.and_then(|tr| tr.scaler.as_ref()) {
                Some(s) => s.clone(),
                None => ScalerParams::fit(&raw).map_err(|e| match e {
                    Error::ConstantColumn(idx) => {
                        let j: usize = idx
                            .trim_start_matches("column ")
                            .parse()
                            .unwrap_or(usize::MAX);
                        let name = numeric_names
                            .get(j)
                            .map(|s| s.to_string())
                            .unwrap_or(idx);
                        Error::ConstantColumn(name)
                    }
                    other => other,
                })?,
            };
            let scaled = scaler.transform(&raw)?;
            let mut names: Vec<String> = numeric_names.iter().map(|s| s.to_string()).collect();
            let mut columns: Vec<Vec<f64>> =
                (0..scaled.cols()).map(|j| scaled.column(j)).collect();
            let mut encoder = EncoderMap::default();
            for name in &categorical_names {
                let labels = label_column(t, name)?;
                let map = match transforms.and_then(|tr| tr.encoder.as_ref()) {
                    Some(enc) => enc
                        .columns
                        .iter()
                        .find(|c| c.name == **name)
                        .map(|c| c.labels.clone())
                        .ok_or_else(|| Error::UnknownFeature(format!(
                            "no fitted encoder for column {name}"
                        )))?,
                    None => fit_one_hot(&labels),
                };
                let (indicators, mut warn) = one_hot_encode(&labels, &map);
                for (j, label) in map.iter().enumerate() {
                    names.push(format!("{name}={label}"));
                    columns.push(indicators.column(j));
                }
                warnings.append(&mut warn);
                encoder.columns.push(EncoderColumn {
                    name: name.to_string(),
                    labels: map,
                });
            }
            let x = matrix_from_columns(n, &columns)?;
            let fitted = FittedTransforms {
                scaler: Some(scaler),
                encoder: Some(encoder),
            };
            Ok((
                Design {
                    x,
                    y,
                    feature_names: names,
                    warnings,
                },
                fitted,
            ))
        }
    }
}

fn matrix_from_columns(n: usize, columns: &[Vec<f64>]) -> Result<Matrix> {
    let cols = columns.len();
    let mut data = Vec::with_capacity(n * cols);
    for r in 0..n {
        for col in columns {
            data.push(col[r]);
        }
    }
    Matrix::new(n, cols, data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{default_schema, ColumnSchema, TARGET_COLUMN};
    use proptest::prelude::*;

    fn single_column(values: &[f64]) -> Matrix {
        Matrix::new(values.len(), 1, values.to_vec()).unwrap()
    }

    #[test]
    fn standardizer_hand_computed_example() {
        let train = single_column(&[1.0, 2.0, 3.0]);
        let apply = single_column(&[2.0]);
        let (params, t_out, a_out) = fit_apply_standardizer(&train, &apply).unwrap();
        assert!((params.means[0] - 2.0).abs() < 1e-15);
        assert!((params.stddevs[0] - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        let expected = 1.2247448713915890;
        assert!((t_out.get(0, 0) + expected).abs() < 1e-12);
        assert!(t_out.get(1, 0).abs() < 1e-12);
        assert!((t_out.get(2, 0) - expected).abs() < 1e-12);
        assert!(a_out.get(0, 0).abs() < 1e-15, "train mean maps to 0");
    }

    #[test]
    fn standardizer_is_idempotent_on_standardized_input() {
        let v = 1.2247448713915890;
        let train = single_column(&[-v, 0.0, v]);
        let (_, out, _) = fit_apply_standardizer(&train, &train).unwrap();
        for r in 0..3 {
            assert!((out.get(r, 0) - train.get(r, 0)).abs() < 1e-12);
        }
    }

    #[test]
    fn standardizer_rejects_constant_column() {
        let train = Matrix::new(3, 2, vec![1.0, 7.0, 2.0, 7.0, 3.0, 7.0]).unwrap();
        match ScalerParams::fit(&train) {
            Err(Error::ConstantColumn(c)) => assert_eq!(c, "column 1"),
            other => panic!("expected ConstantColumn, got {other:?}"),
        }
    }

    #[test]
    fn standardizer_round_trips() {
        let train = single_column(&[4.0, 9.0, 15.0, 2.0, 8.0]);
        let (params, out, _) = fit_apply_standardizer(&train, &train).unwrap();
        let back = params.inverse_transform(&out).unwrap();
        for r in 0..train.rows() {
            assert!((back.get(r, 0) - train.get(r, 0)).abs() < 1e-12);
        }
    }

    #[test]
    fn one_hot_definition_and_policy_cases() {
        let labels: Vec<String> = ["a", "b", "a", "c"].iter().map(|s| s.to_string()).collect();
        let map = fit_one_hot(&labels);
        assert_eq!(map, vec!["a", "b", "c"]);
        let (m, warnings) = one_hot_encode(&labels, &map);
        assert!(warnings.is_empty());
        let expected = [
            [1.0, 0.0, 0.0],
            [0.0, 1.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0],
        ];
        for (r, row) in expected.iter().enumerate() {
            assert_eq!(m.row(r), row.as_slice());
        }
        let single = fit_one_hot(&["x".to_string(), "x".to_string()]);
        let (m, _) = one_hot_encode(&["x".to_string(), "x".to_string()], &single);
        assert_eq!(m.cols(), 1);
        assert!(m.column(0).iter().all(|&v| v == 1.0));
        let (m, warnings) = one_hot_encode(&["d".to_string()], &map);
        assert_eq!(m.row(0), &[0.0, 0.0, 0.0]);
        assert_eq!(warnings.len(), 1);
    }

    fn pipe_table(n: usize) -> Table {
        let schema = default_schema();
        let rows = (0..n)
            .map(|i| {
                vec![
                    Value::Number(10.0 + i as f64),
                    Value::Number(8.0 + (i % 4) as f64),
                    Value::Number(100.0 + 3.0 * i as f64),
                    Value::Number(5.0 + (i % 7) as f64),
                    Value::Number(0.001 * (1 + i % 9) as f64),
                    Value::Label(format!("{}", 1 + i % 5)),
                    Value::Number(1.0 + (i % 5) as f64),
                ]
            })
            .collect();
        Table::from_rows(schema, rows).unwrap()
    }

    #[test]
    fn mlr_design_has_intercept_and_numeric_soiltype() {
        let t = pipe_table(12);
        let spec = DesignMatrixSpec::default_for(&t, TARGET_COLUMN, DesignMode::MlrNumeric);
        let (design, _) = assemble_design(&t, &spec, None, TARGET_COLUMN).unwrap();
        assert_eq!(design.x.cols(), 7);
        assert_eq!(design.feature_names.len(), 7);
        assert_eq!(design.feature_names[0], "Intercept");
        assert!(design.x.column(0).iter().all(|&v| v == 1.0));
        // SOILTYPE is the sixth predictor, parsed from its label.
        assert_eq!(design.feature_names[6], "SOILTYPE");
        assert_eq!(design.x.get(0, 6), 1.0);
        assert_eq!(design.x.get(1, 6), 2.0);
        assert_eq!(design.y.len(), 12);
    }

    #[test]
    fn mlr_design_rejects_non_numeric_labels() {
        let schema = vec![
            ColumnSchema::categorical("SOILTYPE"),
            ColumnSchema::numeric("PACPRATING"),
        ];
        let rows = vec![vec![Value::Label("clay".into()), Value::Number(1.0)]];
        let t = Table::from_rows(schema, rows).unwrap();
        let spec = DesignMatrixSpec::mlr_numeric(vec!["SOILTYPE".to_string()]);
        match assemble_design(&t, &spec, None, "PACPRATING") {
            Err(Error::Parse { column, .. }) => assert_eq!(column, "SOILTYPE"),
            other => panic!("expected Parse error, got {other:?}"),
        }
    }

    #[test]
    fn ann_design_standardizes_and_expands_one_hot() {
        let t = pipe_table(20);
        let spec = DesignMatrixSpec::default_for(&t, TARGET_COLUMN, DesignMode::AnnOnehot);
        let (design, fitted) = assemble_design(&t, &spec, None, TARGET_COLUMN).unwrap();
        assert_eq!(design.x.cols(), 10, "5 numerics + 5 soil levels");
        assert_eq!(design.feature_names.len(), design.x.cols());
        assert!(design.feature_names.contains(&"SOILTYPE=3".to_string()));
        for j in 0..5 {
            let col = design.x.column(j);
            let (mean, stddev) = column_mean_stddev(&col);
            assert!(mean.abs() < 1e-12, "column {j} mean {mean}");
            assert!((stddev - 1.0).abs() < 1e-12, "column {j} stddev {stddev}");
        }
        for r in 0..design.x.rows() {
            let ones: f64 = (5..10).map(|j| design.x.get(r, j)).sum();
            assert_eq!(ones, 1.0, "exactly one indicator per row");
        }
        // Applying the fitted transforms to fresh rows uses train statistics.
        let t2 = pipe_table(6);
        let (applied, _) = assemble_design(&t2, &spec, Some(&fitted), TARGET_COLUMN).unwrap();
        let scaler = fitted.scaler.as_ref().unwrap();
        let expected = (10.0 - scaler.means[0]) / scaler.stddevs[0];
        assert!((applied.x.get(0, 0) - expected).abs() < 1e-15);
    }

    #[test]
    fn ann_design_warns_on_unseen_label() {
        let t = pipe_table(10);
        let spec = DesignMatrixSpec::default_for(&t, TARGET_COLUMN, DesignMode::AnnOnehot);
        let (_, fitted) = assemble_design(&t, &spec, None, TARGET_COLUMN).unwrap();
        let schema = default_schema();
        let rows = vec![vec![
            Value::Number(11.0),
            Value::Number(9.0),
            Value::Number(130.0),
            Value::Number(6.0),
            Value::Number(0.004),
            Value::Label("9".into()),
            Value::Number(2.0),
        ]];
        let t2 = Table::from_rows(schema, rows).unwrap();
        let (design, _) = assemble_design(&t2, &spec, Some(&fitted), TARGET_COLUMN).unwrap();
        assert_eq!(design.warnings.len(), 1);
        let ones: f64 = (5..design.x.cols()).map(|j| design.x.get(0, j)).sum();
        assert_eq!(ones, 0.0, "unseen label encodes all-zero");
    }

    #[test]
    fn empty_table_is_degenerate() {
        let t = Table::from_rows(default_schema(), Vec::new()).unwrap();
        let spec = DesignMatrixSpec::default_for(&t, TARGET_COLUMN, DesignMode::MlrNumeric);
        assert!(matches!(
            assemble_design(&t, &spec, None, TARGET_COLUMN),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn invalid_spec_combinations_are_rejected() {
        let t = pipe_table(5);
        let mut spec = DesignMatrixSpec::default_for(&t, TARGET_COLUMN, DesignMode::MlrNumeric);
        spec.intercept = false;
        assert!(matches!(
            assemble_design(&t, &spec, None, TARGET_COLUMN),
            Err(Error::InvalidConfig(_))
        ));
        let spec = DesignMatrixSpec::mlr_numeric(vec!["PACPRATING".to_string()]);
        assert!(matches!(
            assemble_design(&t, &spec, None, TARGET_COLUMN),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn transforms_survive_json_round_trip() {
        let t = pipe_table(15);
        let spec = DesignMatrixSpec::default_for(&t, TARGET_COLUMN, DesignMode::AnnOnehot);
        let (design, fitted) = assemble_design(&t, &spec, None, TARGET_COLUMN).unwrap();
        let json = serde_json::to_string(&fitted).unwrap();
        let back: FittedTransforms = serde_json::from_str(&json).unwrap();
        let (redo, _) = assemble_design(&t, &spec, Some(&back), TARGET_COLUMN).unwrap();
        assert_eq!(design.x.data(), redo.x.data(), "bit-identical reapply");
    }

    proptest! {
        #[test]
        fn self_application_gives_zero_mean_unit_stddev(
            raw in proptest::collection::vec(-1e4f64..1e4, 8..40),
        ) {
            let (_, stddev) = column_mean_stddev(&raw);
            prop_assume!(stddev > 1e-6);
            let m = single_column(&raw);
            let (_, out, _) = fit_apply_standardizer(&m, &m).unwrap();
            let (mean, stddev) = column_mean_stddev(&out.column(0));
            prop_assert!(mean.abs() < 1e-12);
            prop_assert!((stddev - 1.0).abs() < 1e-12);
        }

        #[test]
        fn inverse_transform_round_trips(
            raw in proptest::collection::vec(-1e4f64..1e4, 8..40),
        ) {
            let (_, stddev) = column_mean_stddev(&raw);
            prop_assume!(stddev > 1e-6);
            let m = single_column(&raw);
            let params = ScalerParams::fit(&m).unwrap();
            let out = params.transform(&m).unwrap();
            let back = params.inverse_transform(&out).unwrap();
            for r in 0..m.rows() {
                prop_assert!((back.get(r, 0) - m.get(r, 0)).abs() < 1e-9 * (1.0 + m.get(r, 0).abs()));
            }
        }
    }
}
