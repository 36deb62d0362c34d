//! Tabular dataset handling: CSV ingestion, cleaning rules, and reproducible
//! train/test and k-fold partitions.
//!
//! Cleaning follows a fixed policy: rows with missing required cells are
//! dropped first, then univariate IQR outliers are flagged, then Mahalanobis
//! outliers are flagged among the IQR survivors (so the covariance estimate
//! is not distorted by gross univariate outliers), and the union is removed.
//! Every removed row lands in the table's drop log under a stable original
//! row id, so input row count always reconciles with kept + dropped.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{chi_square_quantile, RandomSource};

/// Column kind: numeric cells parse as f64, categorical cells are labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ColumnKind {
    Numeric,
    Categorical,
}

/// Schema entry for one column.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ColumnSchema {
    pub name: String,
    pub kind: ColumnKind,
    /// Required columns participate in missing-row removal.
    pub required: bool,
}

impl ColumnSchema {
    pub fn numeric(name: &str) -> Self {
        Self {
            name: name.to_string(),
            kind: ColumnKind::Numeric,
            required: true,
        }
    }

    pub fn categorical(name: &str) -> Self {
        Self {
            name: name.to_string(),
            kind: ColumnKind::Categorical,
            required: true,
        }
    }

    pub fn optional(mut self) -> Self {
        self.required = false;
        self
    }
}

/// The pipe-inventory schema used throughout: five numeric features, an
/// integer-coded categorical soil class, and the numeric condition target.
pub fn default_schema() -> Vec<ColumnSchema> {
    vec![
        ColumnSchema::numeric("AGE"),
        ColumnSchema::numeric("PIPEDIA"),
        ColumnSchema::numeric("LENGTH"),
        ColumnSchema::numeric("DEPTH"),
        ColumnSchema::numeric("SEGMENTSL"),
        ColumnSchema::categorical("SOILTYPE"),
        ColumnSchema::numeric("PACPRATING"),
    ]
}

/// Name of the prediction target in the default schema.
pub const TARGET_COLUMN: &str = "PACPRATING";

/// One parsed cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Number(f64),
    Label(String),
    Missing,
}

impl Value {
    pub fn as_number(&self) -> Option<f64> {
        match self {
            Value::Number(v) => Some(*v),
            _ => None,
        }
    }

    pub fn is_missing(&self) -> bool {
        matches!(self, Value::Missing)
    }
}

/// Drop-log entry: original row id plus the reason it was removed.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DropEntry {
    pub row_id: usize,
    pub reason: String,
}

/// Immutable table of parsed rows with provenance.
#[derive(Debug, Clone)]
pub struct Table {
    schema: Vec<ColumnSchema>,
    rows: Vec<Vec<Value>>,
    /// Original data-row index of each kept row (0-based, header excluded).
    row_ids: Vec<usize>,
    source: Option<PathBuf>,
    drop_log: Vec<DropEntry>,
}

fn is_missing_token(cell: &str) -> bool {
    let t = cell.trim();
    t.is_empty() || t.eq_ignore_ascii_case("NA") || t.eq_ignore_ascii_case("N/A")
}

fn parse_cell(cell: &str, kind: ColumnKind) -> Value {
    if is_missing_token(cell) {
        return Value::Missing;
    }
    match kind {
        ColumnKind::Numeric => match cell.trim().parse::<f64>() {
            Ok(v) if v.is_finite() => Value::Number(v),
            _ => Value::Missing,
        },
        ColumnKind::Categorical => Value::Label(cell.trim().to_lowercase()),
    }
}

impl Table {
    /// Builds a table directly from parsed rows (used by the generator and
    /// tests). Row ids are assigned positionally.
    pub fn from_rows(schema: Vec<ColumnSchema>, rows: Vec<Vec<Value>>) -> Result<Self> {
        for (i, row) in rows.iter().enumerate() {
            if row.len() != schema.len() {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} cells, schema has {} columns",
                    row.len(),
                    schema.len()
                )));
            }
        }
        let row_ids = (0..rows.len()).collect();
        Ok(Self {
            schema,
            rows,
            row_ids,
            source: None,
            drop_log: Vec::new(),
        })
    }

    /// Clone with the same schema, row ids, source, and drop log but new
    /// cell values (pathology injection rewrites cells in place).
    pub fn with_values(&self, rows: Vec<Vec<Value>>) -> Result<Self> {
        if rows.len() != self.rows.len() {
            return Err(Error::DimensionMismatch(format!(
                "replacement has {} rows, table has {}",
                rows.len(),
                self.rows.len()
            )));
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != self.schema.len() {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} cells, schema has {} columns",
                    row.len(),
                    self.schema.len()
                )));
            }
        }
        Ok(Self {
            schema: self.schema.clone(),
            rows,
            row_ids: self.row_ids.clone(),
            source: self.source.clone(),
            drop_log: self.drop_log.clone(),
        })
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.schema.len()
    }

    pub fn schema(&self) -> &[ColumnSchema] {
        &self.schema
    }

    pub fn source(&self) -> Option<&Path> {
        self.source.as_deref()
    }

    pub fn drop_log(&self) -> &[DropEntry] {
        &self.drop_log
    }

    pub fn row_id(&self, row: usize) -> usize {
        self.row_ids[row]
    }

    pub fn value(&self, row: usize, col: usize) -> &Value {
        &self.rows[row][col]
    }

    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.schema
            .iter()
            .position(|c| c.name.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::MissingColumn(name.to_string()))
    }

    /// All values of a numeric column; errors if the column is categorical
    /// or still contains missing cells.
    pub fn numeric_column(&self, name: &str) -> Result<Vec<f64>> {
        let idx = self.column_index(name)?;
        if self.schema[idx].kind != ColumnKind::Numeric {
            return Err(Error::ColumnNotNumeric(name.to_string()));
        }
        self.rows
            .iter()
            .enumerate()
            .map(|(r, row)| {
                row[idx].as_number().ok_or_else(|| Error::Parse {
                    row: self.row_ids[r],
                    column: name.to_string(),
                    message: "missing value; run cleaning first".to_string(),
                })
            })
            .collect()
    }

    /// New table containing the given rows (in the given order). Provenance
    /// row ids are preserved; the drop log is not carried over because a
    /// selection is a view, not a cleaning step.
    pub fn select_rows(&self, indices: &[usize]) -> Table {
        Table {
            schema: self.schema.clone(),
            rows: indices.iter().map(|&i| self.rows[i].clone()).collect(),
            row_ids: indices.iter().map(|&i| self.row_ids[i]).collect(),
            source: self.source.clone(),
            drop_log: Vec::new(),
        }
    }

    fn retain_rows(&self, keep: &[bool], mut reasons: Vec<Option<String>>) -> Table {
        let mut rows = Vec::new();
        let mut row_ids = Vec::new();
        let mut drop_log = self.drop_log.clone();
        for i in 0..self.rows.len() {
            if keep[i] {
                rows.push(self.rows[i].clone());
                row_ids.push(self.row_ids[i]);
            } else {
                drop_log.push(DropEntry {
                    row_id: self.row_ids[i],
                    reason: reasons[i].take().unwrap_or_else(|| "dropped".to_string()),
                });
            }
        }
        Table {
            schema: self.schema.clone(),
            rows,
            row_ids,
            source: self.source.clone(),
            drop_log,
        }
    }

    /// Renders the table as CSV text (header row plus one line per row);
    /// numbers use the shortest round-trip decimal form.
    pub fn to_csv_string(&self) -> Result<String> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(self.schema.iter().map(|c| c.name.as_str()))?;
        for row in &self.rows {
            let record: Vec<String> = row
                .iter()
                .map(|v| match v {
                    Value::Number(x) => format!("{x}"),
                    Value::Label(s) => s.clone(),
                    Value::Missing => String::new(),
                })
                .collect();
            writer.write_record(&record)?;
        }
        let bytes = writer
            .into_inner()
            .map_err(|e| Error::Csv(e.into_error().into()))?;
        Ok(String::from_utf8(bytes).expect("csv output is UTF-8"))
    }

    /// Writes the table as CSV to `path`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_csv_string()?).map_err(|e| Error::io(path, e))
    }
}

/// Loads a CSV file against a schema. Header names are matched
/// case-insensitively after trimming; blank or unparseable cells are
/// recorded as missing and handled later by `drop_incomplete`.
pub fn load_table(path: &Path, schema: Vec<ColumnSchema>) -> Result<Table> {
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(file);
    let headers = reader.headers()?.clone();
    if headers.len() == 0 || headers.iter().all(|h| h.trim().is_empty()) {
        return Err(Error::EmptyFile(path.to_path_buf()));
    }
    let mut column_map = Vec::with_capacity(schema.len());
    for col in &schema {
        let idx = headers
            .iter()
            .position(|h| h.trim().eq_ignore_ascii_case(&col.name))
            .ok_or_else(|| Error::MissingColumn(col.name.clone()))?;
        column_map.push(idx);
    }
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record?;
        let row = schema
            .iter()
            .zip(&column_map)
            .map(|(col, &idx)| parse_cell(record.get(idx).unwrap_or(""), col.kind))
            .collect();
        rows.push(row);
    }
    let row_ids = (0..rows.len()).collect();
    Ok(Table {
        schema,
        rows,
        row_ids,
        source: Some(path.to_path_buf()),
        drop_log: Vec::new(),
    })
}

/// Removes rows with a missing value in any required column. The drop log
/// gains one entry per removed row, reason `missing:<column>` naming the
/// first missing required column in schema order.
pub fn drop_incomplete(t: &Table) -> Table {
    let mut keep = vec![true; t.n_rows()];
    let mut reasons = vec![None; t.n_rows()];
    for (i, row) in t.rows.iter().enumerate() {
        for (col, value) in t.schema.iter().zip(row) {
            if col.required && value.is_missing() {
                keep[i] = false;
                reasons[i] = Some(format!("missing:{}", col.name));
                break;
            }
        }
    }
    t.retain_rows(&keep, reasons)
}

/// Interpolated quantile of already-sorted values at position (n−1)·q.
fn sorted_quantile(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let pos = (n - 1) as f64 * q;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// Flags rows where any named column falls strictly outside the Tukey
/// fences [Q1 − whisker·IQR, Q3 + whisker·IQR]. Quartiles use linear
/// interpolation of order statistics; missing cells are skipped for
/// estimation and never flagged; an infinite whisker flags nothing.
pub fn flag_outliers_iqr(t: &Table, columns: &[String], whisker: f64) -> Result<Vec<bool>> {
    let mut flags = vec![false; t.n_rows()];
    if whisker.is_infinite() {
        return Ok(flags);
    }
    for name in columns {
        let idx = t.column_index(name)?;
        if t.schema[idx].kind != ColumnKind::Numeric {
            return Err(Error::ColumnNotNumeric(name.clone()));
        }
        let mut values: Vec<f64> = t
            .rows
            .iter()
            .filter_map(|row| row[idx].as_number())
            .collect();
        if values.is_empty() {
            continue;
        }
        values.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let q1 = sorted_quantile(&values, 0.25);
        let q3 = sorted_quantile(&values, 0.75);
        let iqr = q3 - q1;
        let lo = q1 - whisker * iqr;
        let hi = q3 + whisker * iqr;
        for (i, row) in t.rows.iter().enumerate() {
            if let Some(v) = row[idx].as_number() {
                if v < lo || v > hi {
                    flags[i] = true;
                }
            }
        }
    }
    Ok(flags)
}

/// Cholesky factor of a symmetric positive-definite matrix stored row-major,
/// or None if a pivot degenerates.
fn cholesky(a: &[f64], p: usize) -> Option<Vec<f64>> {
    let mut l = vec![0.0; p * p];
    for i in 0..p {
        for j in 0..=i {
            let mut sum = a[i * p + j];
            for k in 0..j {
                sum -= l[i * p + k] * l[j * p + k];
            }
            if i == j {
                if sum <= 1e-12 * a[i * p + i].abs().max(1.0) {
                    return None;
                }
                l[i * p + i] = sum.sqrt();
            } else {
                l[i * p + j] = sum / l[j * p + j];
            }
        }
    }
    Some(l)
}

/// Flags rows whose squared Mahalanobis distance from the column means
/// exceeds the chi-square quantile with df = number of columns. The
/// covariance is the sample covariance (divisor n−1); rows with missing
/// cells in the named columns are skipped for estimation and never flagged.
/// A quantile of 1.0 means an infinite threshold, so nothing is flagged.
pub fn flag_outliers_mahalanobis(
    t: &Table,
    columns: &[String],
    quantile: f64,
) -> Result<Vec<bool>> {
    let p = columns.len();
    let mut flags = vec![false; t.n_rows()];
    if p == 0 {
        return Ok(flags);
    }
    if !(0.0..=1.0).contains(&quantile) {
        return Err(Error::Domain(format!(
            "Mahalanobis quantile must be in [0,1], got {quantile}"
        )));
    }
    if quantile >= 1.0 {
        return Ok(flags);
    }
    let mut idxs = Vec::with_capacity(p);
    for name in columns {
        let idx = t.column_index(name)?;
        if t.schema[idx].kind != ColumnKind::Numeric {
            return Err(Error::ColumnNotNumeric(name.clone()));
        }
        idxs.push(idx);
    }
    let complete: Vec<usize> = (0..t.n_rows())
        .filter(|&r| idxs.iter().all(|&c| t.rows[r][c].as_number().is_some()))
        .collect();
    let n = complete.len();
    if n < p + 1 {
        return Err(Error::TooFewRows(format!(
            "Mahalanobis needs at least {} complete rows for {p} columns, found {n}",
            p + 1
        )));
    }
    let mut mean = vec![0.0; p];
    for &r in &complete {
        for (j, &c) in idxs.iter().enumerate() {
            mean[j] += t.rows[r][c].as_number().unwrap();
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }
    let mut cov = vec![0.0; p * p];
    for &r in &complete {
        let d: Vec<f64> = idxs
            .iter()
            .enumerate()
            .map(|(j, &c)| t.rows[r][c].as_number().unwrap() - mean[j])
            .collect();
        for i in 0..p {
            for j in 0..p {
                cov[i * p + j] += d[i] * d[j];
            }
        }
    }
    for v in &mut cov {
        *v /= (n - 1) as f64;
    }
    let l = cholesky(&cov, p).ok_or(Error::SingularCovariance)?;
    let threshold = chi_square_quantile(quantile, p as f64)?;
    for &r in &complete {
        let d: Vec<f64> = idxs
            .iter()
            .enumerate()
            .map(|(j, &c)| t.rows[r][c].as_number().unwrap() - mean[j])
            .collect();
        // Forward-substitute L z = d; D² = ‖z‖².
        let mut d2 = 0.0;
        let mut z = vec![0.0; p];
        for i in 0..p {
            let mut sum = d[i];
            for k in 0..i {
                sum -= l[i * p + k] * z[k];
            }
            z[i] = sum / l[i * p + i];
            d2 += z[i] * z[i];
        }
        if d2 > threshold {
            flags[r] = true;
        }
    }
    Ok(flags)
}

/// Cleaning configuration; defaults match the documented policy.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CleanConfig {
    /// Columns screened for outliers; None means every numeric column,
    /// target included.
    pub outlier_columns: Option<Vec<String>>,
    pub whisker: f64,
    pub mahalanobis_quantile: f64,
}

impl Default for CleanConfig {
    fn default() -> Self {
        Self {
            outlier_columns: None,
            whisker: 1.5,
            mahalanobis_quantile: 0.975,
        }
    }
}

/// Full cleaning policy: drop incomplete rows, flag IQR outliers, flag
/// Mahalanobis outliers among the IQR survivors, remove the union. The two
/// flag sets are disjoint by construction, so each removed row carries
/// exactly one reason.
pub fn clean_table(t: &Table, config: &CleanConfig) -> Result<Table> {
    let complete = drop_incomplete(t);
    let columns: Vec<String> = match &config.outlier_columns {
        Some(cols) => cols.clone(),
        None => complete
            .schema
            .iter()
            .filter(|c| c.kind == ColumnKind::Numeric)
            .map(|c| c.name.clone())
            .collect(),
    };
    let iqr_flags = flag_outliers_iqr(&complete, &columns, config.whisker)?;
    let survivors: Vec<usize> = (0..complete.n_rows()).filter(|&i| !iqr_flags[i]).collect();
    let survivor_view = complete.select_rows(&survivors);
    let maha_flags =
        flag_outliers_mahalanobis(&survivor_view, &columns, config.mahalanobis_quantile)?;
    let mut keep = vec![true; complete.n_rows()];
    let mut reasons: Vec<Option<String>> = vec![None; complete.n_rows()];
    for (i, flagged) in iqr_flags.iter().enumerate() {
        if *flagged {
            keep[i] = false;
            reasons[i] = Some("outlier:iqr".to_string());
        }
    }
    for (s, flagged) in maha_flags.iter().enumerate() {
        if *flagged {
            let i = survivors[s];
            keep[i] = false;
            reasons[i] = Some("outlier:mahalanobis".to_string());
        }
    }
    Ok(complete.retain_rows(&keep, reasons))
}

/// Reproducible train/test partition.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplitIndices {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
    pub seed: u64,
    pub train_fraction: f64,
}

/// Shuffles row indices with the seeded generator and cuts at
/// round(train_fraction·n).
pub fn train_test_split(t: &Table, train_fraction: f64, seed: u64) -> Result<SplitIndices> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidRange(format!(
            "train_fraction must be in (0,1), got {train_fraction}"
        )));
    }
    let n = t.n_rows();
    if n < 2 {
        return Err(Error::DegenerateSplit(format!(
            "need at least 2 rows to split, found {n}"
        )));
    }
    let perm = RandomSource::new(seed).permutation(n);
    let n_train = (train_fraction * n as f64).round() as usize;
    if n_train == 0 || n_train == n {
        return Err(Error::DegenerateSplit(format!(
            "fraction {train_fraction} of {n} rows leaves an empty side"
        )));
    }
    Ok(SplitIndices {
        train: perm[..n_train].to_vec(),
        test: perm[n_train..].to_vec(),
        seed,
        train_fraction,
    })
}

/// Reproducible k-fold partition; fold sizes differ by at most one, with the
/// larger folds first in deal order.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub folds: Vec<Vec<usize>>,
    pub seed: u64,
}

pub fn k_fold_plan(n: usize, k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 || k > n {
        return Err(Error::InvalidK(format!(
            "k must satisfy 2 <= k <= n, got k={k}, n={n}"
        )));
    }
    let perm = RandomSource::new(seed).permutation(n);
    let base = n / k;
    let remainder = n % k;
    let mut folds = Vec::with_capacity(k);
    let mut start = 0;
    for i in 0..k {
        let size = base + usize::from(i < remainder);
        folds.push(perm[start..start + size].to_vec());
        start += size;
    }
    Ok(FoldPlan { k, folds, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::io::Write as _;

    fn write_temp_csv(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f.flush().unwrap();
        f
    }

    fn small_schema() -> Vec<ColumnSchema> {
        vec![
            ColumnSchema::numeric("AGE"),
            ColumnSchema::numeric("DEPTH"),
            ColumnSchema::categorical("SOILTYPE"),
        ]
    }

    fn numeric_table(name: &str, values: &[f64]) -> Table {
        let schema = vec![ColumnSchema::numeric(name)];
        let rows = values.iter().map(|&v| vec![Value::Number(v)]).collect();
        Table::from_rows(schema, rows).unwrap()
    }

    #[test]
    fn load_parses_and_marks_missing() {
        let f = write_temp_csv("age, Depth ,SOILTYPE\n10,3.5,2\nabc,4,1\n2e1,NA, Clay \n");
        let t = load_table(f.path(), small_schema()).unwrap();
        assert_eq!(t.n_rows(), 3);
        assert_eq!(t.value(0, 0), &Value::Number(10.0));
        assert!(t.value(1, 0).is_missing(), "unparseable cell is missing");
        assert_eq!(t.value(2, 0), &Value::Number(20.0), "scientific notation");
        assert!(t.value(2, 1).is_missing(), "NA token");
        assert_eq!(t.value(2, 2), &Value::Label("clay".to_string()));
        assert_eq!(t.drop_log().len(), 0);
    }

    #[test]
    fn load_header_only_gives_empty_table() {
        let f = write_temp_csv("AGE,DEPTH,SOILTYPE\n");
        let t = load_table(f.path(), small_schema()).unwrap();
        assert_eq!(t.n_rows(), 0);
    }

    #[test]
    fn load_errors() {
        let f = write_temp_csv("AGE,SOILTYPE\n1,2\n");
        match load_table(f.path(), small_schema()) {
            Err(Error::MissingColumn(c)) => assert_eq!(c, "DEPTH"),
            other => panic!("expected MissingColumn, got {other:?}"),
        }
        let f = write_temp_csv("");
        assert!(matches!(
            load_table(f.path(), small_schema()),
            Err(Error::EmptyFile(_))
        ));
        assert!(matches!(
            load_table(Path::new("/nonexistent/x.csv"), small_schema()),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn csv_round_trip_preserves_values() {
        let schema = small_schema();
        let mut rng = RandomSource::new(9);
        let rows: Vec<Vec<Value>> = (0..612)
            .map(|_| {
                vec![
                    Value::Number(rng.uniform(1.0, 100.0)),
                    Value::Number(rng.standard_normal()),
                    Value::Label(format!("{}", rng.uniform_int(1, 5))),
                ]
            })
            .collect();
        let t = Table::from_rows(schema.clone(), rows).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("round_trip.csv");
        t.write_csv(&path).unwrap();
        let back = load_table(&path, schema).unwrap();
        assert_eq!(back.n_rows(), t.n_rows());
        for r in 0..t.n_rows() {
            for c in 0..t.n_cols() {
                assert_eq!(back.value(r, c), t.value(r, c), "cell ({r},{c})");
            }
        }
    }

    #[test]
    fn drop_incomplete_counts_and_reasons() {
        let mut rows = Vec::new();
        for i in 0..10 {
            let depth = if i % 3 == 0 {
                Value::Missing
            } else {
                Value::Number(i as f64)
            };
            rows.push(vec![Value::Number(i as f64), depth, Value::Label("a".into())]);
        }
        let t = Table::from_rows(small_schema(), rows).unwrap();
        let cleaned = drop_incomplete(&t);
        assert_eq!(cleaned.n_rows(), 6);
        assert_eq!(cleaned.drop_log().len(), 4);
        assert!(cleaned
            .drop_log()
            .iter()
            .all(|e| e.reason == "missing:DEPTH"));
        assert_eq!(cleaned.n_rows() + cleaned.drop_log().len(), t.n_rows());
        let twice = drop_incomplete(&cleaned);
        assert_eq!(twice.n_rows(), cleaned.n_rows());
        assert_eq!(twice.drop_log().len(), cleaned.drop_log().len());
    }

    #[test]
    fn drop_incomplete_keeps_rows_missing_only_optional_columns() {
        let schema = vec![
            ColumnSchema::numeric("AGE"),
            ColumnSchema::numeric("NOTE").optional(),
        ];
        let rows = vec![
            vec![Value::Number(1.0), Value::Missing],
            vec![Value::Missing, Value::Number(2.0)],
        ];
        let t = Table::from_rows(schema, rows).unwrap();
        let cleaned = drop_incomplete(&t);
        assert_eq!(cleaned.n_rows(), 1);
        assert_eq!(cleaned.value(0, 0), &Value::Number(1.0));
        assert_eq!(cleaned.drop_log()[0].reason, "missing:AGE");
    }

    #[test]
    fn iqr_hand_computed_example() {
        let mut values: Vec<f64> = (1..=10).map(|v| v as f64).collect();
        values.push(100.0);
        let t = numeric_table("X", &values);
        let flags = flag_outliers_iqr(&t, &["X".to_string()], 1.5).unwrap();
        // Q1 = 3.5, Q3 = 8.5, IQR = 5, fences [-4, 16]: only the 100.
        let expected: Vec<bool> = values.iter().map(|&v| v == 100.0).collect();
        assert_eq!(flags, expected);
    }

    #[test]
    fn iqr_degenerate_cases() {
        let t = numeric_table("X", &[5.0; 8]);
        let flags = flag_outliers_iqr(&t, &["X".to_string()], 1.5).unwrap();
        assert!(flags.iter().all(|f| !f), "constant column flags nothing");
        let t = numeric_table("X", &[1.0, 2.0, 3.0, 1000.0]);
        let flags = flag_outliers_iqr(&t, &["X".to_string()], f64::INFINITY).unwrap();
        assert!(flags.iter().all(|f| !f), "infinite whisker flags nothing");
        let schema = vec![ColumnSchema::categorical("S")];
        let t = Table::from_rows(schema, vec![vec![Value::Label("a".into())]]).unwrap();
        assert!(matches!(
            flag_outliers_iqr(&t, &["S".to_string()], 1.5),
            Err(Error::ColumnNotNumeric(_))
        ));
    }

    fn two_col_table(points: &[(f64, f64)]) -> Table {
        let schema = vec![ColumnSchema::numeric("X"), ColumnSchema::numeric("Y")];
        let rows = points
            .iter()
            .map(|&(x, y)| vec![Value::Number(x), Value::Number(y)])
            .collect();
        Table::from_rows(schema, rows).unwrap()
    }

    #[test]
    fn mahalanobis_identity_covariance_matches_euclidean() {
        // Sample covariance of these five points is exactly the identity
        // and the mean is the origin, so D² is the squared distance.
        let s = std::f64::consts::SQRT_2;
        let points = [(s, 0.0), (-s, 0.0), (0.0, s), (0.0, -s), (0.0, 0.0)];
        let t = two_col_table(&points);
        let cols = vec!["X".to_string(), "Y".to_string()];
        // chi2(0.5, 2) = 1.386...: the four off-origin points have D² = 2.
        let flags = flag_outliers_mahalanobis(&t, &cols, 0.5).unwrap();
        assert_eq!(flags, vec![true, true, true, true, false]);
        // At 0.975 the threshold is 7.38, nothing is flagged.
        let flags = flag_outliers_mahalanobis(&t, &cols, 0.975).unwrap();
        assert!(flags.iter().all(|f| !f));
        // The row at the mean is never flagged at any threshold below 1.
        let flags = flag_outliers_mahalanobis(&t, &cols, 0.0001).unwrap();
        assert!(!flags[4]);
    }

    #[test]
    fn mahalanobis_matches_z_score_oracle_for_diagonal_covariance() {
        // Independent standardized-ish columns: flags must match a
        // per-threshold oracle computed from the exact D² formula.
        let mut rng = RandomSource::new(11);
        let points: Vec<(f64, f64)> = (0..200)
            .map(|_| (rng.standard_normal(), 3.0 * rng.standard_normal()))
            .collect();
        let t = two_col_table(&points);
        let cols = vec!["X".to_string(), "Y".to_string()];
        let flags = flag_outliers_mahalanobis(&t, &cols, 0.975).unwrap();
        let n = points.len() as f64;
        let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
        let my = points.iter().map(|p| p.1).sum::<f64>() / n;
        let vx = points.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>() / (n - 1.0);
        let vy = points.iter().map(|p| (p.1 - my).powi(2)).sum::<f64>() / (n - 1.0);
        let cxy = points
            .iter()
            .map(|p| (p.0 - mx) * (p.1 - my))
            .sum::<f64>()
            / (n - 1.0);
        let det = vx * vy - cxy * cxy;
        let threshold = chi_square_quantile(0.975, 2.0).unwrap();
        for (i, p) in points.iter().enumerate() {
            let dx = p.0 - mx;
            let dy = p.1 - my;
            let d2 = (vy * dx * dx - 2.0 * cxy * dx * dy + vx * dy * dy) / det;
            assert_eq!(flags[i], d2 > threshold, "row {i}: D²={d2}");
        }
        assert!(flags.iter().any(|&f| f), "200 normals should show outliers");
    }

    #[test]
    fn mahalanobis_errors_and_boundaries() {
        let t = two_col_table(&[(1.0, 2.0), (3.0, 4.0)]);
        let cols = vec!["X".to_string(), "Y".to_string()];
        assert!(matches!(
            flag_outliers_mahalanobis(&t, &cols, 0.975),
            Err(Error::TooFewRows(_))
        ));
        // Perfectly collinear columns give a singular covariance.
        let t = two_col_table(&[(1.0, 2.0), (2.0, 4.0), (3.0, 6.0), (4.0, 8.0)]);
        assert!(matches!(
            flag_outliers_mahalanobis(&t, &cols, 0.975),
            Err(Error::SingularCovariance)
        ));
        let t = two_col_table(&[(1.0, 9.0), (2.0, 3.0), (3.0, 5.0), (4.0, 1.0), (50.0, 2.0)]);
        let flags = flag_outliers_mahalanobis(&t, &cols, 1.0).unwrap();
        assert!(flags.iter().all(|f| !f), "quantile 1.0 flags nothing");
    }

    #[test]
    fn clean_table_reconciles_and_reports_reasons() {
        let mut rows = Vec::new();
        for i in 0..40 {
            rows.push(vec![
                Value::Number(10.0 + (i % 7) as f64),
                Value::Number(3.0 + (i % 5) as f64),
                Value::Label("a".into()),
            ]);
        }
        rows.push(vec![Value::Missing, Value::Number(4.0), Value::Label("a".into())]);
        rows.push(vec![
            Value::Number(5000.0),
            Value::Number(4.0),
            Value::Label("a".into()),
        ]);
        let t = Table::from_rows(small_schema(), rows).unwrap();
        let cleaned = clean_table(&t, &CleanConfig::default()).unwrap();
        assert_eq!(cleaned.n_rows() + cleaned.drop_log().len(), t.n_rows());
        let reasons: Vec<&str> = cleaned
            .drop_log()
            .iter()
            .map(|e| e.reason.as_str())
            .collect();
        assert!(reasons.contains(&"missing:AGE"));
        assert!(reasons.contains(&"outlier:iqr"));
        let mut ids: Vec<usize> = (0..cleaned.n_rows())
            .map(|r| cleaned.row_id(r))
            .chain(cleaned.drop_log().iter().map(|e| e.row_id))
            .collect();
        ids.sort_unstable();
        assert_eq!(ids, (0..t.n_rows()).collect::<Vec<_>>());
    }

    #[test]
    fn split_counts_and_determinism() {
        let t = numeric_table("X", &(0..10).map(|v| v as f64).collect::<Vec<_>>());
        let s1 = train_test_split(&t, 0.8, 42).unwrap();
        assert_eq!(s1.train.len(), 8);
        assert_eq!(s1.test.len(), 2);
        let s2 = train_test_split(&t, 0.8, 42).unwrap();
        assert_eq!(s1.train, s2.train);
        assert_eq!(s1.test, s2.test);
        let s3 = train_test_split(&t, 0.8, 43).unwrap();
        assert_ne!(s1.train, s3.train, "different seed, different shuffle");
    }

    #[test]
    fn split_degenerate_and_range_errors() {
        let t = numeric_table("X", &[1.0, 2.0]);
        assert!(matches!(
            train_test_split(&t, 0.1, 1),
            Err(Error::DegenerateSplit(_))
        ));
        assert!(matches!(
            train_test_split(&t, 1.0, 1),
            Err(Error::InvalidRange(_))
        ));
        let one = numeric_table("X", &[1.0]);
        assert!(matches!(
            train_test_split(&one, 0.5, 1),
            Err(Error::DegenerateSplit(_))
        ));
    }

    #[test]
    fn k_fold_sizes_and_errors() {
        let plan = k_fold_plan(10, 5, 7).unwrap();
        assert!(plan.folds.iter().all(|f| f.len() == 2));
        let plan = k_fold_plan(11, 5, 7).unwrap();
        let sizes: Vec<usize> = plan.folds.iter().map(|f| f.len()).collect();
        assert_eq!(sizes, vec![3, 2, 2, 2, 2]);
        assert!(matches!(k_fold_plan(10, 1, 7), Err(Error::InvalidK(_))));
        assert!(matches!(k_fold_plan(3, 4, 7), Err(Error::InvalidK(_))));
    }

    proptest! {
        #[test]
        fn split_partitions_indices(n in 2usize..200, seed in 0u64..1000) {
            let t = numeric_table("X", &(0..n).map(|v| v as f64).collect::<Vec<_>>());
            let n_train = (0.8 * n as f64).round() as usize;
            prop_assume!(n_train > 0 && n_train < n);
            let s = train_test_split(&t, 0.8, seed).unwrap();
            let mut all: Vec<usize> = s.train.iter().chain(s.test.iter()).copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        }

        #[test]
        fn folds_partition_indices(n in 4usize..150, k in 2usize..8, seed in 0u64..1000) {
            prop_assume!(k <= n);
            let plan = k_fold_plan(n, k, seed).unwrap();
            let mut all: Vec<usize> = plan.folds.iter().flatten().copied().collect();
            all.sort_unstable();
            prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
            let sizes: Vec<usize> = plan.folds.iter().map(|f| f.len()).collect();
            let min = *sizes.iter().min().unwrap();
            let max = *sizes.iter().max().unwrap();
            prop_assert!(max - min <= 1);
        }

        #[test]
        fn iqr_flags_are_permutation_equivariant(
            values in proptest::collection::vec(-1e3f64..1e3, 5..60),
            rot in 1usize..5,
        ) {
            let t = numeric_table("X", &values);
            let flags = flag_outliers_iqr(&t, &["X".to_string()], 1.5).unwrap();
            let rot = rot % values.len();
            let mut rotated = values.clone();
            rotated.rotate_left(rot);
            let tr = numeric_table("X", &rotated);
            let flags_r = flag_outliers_iqr(&tr, &["X".to_string()], 1.5).unwrap();
            let mut expected = flags.clone();
            expected.rotate_left(rot);
            prop_assert_eq!(flags_r, expected);
        }
    }
}
