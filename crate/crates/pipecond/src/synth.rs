//! Synthetic pipe-inventory generator.
//!
//! Rows are drawn from documented per-feature distributions and the target
//! is a linear combination plus Gaussian noise, so every downstream claim
//! can be tested against known ground truth. The default coefficients and
//! noise level are the published reference values; the feature ranges are
//! artifact conventions chosen for a similar signal-to-noise ratio, not
//! properties of any real inventory.
//!
//! Draw order is part of the contract: one source seeded from the config
//! draws, per row, each feature in listed order and then the noise term
//! (the noise draw happens even when `noise_sigma` = 0, so the feature
//! stream is independent of the noise setting).

use serde::{Deserialize, Serialize};

use crate::dataset::{ColumnKind, ColumnSchema, Table, Value, TARGET_COLUMN};
use crate::error::{Error, Result};
use crate::numeric::RandomSource;

/// Default slope of each default feature, paired with its distribution.
/// Reference values: intercept −6.659801, then AGE, PIPEDIA, LENGTH,
/// DEPTH, SEGMENTSL, SOILTYPE.
pub const DEFAULT_INTERCEPT: f64 = -6.659801;

/// How one feature column is drawn.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Distribution {
    /// Continuous uniform on [lo, hi].
    Uniform { lo: f64, hi: f64 },
    /// Integer uniform on {lo..hi} inclusive.
    UniformInt { lo: i64, hi: i64 },
}

impl Distribution {
    fn validate(&self, name: &str) -> Result<()> {
        let ok = match *self {
            Distribution::Uniform { lo, hi } => lo.is_finite() && hi.is_finite() && lo < hi,
            Distribution::UniformInt { lo, hi } => lo < hi,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidRange(format!(
                "feature {name:?} needs lo < hi, got {self:?}"
            )))
        }
    }

    fn draw(&self, rng: &mut RandomSource) -> f64 {
        match *self {
            Distribution::Uniform { lo, hi } => rng.uniform(lo, hi),
            Distribution::UniformInt { lo, hi } => rng.uniform_int(lo, hi) as f64,
        }
    }

    /// Exact variance of the distribution (used by analytic oracles).
    pub fn variance(&self) -> f64 {
        match *self {
            Distribution::Uniform { lo, hi } => (hi - lo) * (hi - lo) / 12.0,
            Distribution::UniformInt { lo, hi } => {
                let m = (hi - lo + 1) as f64;
                (m * m - 1.0) / 12.0
            }
        }
    }
}

/// One generated feature column.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureSpec {
    pub name: String,
    pub column_kind: ColumnKind,
    pub distribution: Distribution,
}

/// The documented default feature set.
pub fn default_features() -> Vec<FeatureSpec> {
    vec![
        FeatureSpec {
            name: "AGE".to_string(),
            column_kind: ColumnKind::Numeric,
            distribution: Distribution::Uniform { lo: 1.0, hi: 100.0 },
        },
        FeatureSpec {
            name: "PIPEDIA".to_string(),
            column_kind: ColumnKind::Numeric,
            distribution: Distribution::UniformInt { lo: 8, hi: 60 },
        },
        FeatureSpec {
            name: "LENGTH".to_string(),
            column_kind: ColumnKind::Numeric,
            distribution: Distribution::Uniform {
                lo: 50.0,
                hi: 500.0,
            },
        },
        FeatureSpec {
            name: "DEPTH".to_string(),
            column_kind: ColumnKind::Numeric,
            distribution: Distribution::Uniform { lo: 3.0, hi: 30.0 },
        },
        FeatureSpec {
            name: "SEGMENTSL".to_string(),
            column_kind: ColumnKind::Numeric,
            distribution: Distribution::Uniform {
                lo: 0.001,
                hi: 0.02,
            },
        },
        FeatureSpec {
            name: "SOILTYPE".to_string(),
            column_kind: ColumnKind::Categorical,
            distribution: Distribution::UniformInt { lo: 1, hi: 5 },
        },
    ]
}

/// Default coefficient vector (intercept first, then one slope per default
/// feature, reference values).
pub fn default_coefficients() -> Vec<f64> {
    vec![
        DEFAULT_INTERCEPT,
        0.09120619,  // AGE
        0.04544334,  // PIPEDIA
        0.00624929,  // LENGTH
        0.00823641,  // DEPTH
        11.5807336,  // SEGMENTSL
        0.07735169,  // SOILTYPE
    ]
}

/// Reference residual standard error, the default noise level.
pub const DEFAULT_NOISE_SIGMA: f64 = 0.531162481;

/// Everything the generator needs; `Default` gives the documented
/// 612-row reference setup.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GeneratorConfig {
    pub n: usize,
    pub seed: u64,
    /// Intercept followed by one slope per feature, in feature order.
    pub coefficients: Vec<f64>,
    pub noise_sigma: f64,
    pub features: Vec<FeatureSpec>,
    pub clamp_target: Option<(f64, f64)>,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            n: 612,
            seed: 42,
            coefficients: default_coefficients(),
            noise_sigma: DEFAULT_NOISE_SIGMA,
            features: default_features(),
            clamp_target: None,
        }
    }
}

impl GeneratorConfig {
    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidRange("n must be >= 1".to_string()));
        }
        if !(self.noise_sigma >= 0.0) {
            return Err(Error::InvalidRange(format!(
                "noise_sigma must be >= 0, got {}",
                self.noise_sigma
            )));
        }
        if self.features.is_empty() {
            return Err(Error::InvalidRange(
                "at least one feature is required".to_string(),
            ));
        }
        if self.coefficients.len() != self.features.len() + 1 {
            return Err(Error::InvalidRange(format!(
                "{} coefficients for {} features; need intercept + one per feature",
                self.coefficients.len(),
                self.features.len()
            )));
        }
        for f in &self.features {
            f.distribution.validate(&f.name)?;
        }
        if let Some((lo, hi)) = self.clamp_target {
            if !(lo < hi) {
                return Err(Error::InvalidRange(format!(
                    "clamp_target needs lo < hi, got ({lo}, {hi})"
                )));
            }
        }
        Ok(())
    }

    /// Schema of the generated table: the features in order, then the
    /// target column.
    pub fn schema(&self) -> Vec<ColumnSchema> {
        let mut schema: Vec<ColumnSchema> = self
            .features
            .iter()
            .map(|f| match f.column_kind {
                ColumnKind::Numeric => ColumnSchema::numeric(&f.name),
                ColumnKind::Categorical => ColumnSchema::categorical(&f.name),
            })
            .collect();
        schema.push(ColumnSchema::numeric(TARGET_COLUMN));
        schema
    }
}

/// Draws a table of `config.n` rows. The target is
/// intercept + Σ slopeⱼ·featureⱼ + Normal(0, noise_sigma²), optionally
/// clamped.
pub fn generate(config: &GeneratorConfig) -> Result<Table> {
    config.validate()?;
    let mut rng = RandomSource::new(config.seed);
    let schema = config.schema();
    let mut rows = Vec::with_capacity(config.n);
    for _ in 0..config.n {
        let mut row = Vec::with_capacity(schema.len());
        let mut y = config.coefficients[0];
        for (j, feature) in config.features.iter().enumerate() {
            let v = feature.distribution.draw(&mut rng);
            y += config.coefficients[j + 1] * v;
            row.push(match feature.column_kind {
                ColumnKind::Numeric => Value::Number(v),
                ColumnKind::Categorical => Value::Label(format!("{v}")),
            });
        }
        y += rng.normal(0.0, config.noise_sigma);
        if let Some((lo, hi)) = config.clamp_target {
            y = y.clamp(lo, hi);
        }
        row.push(Value::Number(y));
        rows.push(row);
    }
    Table::from_rows(schema, rows)
}

/// Pathology-injection settings. Fractions are per cell, counts per table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PathologySpec {
    /// Probability that any given cell is blanked.
    pub missing_fraction: f64,
    /// Number of distinct rows whose `outlier_column` is scaled.
    pub outlier_count: usize,
    /// Multiplier applied to the outlier cells.
    pub outlier_scale: f64,
    pub outlier_column: String,
}

impl Default for PathologySpec {
    fn default() -> Self {
        Self {
            missing_fraction: 0.1,
            outlier_count: 5,
            outlier_scale: 50.0,
            outlier_column: "LENGTH".to_string(),
        }
    }
}

/// What was injected, so cleaning recall and precision are measurable.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathologyReport {
    /// Row ids whose outlier cell was scaled, in injection order.
    pub outlier_rows: Vec<usize>,
    /// (row id, column name) of every blanked cell, row-major order.
    pub blanked_cells: Vec<(usize, String)>,
}

/// Blanks random cells and plants multiplied outliers. Draw order:
/// outlier row choice first (one permutation, skipped when the count is
/// zero), then one Bernoulli draw per cell in row-major order (skipped
/// when the fraction is zero). An all-zero spec returns the table
/// unchanged.
pub fn inject_pathologies(
    t: &Table,
    spec: &PathologySpec,
    rng: &mut RandomSource,
) -> Result<(Table, PathologyReport)> {
    if !(0.0..1.0).contains(&spec.missing_fraction) {
        return Err(Error::InvalidRange(format!(
            "missing_fraction must be in [0,1), got {}",
            spec.missing_fraction
        )));
    }
    if spec.outlier_count > t.n_rows() {
        return Err(Error::InvalidRange(format!(
            "cannot plant {} outliers in {} rows",
            spec.outlier_count,
            t.n_rows()
        )));
    }
    if spec.outlier_count > 0 && !(spec.outlier_scale > 0.0) {
        return Err(Error::InvalidRange(format!(
            "outlier_scale must be > 0, got {}",
            spec.outlier_scale
        )));
    }
    let n = t.n_rows();
    let mut rows: Vec<Vec<Value>> = (0..n)
        .map(|r| (0..t.n_cols()).map(|c| t.value(r, c).clone()).collect())
        .collect();
    let mut report = PathologyReport {
        outlier_rows: Vec::new(),
        blanked_cells: Vec::new(),
    };
    if spec.outlier_count > 0 {
        let col = t.column_index(&spec.outlier_column)?;
        let perm = rng.permutation(n);
        for &r in perm.iter().take(spec.outlier_count) {
            match &rows[r][col] {
                Value::Number(v) => {
                    rows[r][col] = Value::Number(v * spec.outlier_scale);
                    report.outlier_rows.push(t.row_id(r));
                }
                other => {
                    return Err(Error::ColumnNotNumeric(format!(
                        "{} (row {} holds {:?})",
                        spec.outlier_column,
                        t.row_id(r),
                        other
                    )))
                }
            }
        }
    }
    if spec.missing_fraction > 0.0 {
        for r in 0..n {
            for c in 0..t.n_cols() {
                if rng.next_f64() < spec.missing_fraction {
                    rows[r][c] = Value::Missing;
                    report
                        .blanked_cells
                        .push((t.row_id(r), t.schema()[c].name.clone()));
                }
            }
        }
    }
    Ok((t.with_values(rows)?, report))
}
