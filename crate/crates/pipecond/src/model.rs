//! Model recipes and fitted models.
//!
//! A [`ModelRecipe`] says what to fit (feature columns, estimator, training
//! settings); [`fit_model`] turns it plus a table into a [`FittedModel`]
//! carrying the fitted transforms, so predictions on new tables reuse the
//! training-time scaler and encoder. Fitted models round-trip through JSON
//! checkpoints.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::ann::{
    train, MlpParams, MlpSpec, OutputActivation, TargetScale, TrainConfig, TrainHistory,
};
use crate::dataset::Table;
use crate::error::{Error, Result};
use crate::mlr::{
    fit_lasso, fit_ols, fit_ridge, predict_linear, OlsFit, RegularizedFit,
    LASSO_DEFAULT_MAX_ITER, LASSO_DEFAULT_TOL,
};
use crate::numeric::{Matrix, ALGORITHM_ID};
use crate::preprocess::{assemble_design, DesignMatrixSpec, DesignMode, FittedTransforms};

fn default_confidence() -> f64 {
    0.95
}

fn default_hidden_layers() -> Vec<usize> {
    vec![64, 32]
}

/// Linear-regression recipe. `columns` = None selects every non-target
/// column; at most one of `ridge_lambda` / `lasso_lambda` may be set, and
/// when one is, predictions use the regularized coefficients while the
/// inferential tables still come from the OLS fit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MlrRecipe {
    #[serde(default)]
    pub columns: Option<Vec<String>>,
    #[serde(default = "default_confidence")]
    pub confidence: f64,
    #[serde(default)]
    pub ridge_lambda: Option<f64>,
    #[serde(default)]
    pub lasso_lambda: Option<f64>,
}

impl Default for MlrRecipe {
    fn default() -> Self {
        Self {
            columns: None,
            confidence: default_confidence(),
            ridge_lambda: None,
            lasso_lambda: None,
        }
    }
}

/// Neural-network recipe; hidden layers default to the 64/32 architecture.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnnRecipe {
    #[serde(default)]
    pub columns: Option<Vec<String>>,
    #[serde(default = "default_hidden_layers")]
    pub hidden_layers: Vec<usize>,
    #[serde(default)]
    pub output_activation: OutputActivation,
    #[serde(default)]
    pub train: TrainConfig,
}

impl Default for AnnRecipe {
    fn default() -> Self {
        Self {
            columns: None,
            hidden_layers: default_hidden_layers(),
            output_activation: OutputActivation::default(),
            train: TrainConfig::default(),
        }
    }
}

/// What to fit: exactly one estimator family.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "model")]
pub enum ModelRecipe {
    Mlr(MlrRecipe),
    Ann(AnnRecipe),
}

impl ModelRecipe {
    /// The seed that will drive any randomness in fitting (None for MLR,
    /// which is deterministic without one).
    pub fn seed(&self) -> Option<u64> {
        match self {
            ModelRecipe::Mlr(_) => None,
            ModelRecipe::Ann(r) => Some(r.train.seed),
        }
    }

    /// Returns a copy with the fitting seed replaced (a no-op for MLR);
    /// used by cross-validation to give each fold its own stream.
    pub fn with_seed(&self, seed: u64) -> ModelRecipe {
        match self {
            ModelRecipe::Mlr(r) => ModelRecipe::Mlr(r.clone()),
            ModelRecipe::Ann(r) => {
                let mut r = r.clone();
                r.train.seed = seed;
                ModelRecipe::Ann(r)
            }
        }
    }

    fn design_spec(&self, table: &Table, target: &str) -> DesignMatrixSpec {
        match self {
            ModelRecipe::Mlr(r) => match &r.columns {
                Some(cols) => DesignMatrixSpec::mlr_numeric(cols.clone()),
                None => DesignMatrixSpec::default_for(table, target, DesignMode::MlrNumeric),
            },
            ModelRecipe::Ann(r) => match &r.columns {
                Some(cols) => DesignMatrixSpec::ann_onehot(cols.clone()),
                None => DesignMatrixSpec::default_for(table, target, DesignMode::AnnOnehot),
            },
        }
    }
}

/// Estimator-specific fitted state.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "model")]
pub enum FittedArtifact {
    Mlr {
        fit: OlsFit,
        regularized: Option<RegularizedFit>,
        confidence: f64,
    },
    Ann {
        spec: MlpSpec,
        params: MlpParams,
        target_scale: Option<TargetScale>,
        history: TrainHistory,
    },
}

/// A fitted model: everything needed to score new tables and to audit how
/// the fit was produced.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FittedModel {
    pub target: String,
    pub design: DesignMatrixSpec,
    pub transforms: FittedTransforms,
    pub feature_names: Vec<String>,
    pub artifact: FittedArtifact,
    pub seed: Option<u64>,
    pub algorithm_id: String,
}

/// Fits `recipe` on `table`, fitting preprocessing transforms on the same
/// rows (never on later evaluation data).
pub fn fit_model(recipe: &ModelRecipe, table: &Table, target: &str) -> Result<FittedModel> {
    let design_spec = recipe.design_spec(table, target);
    let (design, transforms) = assemble_design(table, &design_spec, None, target)?;
    let artifact = match recipe {
        ModelRecipe::Mlr(r) => {
            if r.ridge_lambda.is_some() && r.lasso_lambda.is_some() {
                return Err(Error::InvalidConfig(
                    "set at most one of ridge_lambda and lasso_lambda".to_string(),
                ));
            }
            let fit = fit_ols(&design.x, &design.y, r.confidence)?;
            let regularized = match (r.ridge_lambda, r.lasso_lambda) {
                (Some(lambda), None) => Some(fit_ridge(&design.x, &design.y, lambda)?),
                (None, Some(lambda)) => Some(fit_lasso(
                    &design.x,
                    &design.y,
                    lambda,
                    LASSO_DEFAULT_TOL,
                    LASSO_DEFAULT_MAX_ITER,
                )?),
                _ => None,
            };
            FittedArtifact::Mlr {
                fit,
                regularized,
                confidence: r.confidence,
            }
        }
        ModelRecipe::Ann(r) => {
            let mut layer_sizes = vec![design.x.cols()];
            layer_sizes.extend_from_slice(&r.hidden_layers);
            layer_sizes.push(1);
            let spec = MlpSpec::new(layer_sizes, r.output_activation)?;
            let outcome = train(&spec, &r.train, &design.x, &design.y)?;
            FittedArtifact::Ann {
                spec,
                params: outcome.params,
                target_scale: outcome.target_scale,
                history: outcome.history,
            }
        }
    };
    Ok(FittedModel {
        target: target.to_string(),
        design: design_spec,
        transforms,
        feature_names: design.feature_names,
        artifact,
        seed: recipe.seed(),
        algorithm_id: ALGORITHM_ID.to_string(),
    })
}

/// Predictions for an already-assembled design matrix in original target
/// units.
pub fn predict_matrix(model: &FittedModel, x: &Matrix) -> Result<Vec<f64>> {
    match &model.artifact {
        FittedArtifact::Mlr {
            fit, regularized, ..
        } => {
            let coefficients = match regularized {
                Some(r) => &r.coefficients,
                None => &fit.coefficients,
            };
            predict_linear(coefficients, x)
        }
        FittedArtifact::Ann {
            spec,
            params,
            target_scale,
            ..
        } => crate::ann::predict(spec, params, x, target_scale.as_ref()),
    }
}

/// Predictions for a raw table, applying the training-time transforms. The
/// table must carry the target column (its values are ignored here).
pub fn predict_table(model: &FittedModel, table: &Table) -> Result<Vec<f64>> {
    let (design, _) = assemble_design(table, &model.design, Some(&model.transforms), &model.target)?;
    predict_matrix(model, &design.x)
}

/// Writes the model as a JSON checkpoint.
pub fn save_model(model: &FittedModel, path: &Path) -> Result<()> {
    let json = serde_json::to_string_pretty(model)?;
    fs::write(path, json).map_err(|e| Error::io(path, e))
}

/// Reads a JSON checkpoint and validates its internal shape.
pub fn load_model(path: &Path) -> Result<FittedModel> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let model: FittedModel = serde_json::from_str(&text)?;
    if let FittedArtifact::Ann { spec, params, .. } = &model.artifact {
        spec.validate()?;
        if !params.matches_spec(spec) {
            return Err(Error::DimensionMismatch(format!(
                "checkpoint {} has parameters inconsistent with its layer sizes",
                path.display()
            )));
        }
    }
    Ok(model)
}
