//! Mini-batch training loop with optional validation carve-out, early
//! stopping, and hyperparameter grid search.
//!
//! Randomness order is part of the contract: a single source seeded from
//! the config drives, in order, (1) weight initialization, (2) the
//! validation carve permutation (skipped entirely when
//! validation_fraction = 0), then per epoch (3) the batch shuffle and
//! (4) dropout masks batch by batch. Two runs with the same seed, config,
//! and data are therefore bit-identical.

use serde::{Deserialize, Serialize};

use super::optim::OptimizerState;
use super::{
    backward_gradients, forward, init_params, mse_loss, predict, ForwardMode, MlpParams, MlpSpec,
    OptimizerKind, OutputActivation, TargetScale,
};
use crate::dataset::k_fold_plan;
use crate::error::{Error, Result};
use crate::numeric::{derive_seed, Matrix, RandomSource};

/// Stop when validation loss has not improved by `min_delta` for more than
/// `patience` consecutive epochs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EarlyStopping {
    pub patience: usize,
    pub min_delta: f64,
}

/// Full training configuration. Deserialization fills unstated fields
/// from `Default`, so config files may be partial.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub epochs: usize,
    pub batch_size: usize,
    pub learning_rate: f64,
    pub optimizer: OptimizerKind,
    pub dropout_rate: f64,
    pub early_stopping: Option<EarlyStopping>,
    pub validation_fraction: f64,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            epochs: 100,
            batch_size: 32,
            learning_rate: 1e-3,
            optimizer: OptimizerKind::default(),
            dropout_rate: 0.0,
            early_stopping: None,
            validation_fraction: 0.2,
            seed: 42,
        }
    }
}

impl TrainConfig {
    fn validate(&self) -> Result<()> {
        if self.epochs == 0 {
            return Err(Error::InvalidConfig("epochs must be >= 1".to_string()));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidConfig("batch_size must be >= 1".to_string()));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "learning_rate must be > 0, got {}",
                self.learning_rate
            )));
        }
        if !(0.0..1.0).contains(&self.dropout_rate) {
            return Err(Error::InvalidConfig(format!(
                "dropout_rate must be in [0,1), got {}",
                self.dropout_rate
            )));
        }
        if !(0.0..1.0).contains(&self.validation_fraction) {
            return Err(Error::InvalidConfig(format!(
                "validation_fraction must be in [0,1), got {}",
                self.validation_fraction
            )));
        }
        if self.early_stopping.is_some() && self.validation_fraction == 0.0 {
            return Err(Error::InvalidConfig(
                "early stopping needs a validation carve-out".to_string(),
            ));
        }
        Ok(())
    }
}

/// Maps NaN entries to JSON null and back, so histories without a
/// validation carve-out survive checkpoint round-trips.
mod nan_as_null {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[f64], s: S) -> Result<S::Ok, S::Error> {
        let mapped: Vec<Option<f64>> = v
            .iter()
            .map(|&x| if x.is_nan() { None } else { Some(x) })
            .collect();
        mapped.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<f64>, D::Error> {
        let mapped = Vec::<Option<f64>>::deserialize(d)?;
        Ok(mapped.into_iter().map(|x| x.unwrap_or(f64::NAN)).collect())
    }
}

/// Per-epoch loss curves. Entries in `val_loss` are NaN when no validation
/// rows were carved out. Epoch numbers are 1-based; `best_epoch` = 0 means
/// no epoch was recorded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainHistory {
    pub train_loss: Vec<f64>,
    #[serde(with = "nan_as_null")]
    pub val_loss: Vec<f64>,
    pub stopped_epoch: usize,
    pub best_epoch: usize,
}

/// Trained parameters plus everything needed to use and audit them: the
/// loss history, the sigmoid head's target scale (None for a linear head),
/// and which rows served as validation.
#[derive(Debug, Clone)]
pub struct TrainOutcome {
    pub params: MlpParams,
    pub history: TrainHistory,
    pub target_scale: Option<TargetScale>,
    pub val_indices: Vec<usize>,
}

fn gather_rows(x: &Matrix, indices: &[usize]) -> Matrix {
    let mut data = Vec::with_capacity(indices.len() * x.cols());
    for &i in indices {
        data.extend_from_slice(x.row(i));
    }
    Matrix::from_raw(indices.len(), x.cols(), data)
}

fn gather_values(y: &[f64], indices: &[usize]) -> Vec<f64> {
    indices.iter().map(|&i| y[i]).collect()
}

/// Trains the network with shuffled mini-batches (the last short batch is
/// included). Per-epoch losses are recomputed over the full fit and
/// validation portions in inference mode, so the curves are comparable
/// across batch sizes. With early stopping, training halts once validation
/// loss stalls and the best-epoch parameter snapshot is returned.
pub fn train(spec: &MlpSpec, config: &TrainConfig, x: &Matrix, y: &[f64]) -> Result<TrainOutcome> {
    spec.validate()?;
    config.validate()?;
    if x.rows() == 0 {
        return Err(Error::DegenerateInput("no training rows".to_string()));
    }
    if x.rows() != y.len() {
        return Err(Error::DimensionMismatch(format!(
            "X has {} rows, y has {}",
            x.rows(),
            y.len()
        )));
    }
    let n = x.rows();
    let mut rng = RandomSource::new(config.seed);
    let mut params = init_params(spec, &mut rng)?;

    let target_scale = match spec.output_activation {
        OutputActivation::Sigmoid => Some(TargetScale::fit(y)?),
        OutputActivation::Linear => None,
    };
    let y_work: Vec<f64> = match &target_scale {
        Some(s) => y.iter().map(|&v| s.scale(v)).collect(),
        None => y.to_vec(),
    };

    let n_val = (config.validation_fraction * n as f64).round() as usize;
    let (mut fit_indices, val_indices) = if config.validation_fraction > 0.0 && n_val > 0 {
        if n_val >= n {
            return Err(Error::DegenerateSplit(format!(
                "validation fraction {} leaves no training rows",
                config.validation_fraction
            )));
        }
        let perm = rng.permutation(n);
        (perm[..n - n_val].to_vec(), perm[n - n_val..].to_vec())
    } else {
        ((0..n).collect(), Vec::new())
    };
    let fit_x = gather_rows(x, &fit_indices);
    let fit_y = gather_values(&y_work, &fit_indices);
    let val_x = gather_rows(x, &val_indices);
    let val_y = gather_values(&y_work, &val_indices);
    let has_val = !val_indices.is_empty();

    let mut optimizer = OptimizerState::new(config.optimizer, spec);
    let mut history = TrainHistory {
        train_loss: Vec::new(),
        val_loss: Vec::new(),
        stopped_epoch: 0,
        best_epoch: 0,
    };
    let mut best_params: Option<MlpParams> = None;
    let mut best_val = f64::INFINITY;
    let mut best_for_delta = f64::INFINITY;
    let mut wait = 0usize;

    for epoch in 1..=config.epochs {
        rng.shuffle(&mut fit_indices);
        for batch in fit_indices.chunks(config.batch_size) {
            let batch_x = gather_rows(x, batch);
            let batch_y = gather_values(&y_work, batch);
            let (_, cache) = forward(
                &params,
                spec,
                &batch_x,
                ForwardMode::Train {
                    dropout_rate: config.dropout_rate,
                    rng: &mut rng,
                },
            )?;
            let grads = backward_gradients(&params, &cache, &batch_y)?;
            optimizer.step(&mut params, &grads, config.learning_rate);
        }
        let (fit_pred, _) = forward(&params, spec, &fit_x, ForwardMode::Infer)?;
        let train_loss = mse_loss(&fit_pred, &fit_y);
        let val_loss = if has_val {
            let (val_pred, _) = forward(&params, spec, &val_x, ForwardMode::Infer)?;
            mse_loss(&val_pred, &val_y)
        } else {
            f64::NAN
        };
        if !train_loss.is_finite() || (has_val && !val_loss.is_finite()) {
            return Err(Error::NonFiniteLoss {
                epoch,
                message: format!(
                    "train loss {train_loss}, validation loss {val_loss}; \
                     lower the learning rate"
                ),
            });
        }
        history.train_loss.push(train_loss);
        history.val_loss.push(val_loss);
        history.stopped_epoch = epoch;

        if has_val && val_loss < best_val {
            best_val = val_loss;
            history.best_epoch = epoch;
            if config.early_stopping.is_some() {
                best_params = Some(params.clone());
            }
        }
        if let Some(es) = &config.early_stopping {
            if val_loss < best_for_delta - es.min_delta {
                best_for_delta = val_loss;
                wait = 0;
            } else {
                wait += 1;
                if wait > es.patience {
                    break;
                }
            }
        }
    }
    if !has_val {
        // Without validation the best epoch is the best training epoch.
        history.best_epoch = history
            .train_loss
            .iter()
            .enumerate()
            .min_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(i, _)| i + 1)
            .unwrap_or(0);
    }
    let final_params = match best_params {
        Some(snapshot) => snapshot,
        None => params,
    };
    Ok(TrainOutcome {
        params: final_params,
        history,
        target_scale,
        val_indices,
    })
}

/// Hyperparameter grids for `grid_search`; the Cartesian product of all
/// lists is explored.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridSpec {
    pub hidden_layers: Vec<Vec<usize>>,
    pub learning_rates: Vec<f64>,
    pub dropout_rates: Vec<f64>,
    pub batch_sizes: Vec<usize>,
}

/// How each grid cell is scored.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum GridValidation {
    Holdout { fraction: f64 },
    KFold { k: usize },
}

/// One evaluated configuration. `mean_val_mse` is None when the cell
/// failed; `cell_index` is the position in Cartesian enumeration order
/// (hidden layers outermost, then learning rate, dropout, batch size).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridCell {
    pub hidden_layers: Vec<usize>,
    pub learning_rate: f64,
    pub dropout_rate: f64,
    pub batch_size: usize,
    pub mean_val_mse: Option<f64>,
    pub parameter_count: usize,
    pub error: Option<String>,
    pub cell_index: usize,
}

fn score_cell(
    input_dim: usize,
    output_activation: OutputActivation,
    cell: &GridCell,
    base: &TrainConfig,
    x: &Matrix,
    y: &[f64],
    validation: &GridValidation,
) -> Result<f64> {
    let mut layer_sizes = vec![input_dim];
    layer_sizes.extend_from_slice(&cell.hidden_layers);
    layer_sizes.push(1);
    let spec = MlpSpec::new(layer_sizes, output_activation)?;
    let mut config = base.clone();
    config.learning_rate = cell.learning_rate;
    config.dropout_rate = cell.dropout_rate;
    config.batch_size = cell.batch_size;
    match *validation {
        GridValidation::Holdout { fraction } => {
            if !(fraction > 0.0 && fraction < 1.0) {
                return Err(Error::InvalidConfig(format!(
                    "holdout fraction must be in (0,1), got {fraction}"
                )));
            }
            config.validation_fraction = fraction;
            let outcome = train(&spec, &config, x, y)?;
            // Score in original target units on the carved-out rows.
            let val_x = gather_rows(x, &outcome.val_indices);
            let val_y = gather_values(y, &outcome.val_indices);
            let pred = predict(&spec, &outcome.params, &val_x, outcome.target_scale.as_ref())?;
            Ok(mse_loss(&pred, &val_y))
        }
        GridValidation::KFold { k } => {
            let plan = k_fold_plan(x.rows(), k, base.seed)?;
            config.validation_fraction = 0.0;
            config.early_stopping = None;
            let mut total = 0.0;
            for (f, fold) in plan.folds.iter().enumerate() {
                let train_rows: Vec<usize> = (0..x.rows()).filter(|i| !fold.contains(i)).collect();
                let mut fold_config = config.clone();
                fold_config.seed = derive_seed(base.seed, f as u64);
                let outcome = train(
                    &spec,
                    &fold_config,
                    &gather_rows(x, &train_rows),
                    &gather_values(y, &train_rows),
                )?;
                let pred = predict(
                    &spec,
                    &outcome.params,
                    &gather_rows(x, fold),
                    outcome.target_scale.as_ref(),
                )?;
                total += mse_loss(&pred, &gather_values(y, fold));
            }
            Ok(total / k as f64)
        }
    }
}

/// Orders cells: finite scores ascending, ties broken by fewer parameters
/// then enumeration order; failed cells after all scored ones, preserving
/// enumeration order among themselves.
fn rank_cells(cells: &mut [GridCell]) {
    cells.sort_by(|a, b| match (a.mean_val_mse, b.mean_val_mse) {
        (Some(x), Some(y)) => x
            .partial_cmp(&y)
            .unwrap()
            .then(a.parameter_count.cmp(&b.parameter_count))
            .then(a.cell_index.cmp(&b.cell_index)),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => a.cell_index.cmp(&b.cell_index),
    });
}

/// Trains every configuration in the Cartesian product of the grids and
/// returns the full leaderboard, best first. Cells that fail to train are
/// ranked last and carry their error text instead of a score.
pub fn grid_search(
    input_dim: usize,
    output_activation: OutputActivation,
    grid: &GridSpec,
    base: &TrainConfig,
    x: &Matrix,
    y: &[f64],
    validation: &GridValidation,
) -> Result<Vec<GridCell>> {
    if grid.hidden_layers.is_empty()
        || grid.learning_rates.is_empty()
        || grid.dropout_rates.is_empty()
        || grid.batch_sizes.is_empty()
    {
        return Err(Error::InvalidConfig(
            "every grid dimension needs at least one value".to_string(),
        ));
    }
    let mut cells = Vec::new();
    let mut cell_index = 0;
    for hidden in &grid.hidden_layers {
        for &lr in &grid.learning_rates {
            for &dropout in &grid.dropout_rates {
                for &batch in &grid.batch_sizes {
                    let mut layer_sizes = vec![input_dim];
                    layer_sizes.extend_from_slice(hidden);
                    layer_sizes.push(1);
                    let parameter_count = layer_sizes
                        .windows(2)
                        .map(|w| w[0] * w[1] + w[1])
                        .sum();
                    let mut cell = GridCell {
                        hidden_layers: hidden.clone(),
                        learning_rate: lr,
                        dropout_rate: dropout,
                        batch_size: batch,
                        mean_val_mse: None,
                        parameter_count,
                        error: None,
                        cell_index,
                    };
                    match score_cell(
                        input_dim,
                        output_activation,
                        &cell,
                        base,
                        x,
                        y,
                        validation,
                    ) {
                        Ok(score) if score.is_finite() => cell.mean_val_mse = Some(score),
                        Ok(score) => {
                            cell.error = Some(format!("non-finite validation score {score}"))
                        }
                        Err(e) => cell.error = Some(e.to_string()),
                    }
                    cells.push(cell);
                    cell_index += 1;
                }
            }
        }
    }
    rank_cells(&mut cells);
    Ok(cells)
}
