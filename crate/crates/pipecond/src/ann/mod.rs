//! From-scratch multilayer perceptron regressor.
//!
//! The network is a plain feed-forward stack: each layer computes
//! a = f(Wx + b), hidden layers use ReLU, the output layer is linear or
//! sigmoid. Training minimizes batch-mean squared error via exact
//! backpropagation. Dropout is the inverted variant (masks hold 0 or
//! 1/keep), applied to hidden activations only, so inference needs no
//! rescaling. Everything is deterministic given a seed: weight
//! initialization, batch order, and mask draws all come from one
//! `RandomSource` in a documented order.

mod optim;
mod train;

pub use optim::{adam_step, sgd_momentum_step, AdamState, MomentumState, OptimizerKind};
pub use train::{
    grid_search, train, EarlyStopping, GridCell, GridSpec, GridValidation, TrainConfig,
    TrainHistory, TrainOutcome,
};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{Matrix, RandomSource};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HiddenActivation {
    Relu,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputActivation {
    #[default]
    Linear,
    Sigmoid,
}

/// Network shape: input width, hidden sizes, and a single output neuron.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpSpec {
    pub layer_sizes: Vec<usize>,
    pub hidden_activation: HiddenActivation,
    pub output_activation: OutputActivation,
}

impl MlpSpec {
    pub fn new(layer_sizes: Vec<usize>, output_activation: OutputActivation) -> Result<Self> {
        let spec = Self {
            layer_sizes,
            hidden_activation: HiddenActivation::Relu,
            output_activation,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.layer_sizes.len() < 3 {
            return Err(Error::InvalidConfig(format!(
                "need input, at least one hidden, and output layer, got {:?}",
                self.layer_sizes
            )));
        }
        if *self.layer_sizes.last().unwrap() != 1 {
            return Err(Error::InvalidConfig(format!(
                "output layer must have size 1, got {:?}",
                self.layer_sizes
            )));
        }
        if self.layer_sizes.iter().any(|&s| s == 0) {
            return Err(Error::InvalidConfig(format!(
                "layer sizes must be positive, got {:?}",
                self.layer_sizes
            )));
        }
        Ok(())
    }

    pub fn input_dim(&self) -> usize {
        self.layer_sizes[0]
    }

    pub fn layer_count(&self) -> usize {
        self.layer_sizes.len() - 1
    }

    /// Total number of trainable scalars.
    pub fn parameter_count(&self) -> usize {
        self.layer_sizes
            .windows(2)
            .map(|w| w[0] * w[1] + w[1])
            .sum()
    }
}

/// One layer's parameters: weights are (out × in), biases length out.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerParams {
    pub weights: Matrix,
    pub biases: Vec<f64>,
}

/// All layer parameters in order. Doubles as gradient storage, since
/// gradients are shaped exactly like the parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlpParams {
    pub layers: Vec<LayerParams>,
}

impl MlpParams {
    /// Zero-filled parameters shaped for the spec.
    pub fn zeros_like(spec: &MlpSpec) -> Self {
        let layers = spec
            .layer_sizes
            .windows(2)
            .map(|w| LayerParams {
                weights: Matrix::zeros(w[1], w[0]),
                biases: vec![0.0; w[1]],
            })
            .collect();
        Self { layers }
    }

    pub fn matches_spec(&self, spec: &MlpSpec) -> bool {
        self.layers.len() == spec.layer_count()
            && self.layers.iter().zip(spec.layer_sizes.windows(2)).all(
                |(layer, w)| {
                    layer.weights.rows() == w[1]
                        && layer.weights.cols() == w[0]
                        && layer.biases.len() == w[1]
                },
            )
    }
}

fn fingerprint(params: &MlpParams) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    let mix = |h: &mut u64, x: u64| {
        *h ^= x;
        *h = h.wrapping_mul(0x100000001b3);
    };
    for layer in &params.layers {
        mix(&mut h, layer.weights.rows() as u64);
        mix(&mut h, layer.weights.cols() as u64);
        for w in layer.weights.data() {
            mix(&mut h, w.to_bits());
        }
        for b in &layer.biases {
            mix(&mut h, b.to_bits());
        }
    }
    h
}

/// He initialization: weights ~ Normal(0, √(2/fan_in)) drawn layer by
/// layer in row-major order; biases start at zero (no draws consumed).
pub fn init_params(spec: &MlpSpec, rng: &mut RandomSource) -> Result<MlpParams> {
    spec.validate()?;
    let mut layers = Vec::with_capacity(spec.layer_count());
    for w in spec.layer_sizes.windows(2) {
        let (fan_in, fan_out) = (w[0], w[1]);
        let sd = (2.0 / fan_in as f64).sqrt();
        let mut weights = Matrix::zeros(fan_out, fan_in);
        for i in 0..fan_out {
            for j in 0..fan_in {
                weights.set(i, j, rng.normal(0.0, sd));
            }
        }
        layers.push(LayerParams {
            weights,
            biases: vec![0.0; fan_out],
        });
    }
    Ok(MlpParams { layers })
}

/// Forward-pass mode: training draws fresh dropout masks, inference is
/// deterministic with no dropout.
pub enum ForwardMode<'a> {
    Train {
        dropout_rate: f64,
        rng: &'a mut RandomSource,
    },
    Infer,
}

/// Everything backpropagation needs, captured at forward time.
pub struct ForwardCache {
    /// Input to each layer l (element 0 is the batch itself).
    activations: Vec<Matrix>,
    /// Pre-activation z of each layer, output layer included.
    zs: Vec<Matrix>,
    /// Per hidden layer: inverted-dropout mask (entries 0 or 1/keep), or
    /// None when dropout was off.
    masks: Vec<Option<Vec<f64>>>,
    outputs: Vec<f64>,
    output_activation: OutputActivation,
    params_fingerprint: u64,
}

impl ForwardCache {
    pub fn outputs(&self) -> &[f64] {
        &self.outputs
    }

    /// The dropout masks drawn during this pass, reusable with
    /// `forward_with_masks` to replay the exact same stochastic network.
    pub fn masks(&self) -> &[Option<Vec<f64>>] {
        &self.masks
    }

    /// Pre-activation matrices per layer (output layer last). Gradient
    /// diagnostics use these to spot units sitting on the ReLU kink,
    /// where finite differences are undefined.
    pub fn pre_activations(&self) -> &[Matrix] {
        &self.zs
    }
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

fn affine(input: &Matrix, layer: &LayerParams) -> Matrix {
    let n = input.rows();
    let out_dim = layer.weights.rows();
    let in_dim = layer.weights.cols();
    let mut data = Vec::with_capacity(n * out_dim);
    for r in 0..n {
        let row = input.row(r);
        for i in 0..out_dim {
            let w_row = layer.weights.row(i);
            let mut acc = layer.biases[i];
            for j in 0..in_dim {
                acc += w_row[j] * row[j];
            }
            data.push(acc);
        }
    }
    Matrix::from_raw(n, out_dim, data)
}

fn forward_internal(
    params: &MlpParams,
    spec: &MlpSpec,
    x: &Matrix,
    dropout_rate: f64,
    mut rng: Option<&mut RandomSource>,
    fixed_masks: Option<&[Option<Vec<f64>>]>,
) -> Result<(Vec<f64>, ForwardCache)> {
    spec.validate()?;
    if !params.matches_spec(spec) {
        return Err(Error::DimensionMismatch(
            "parameter shapes do not match the network spec".to_string(),
        ));
    }
    if x.cols() != spec.input_dim() {
        return Err(Error::DimensionMismatch(format!(
            "input has {} columns, network expects {}",
            x.cols(),
            spec.input_dim()
        )));
    }
    if !(0.0..1.0).contains(&dropout_rate) {
        return Err(Error::InvalidRange(format!(
            "dropout rate must be in [0,1), got {dropout_rate}"
        )));
    }
    let layer_count = spec.layer_count();
    let mut activations = vec![x.clone()];
    let mut zs = Vec::with_capacity(layer_count);
    let mut masks: Vec<Option<Vec<f64>>> = Vec::with_capacity(layer_count - 1);
    for l in 0..layer_count {
        let z = affine(&activations[l], &params.layers[l]);
        if l + 1 < layer_count {
            let mut a_data: Vec<f64> = z.data().iter().map(|&v| v.max(0.0)).collect();
            let mask = if let Some(fixed) = fixed_masks {
                fixed.get(l).cloned().flatten()
            } else if dropout_rate > 0.0 {
                let keep = 1.0 - dropout_rate;
                let rng = rng
                    .as_deref_mut()
                    .expect("train mode provides a random source");
                // Element-by-element draw in row-major order.
                Some(
                    (0..a_data.len())
                        .map(|_| if rng.next_f64() < keep { 1.0 / keep } else { 0.0 })
                        .collect::<Vec<f64>>(),
                )
            } else {
                None
            };
            if let Some(m) = &mask {
                if m.len() != a_data.len() {
                    return Err(Error::DimensionMismatch(format!(
                        "mask for layer {l} has {} entries, expected {}",
                        m.len(),
                        a_data.len()
                    )));
                }
                for (a, &m) in a_data.iter_mut().zip(m) {
                    *a *= m;
                }
            }
            masks.push(mask);
            activations.push(Matrix::from_raw(z.rows(), z.cols(), a_data));
        } else {
            let outputs: Vec<f64> = match spec.output_activation {
                OutputActivation::Linear => z.column(0),
                OutputActivation::Sigmoid => z.column(0).iter().map(|&v| sigmoid(v)).collect(),
            };
            zs.push(z);
            return Ok((
                outputs.clone(),
                ForwardCache {
                    activations,
                    zs,
                    masks,
                    outputs,
                    output_activation: spec.output_activation,
                    params_fingerprint: fingerprint(params),
                },
            ));
        }
        zs.push(z);
    }
    unreachable!("loop always returns at the output layer")
}

/// Runs the network on a batch. Train mode applies inverted dropout to the
/// hidden activations, drawing masks from the provided source; infer mode
/// is deterministic.
pub fn forward(
    params: &MlpParams,
    spec: &MlpSpec,
    x: &Matrix,
    mode: ForwardMode,
) -> Result<(Vec<f64>, ForwardCache)> {
    match mode {
        ForwardMode::Train { dropout_rate, rng } => {
            forward_internal(params, spec, x, dropout_rate, Some(rng), None)
        }
        ForwardMode::Infer => forward_internal(params, spec, x, 0.0, None, None),
    }
}

/// Forward pass with externally supplied dropout masks (one Option per
/// hidden layer, matrix-shaped row-major), so a stochastic pass can be
/// replayed exactly, e.g. for finite-difference gradient checks.
pub fn forward_with_masks(
    params: &MlpParams,
    spec: &MlpSpec,
    x: &Matrix,
    masks: &[Option<Vec<f64>>],
) -> Result<(Vec<f64>, ForwardCache)> {
    forward_internal(params, spec, x, 0.0, None, Some(masks))
}

/// Batch-mean squared error.
pub fn mse_loss(predictions: &[f64], targets: &[f64]) -> f64 {
    let n = predictions.len().max(1) as f64;
    predictions
        .iter()
        .zip(targets)
        .map(|(p, t)| (p - t).powi(2))
        .sum::<f64>()
        / n
}

/// Exact gradients of batch-mean squared error with respect to every weight
/// and bias, computed by backpropagation through the cached pass. The cache
/// must come from a forward call on exactly these parameters.
pub fn backward_gradients(
    params: &MlpParams,
    cache: &ForwardCache,
    y: &[f64],
) -> Result<MlpParams> {
    if fingerprint(params) != cache.params_fingerprint {
        return Err(Error::StaleCache(
            "parameters changed since the forward pass that built this cache".to_string(),
        ));
    }
    let n = cache.activations[0].rows();
    if y.len() != n {
        return Err(Error::DimensionMismatch(format!(
            "cache holds {n} rows, targets have {}",
            y.len()
        )));
    }
    let layer_count = params.layers.len();
    let sigmoid_head = cache.output_activation == OutputActivation::Sigmoid;
    // dL/dz at the output: 2(ŷ−y)/n, times σ' for a sigmoid head.
    let delta_data: Vec<f64> = cache
        .outputs
        .iter()
        .zip(y)
        .map(|(o, t)| {
            let g = 2.0 * (o - t) / n as f64;
            if sigmoid_head {
                g * o * (1.0 - o)
            } else {
                g
            }
        })
        .collect();
    let mut delta = Matrix::from_raw(n, 1, delta_data);
    let mut grads: Vec<LayerParams> = params
        .layers
        .iter()
        .map(|l| LayerParams {
            weights: Matrix::zeros(l.weights.rows(), l.weights.cols()),
            biases: vec![0.0; l.biases.len()],
        })
        .collect();
    for l in (0..layer_count).rev() {
        let input = &cache.activations[l];
        let out_dim = params.layers[l].weights.rows();
        let in_dim = params.layers[l].weights.cols();
        let g = &mut grads[l];
        for r in 0..n {
            let d_row = delta.row(r);
            let a_row = input.row(r);
            for i in 0..out_dim {
                let d = d_row[i];
                if d == 0.0 {
                    continue;
                }
                g.biases[i] += d;
                let base = i * in_dim;
                let w = g.weights.data_mut();
                for j in 0..in_dim {
                    w[base + j] += d * a_row[j];
                }
            }
        }
        if l > 0 {
            let prev_z = &cache.zs[l - 1];
            let mask = &cache.masks[l - 1];
            let prev_dim = prev_z.cols();
            let mut delta_data = vec![0.0; n * prev_dim];
            for r in 0..n {
                let d_row = delta.row(r);
                for j in 0..prev_dim {
                    let mut acc = 0.0;
                    for i in 0..out_dim {
                        acc += d_row[i] * params.layers[l].weights.get(i, j);
                    }
                    // ReLU subgradient (0 at the kink) times the dropout
                    // mask that scaled this activation.
                    if prev_z.get(r, j) <= 0.0 {
                        acc = 0.0;
                    } else if let Some(m) = mask {
                        acc *= m[r * prev_dim + j];
                    }
                    delta_data[r * prev_dim + j] = acc;
                }
            }
            delta = Matrix::from_raw(n, prev_dim, delta_data);
        }
    }
    Ok(MlpParams { layers: grads })
}

/// Min-max scale of the target used by the sigmoid output head.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetScale {
    pub min: f64,
    pub max: f64,
}

impl TargetScale {
    pub fn fit(y: &[f64]) -> Result<Self> {
        let min = y.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        if !(max > min) {
            return Err(Error::ZeroVariance);
        }
        Ok(Self { min, max })
    }

    pub fn scale(&self, v: f64) -> f64 {
        (v - self.min) / (self.max - self.min)
    }

    pub fn unscale(&self, v: f64) -> f64 {
        v * (self.max - self.min) + self.min
    }
}

/// Deterministic predictions in original target units (inverting the
/// sigmoid head's target scale when present).
pub fn predict(
    spec: &MlpSpec,
    params: &MlpParams,
    x: &Matrix,
    scale: Option<&TargetScale>,
) -> Result<Vec<f64>> {
    let (raw, _) = forward(params, spec, x, ForwardMode::Infer)?;
    Ok(match scale {
        Some(s) => raw.iter().map(|&v| s.unscale(v)).collect(),
        None => raw,
    })
}
