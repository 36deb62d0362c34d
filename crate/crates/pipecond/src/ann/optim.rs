//! Parameter-update rules: Adam and SGD with momentum. Both are pure,
//! deterministic functions of (state, params, gradients).

use serde::{Deserialize, Serialize};

use super::{MlpParams, MlpSpec};

/// Which optimizer the training loop uses, with its hyperparameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum OptimizerKind {
    Adam {
        beta1: f64,
        beta2: f64,
        epsilon: f64,
    },
    SgdMomentum {
        momentum: f64,
    },
}

impl Default for OptimizerKind {
    fn default() -> Self {
        Self::Adam {
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// Adam moment estimates; shapes mirror the parameters.
#[derive(Debug, Clone)]
pub struct AdamState {
    pub m: MlpParams,
    pub v: MlpParams,
    pub t: u64,
}

impl AdamState {
    pub fn new(spec: &MlpSpec) -> Self {
        Self {
            m: MlpParams::zeros_like(spec),
            v: MlpParams::zeros_like(spec),
            t: 0,
        }
    }
}

/// One Adam update: m ← β₁m + (1−β₁)g, v ← β₂v + (1−β₂)g², then
/// bias-corrected m̂, v̂ (the step counter increments before correction)
/// and w ← w − η·m̂/(√v̂ + ε).
pub fn adam_step(
    state: &mut AdamState,
    params: &mut MlpParams,
    grads: &MlpParams,
    eta: f64,
    beta1: f64,
    beta2: f64,
    epsilon: f64,
) {
    state.t += 1;
    let bc1 = 1.0 - beta1.powi(state.t as i32);
    let bc2 = 1.0 - beta2.powi(state.t as i32);
    for (l, layer) in params.layers.iter_mut().enumerate() {
        let g_layer = &grads.layers[l];
        let m_layer = &mut state.m.layers[l];
        let v_layer = &mut state.v.layers[l];
        let w = layer.weights.data_mut();
        let gw = g_layer.weights.data();
        let mw = m_layer.weights.data_mut();
        let vw = v_layer.weights.data_mut();
        for i in 0..w.len() {
            mw[i] = beta1 * mw[i] + (1.0 - beta1) * gw[i];
            vw[i] = beta2 * vw[i] + (1.0 - beta2) * gw[i] * gw[i];
            let m_hat = mw[i] / bc1;
            let v_hat = vw[i] / bc2;
            w[i] -= eta * m_hat / (v_hat.sqrt() + epsilon);
        }
        for i in 0..layer.biases.len() {
            let g = g_layer.biases[i];
            m_layer.biases[i] = beta1 * m_layer.biases[i] + (1.0 - beta1) * g;
            v_layer.biases[i] = beta2 * v_layer.biases[i] + (1.0 - beta2) * g * g;
            let m_hat = m_layer.biases[i] / bc1;
            let v_hat = v_layer.biases[i] / bc2;
            layer.biases[i] -= eta * m_hat / (v_hat.sqrt() + epsilon);
        }
    }
}

/// Momentum velocity; shapes mirror the parameters.
#[derive(Debug, Clone)]
pub struct MomentumState {
    pub velocity: MlpParams,
}

impl MomentumState {
    pub fn new(spec: &MlpSpec) -> Self {
        Self {
            velocity: MlpParams::zeros_like(spec),
        }
    }
}

/// Classical momentum: v ← μv − ηg, w ← w + v.
pub fn sgd_momentum_step(
    state: &mut MomentumState,
    params: &mut MlpParams,
    grads: &MlpParams,
    eta: f64,
    momentum: f64,
) {
    for (l, layer) in params.layers.iter_mut().enumerate() {
        let g_layer = &grads.layers[l];
        let vel = &mut state.velocity.layers[l];
        let w = layer.weights.data_mut();
        let gw = g_layer.weights.data();
        let vw = vel.weights.data_mut();
        for i in 0..w.len() {
            vw[i] = momentum * vw[i] - eta * gw[i];
            w[i] += vw[i];
        }
        for i in 0..layer.biases.len() {
            vel.biases[i] = momentum * vel.biases[i] - eta * g_layer.biases[i];
            layer.biases[i] += vel.biases[i];
        }
    }
}

/// Internal dispatcher holding whichever state the configured optimizer
/// needs.
pub(super) enum OptimizerState {
    Adam {
        state: AdamState,
        beta1: f64,
        beta2: f64,
        epsilon: f64,
    },
    SgdMomentum {
        state: MomentumState,
        momentum: f64,
    },
}

impl OptimizerState {
    pub(super) fn new(kind: OptimizerKind, spec: &MlpSpec) -> Self {
        match kind {
            OptimizerKind::Adam {
                beta1,
                beta2,
                epsilon,
            } => Self::Adam {
                state: AdamState::new(spec),
                beta1,
                beta2,
                epsilon,
            },
            OptimizerKind::SgdMomentum { momentum } => Self::SgdMomentum {
                state: MomentumState::new(spec),
                momentum,
            },
        }
    }

    pub(super) fn step(&mut self, params: &mut MlpParams, grads: &MlpParams, eta: f64) {
        match self {
            Self::Adam {
                state,
                beta1,
                beta2,
                epsilon,
            } => adam_step(state, params, grads, eta, *beta1, *beta2, *epsilon),
            Self::SgdMomentum { state, momentum } => {
                sgd_momentum_step(state, params, grads, eta, *momentum)
            }
        }
    }
}
