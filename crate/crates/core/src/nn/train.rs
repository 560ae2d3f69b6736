use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::{Gradients, Network, Targets};
use crate::error::{invalid, Error, Result};
use crate::linalg::Matrix;
use crate::loss::LossSpec;
use crate::rng::{derive_seed, permutation, seeded};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
    pub batch_size: usize,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self { learning_rate: 1e-3, beta1: 0.9, beta2: 0.999, epsilon: 1e-8, batch_size: 128, epochs: 10, seed: 0 }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.learning_rate >= 0.0) || !self.learning_rate.is_finite() {
            return Err(invalid!("learning rate must be finite and nonnegative"));
        }
        if !(self.beta1 > 0.0 && self.beta1 < 1.0 && self.beta2 > 0.0 && self.beta2 < 1.0) {
            return Err(invalid!("Adam betas must lie in (0, 1)"));
        }
        if !(self.epsilon > 0.0) {
            return Err(invalid!("epsilon must be positive"));
        }
        if self.batch_size == 0 {
            return Err(invalid!("batch size must be positive"));
        }
        Ok(())
    }
}

/// First and second moment estimates, one buffer per parameter slice.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
    t: u64,
}

impl AdamState {
    pub fn new(net: &Network) -> Self {
        let shapes: Vec<usize> =
            net.layers().iter().flat_map(|l| [l.weight.as_slice().len(), l.bias.len()]).collect();
        Self {
            m: shapes.iter().map(|&n| alloc::vec![0.0; n]).collect(),
            v: shapes.iter().map(|&n| alloc::vec![0.0; n]).collect(),
            t: 0,
        }
    }

    pub fn steps(&self) -> u64 {
        self.t
    }
}

/// One bias-corrected Adam update.
pub fn adam_step(net: &mut Network, grads: &Gradients, state: &mut AdamState, cfg: &TrainConfig) -> Result<()> {
    if grads.len() != net.layers().len() {
        return Err(invalid!("gradient has {} layers, network {}", grads.len(), net.layers().len()));
    }
    let grad_slices: Vec<&[f64]> = grads.iter().flat_map(|g| [g.weight.as_slice(), g.bias.as_slice()]).collect();
    let mut params = net.param_slices_mut();
    if params.len() != state.m.len() || params.iter().zip(&grad_slices).any(|(p, g)| p.len() != g.len()) {
        return Err(invalid!("gradient or optimizer state shape does not match the network"));
    }
    state.t += 1;
    let t = state.t as i32;
    let c1 = 1.0 - cfg.beta1.powi(t);
    let c2 = 1.0 - cfg.beta2.powi(t);
    for (k, (p, g)) in params.iter_mut().zip(&grad_slices).enumerate() {
        let (m, v) = (&mut state.m[k], &mut state.v[k]);
        for i in 0..p.len() {
            m[i] = cfg.beta1 * m[i] + (1.0 - cfg.beta1) * g[i];
            v[i] = cfg.beta2 * v[i] + (1.0 - cfg.beta2) * g[i] * g[i];
            let m_hat = m[i] / c1;
            let v_hat = v[i] / c2;
            p[i] -= cfg.learning_rate * m_hat / (v_hat.sqrt() + cfg.epsilon);
        }
    }
    Ok(())
}

/// Mini-batch Adam over `epochs` passes with a fresh permutation per epoch
/// drawn from `derive_seed(seed, epoch)`; the last partial batch is kept.
///
/// Returns the mean training loss before training and after every epoch.
pub fn train(net: &mut Network, inputs: &Matrix, targets: &Targets<'_>, cfg: &TrainConfig, loss: &LossSpec) -> Result<Vec<f64>> {
    cfg.validate()?;
    let n = inputs.rows();
    if n == 0 {
        return Err(invalid!("training set is empty"));
    }
    if targets.len() != n {
        return Err(invalid!("{} targets for {n} inputs", targets.len()));
    }
    let mut state = AdamState::new(net);
    let mut trace = alloc::vec![net.mean_loss(inputs, targets, loss)?];
    let mut step = 0usize;
    for epoch in 0..cfg.epochs {
        let order = permutation(&mut seeded(derive_seed(cfg.seed, epoch as u64)), n);
        for chunk in order.chunks(cfg.batch_size) {
            let xb = inputs.select_rows(chunk);
            let grads = match targets {
                Targets::Classes(c) => {
                    let yb: Vec<usize> = chunk.iter().map(|&i| c[i]).collect();
                    net.backward(&xb, &Targets::Classes(&yb), loss)?
                }
                Targets::Values(v) => {
                    let yb = v.select_rows(chunk);
                    net.backward(&xb, &Targets::Values(&yb), loss)?
                }
            };
            adam_step(net, &grads, &mut state, cfg)?;
            step += 1;
        }
        let value = net.mean_loss(inputs, targets, loss)?;
        trace.push(value);
        if !value.is_finite() || net.params_flat().iter().any(|p| !p.is_finite()) {
            return Err(Error::TrainingDiverged { step, trace });
        }
    }
    Ok(trace)
}
