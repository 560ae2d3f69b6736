//! A small dense network: ReLU hidden layers, linear or softmax head,
//! hand-written backpropagation and Adam.

mod train;

pub use train::*;

use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::linalg::Matrix;
use crate::loss::{LossKind, LossSpec};
use crate::rng::seeded;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Head {
    Linear,
    Softmax,
}

/// Affine layer `x ↦ x·W + b` with `W` of shape `(in, out)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dense {
    pub weight: Matrix,
    pub bias: Vec<f64>,
}

impl Dense {
    pub fn zeros(inputs: usize, outputs: usize) -> Self {
        Self { weight: Matrix::zeros(inputs, outputs), bias: alloc::vec![0.0; outputs] }
    }

    pub fn inputs(&self) -> usize {
        self.weight.rows()
    }

    pub fn outputs(&self) -> usize {
        self.weight.cols()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Network {
    layers: Vec<Dense>,
    head: Head,
}

/// Gradient container with the network's shape.
pub type Gradients = Vec<Dense>;

impl Network {
    /// Glorot-uniform weights in `±√(6/(fan_in+fan_out))`, zero biases.
    pub fn new(layer_sizes: &[usize], head: Head, seed: u64) -> Result<Self> {
        check_sizes(layer_sizes)?;
        let mut rng = seeded(seed);
        let layers = layer_sizes
            .windows(2)
            .map(|w| {
                let limit = (6.0 / (w[0] + w[1]) as f64).sqrt();
                Dense {
                    weight: Matrix::from_fn(w[0], w[1], |_, _| rng.random_range(-limit..=limit)),
                    bias: alloc::vec![0.0; w[1]],
                }
            })
            .collect();
        Ok(Self { layers, head })
    }

    pub fn zeros(layer_sizes: &[usize], head: Head) -> Result<Self> {
        check_sizes(layer_sizes)?;
        Ok(Self { layers: layer_sizes.windows(2).map(|w| Dense::zeros(w[0], w[1])).collect(), head })
    }

    pub fn from_layers(layers: Vec<Dense>, head: Head) -> Result<Self> {
        if layers.is_empty() {
            return Err(invalid!("network needs at least one layer"));
        }
        for (i, l) in layers.iter().enumerate() {
            if l.bias.len() != l.outputs() {
                return Err(invalid!("layer {i}: bias length {} != outputs {}", l.bias.len(), l.outputs()));
            }
            if i > 0 && layers[i - 1].outputs() != l.inputs() {
                return Err(invalid!("layer {i}: input size does not match previous output"));
            }
            if !l.weight.is_finite() || l.bias.iter().any(|b| !b.is_finite()) {
                return Err(invalid!("layer {i}: parameters must be finite"));
            }
        }
        Ok(Self { layers, head })
    }

    pub fn layers(&self) -> &[Dense] {
        &self.layers
    }

    pub fn head(&self) -> Head {
        self.head
    }

    pub fn layer_sizes(&self) -> Vec<usize> {
        let mut sizes = alloc::vec![self.layers[0].inputs()];
        sizes.extend(self.layers.iter().map(Dense::outputs));
        sizes
    }

    pub fn input_size(&self) -> usize {
        self.layers[0].inputs()
    }

    pub fn output_size(&self) -> usize {
        self.layers[self.layers.len() - 1].outputs()
    }

    pub fn num_params(&self) -> usize {
        self.layers.iter().map(|l| l.weight.as_slice().len() + l.bias.len()).sum()
    }

    /// Parameters in checkpoint order: per layer, weights (row-major) then biases.
    pub fn params_flat(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.num_params());
        for l in &self.layers {
            out.extend_from_slice(l.weight.as_slice());
            out.extend_from_slice(&l.bias);
        }
        out
    }

    pub fn set_params_flat(&mut self, params: &[f64]) -> Result<()> {
        if params.len() != self.num_params() {
            return Err(invalid!("expected {} parameters, got {}", self.num_params(), params.len()));
        }
        if params.iter().any(|p| !p.is_finite()) {
            return Err(invalid!("parameters must be finite"));
        }
        let mut at = 0;
        for l in &mut self.layers {
            let w = l.weight.as_mut_slice();
            w.copy_from_slice(&params[at..at + w.len()]);
            at += w.len();
            let nb = l.bias.len();
            l.bias.copy_from_slice(&params[at..at + nb]);
            at += nb;
        }
        Ok(())
    }

    pub(crate) fn param_slices_mut(&mut self) -> Vec<&mut [f64]> {
        self.layers.iter_mut().flat_map(|l| [l.weight.as_mut_slice(), l.bias.as_mut_slice()]).collect()
    }

    pub fn zero_gradients(&self) -> Gradients {
        self.layers.iter().map(|l| Dense::zeros(l.inputs(), l.outputs())).collect()
    }

    /// Outputs of the head: logits for a linear head, probabilities for softmax.
    pub fn forward(&self, batch: &Matrix) -> Result<Matrix> {
        Ok(self.forward_cached(batch)?.output)
    }

    /// Forward pass keeping every layer input for backpropagation.
    pub fn forward_cached(&self, batch: &Matrix) -> Result<ForwardCache> {
        if batch.cols() != self.input_size() {
            return Err(invalid!("batch has {} columns, network expects {}", batch.cols(), self.input_size()));
        }
        let mut inputs = Vec::with_capacity(self.layers.len());
        let mut x = batch.clone();
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            let mut z = x.matmul(&layer.weight)?;
            for r in 0..z.rows() {
                for (v, b) in z.row_mut(r).iter_mut().zip(&layer.bias) {
                    *v += b;
                }
            }
            if i < last {
                z.as_mut_slice().iter_mut().for_each(|v| *v = v.max(0.0));
            }
            inputs.push(x);
            x = z;
        }
        let logits = x;
        let output = match self.head {
            Head::Linear => logits.clone(),
            Head::Softmax => softmax_rows(&logits),
        };
        Ok(ForwardCache { inputs, logits, output })
    }

    /// Backpropagates `d(objective)/d(logits)` through the network.
    pub fn backward_from_logits(&self, cache: &ForwardCache, dlogits: &Matrix) -> Result<Gradients> {
        if dlogits.rows() != cache.logits.rows() || dlogits.cols() != cache.logits.cols() {
            return Err(invalid!("upstream gradient shape does not match the logits"));
        }
        let mut grads = Vec::with_capacity(self.layers.len());
        let mut dz = dlogits.clone();
        for (i, layer) in self.layers.iter().enumerate().rev() {
            let x = &cache.inputs[i];
            let weight = x.t_matmul(&dz)?;
            let bias = dz.col_sums();
            if i > 0 {
                let mut dx = dz.matmul_t(&layer.weight)?;
                // x is the ReLU output of the previous layer; its derivative is 1 where x > 0.
                for (d, &v) in dx.as_mut_slice().iter_mut().zip(x.as_slice()) {
                    if v <= 0.0 {
                        *d = 0.0;
                    }
                }
                dz = dx;
            }
            grads.push(Dense { weight, bias });
        }
        grads.reverse();
        Ok(grads)
    }

    /// Mean batch loss and its exact gradient.
    pub fn loss_and_gradients(&self, batch: &Matrix, targets: &Targets<'_>, loss: &LossSpec) -> Result<(f64, Gradients)> {
        let cache = self.forward_cached(batch)?;
        let (value, dlogits) = loss_head_gradient(self.head, &cache, targets, loss)?;
        Ok((value, self.backward_from_logits(&cache, &dlogits)?))
    }

    pub fn backward(&self, batch: &Matrix, targets: &Targets<'_>, loss: &LossSpec) -> Result<Gradients> {
        Ok(self.loss_and_gradients(batch, targets, loss)?.1)
    }

    pub fn mean_loss(&self, batch: &Matrix, targets: &Targets<'_>, loss: &LossSpec) -> Result<f64> {
        let cache = self.forward_cached(batch)?;
        Ok(loss_head_gradient(self.head, &cache, targets, loss)?.0)
    }

    /// Per-row losses.
    pub fn losses(&self, batch: &Matrix, targets: &Targets<'_>, loss: &LossSpec) -> Result<Vec<f64>> {
        let cache = self.forward_cached(batch)?;
        targets.check(batch.rows(), self.output_size())?;
        (0..batch.rows()).map(|r| row_loss(self.head, &cache, targets, loss, r).map(|(v, _)| v)).collect()
    }

    pub fn predict_classes(&self, batch: &Matrix) -> Result<Vec<usize>> {
        let out = self.forward(batch)?;
        Ok(out.row_iter().map(crate::loss::argmax).collect())
    }
}

fn check_sizes(layer_sizes: &[usize]) -> Result<()> {
    if layer_sizes.len() < 2 || layer_sizes.contains(&0) {
        return Err(invalid!("layer sizes need at least two positive entries, got {layer_sizes:?}"));
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct ForwardCache {
    /// Input to every layer (post-activation of the previous one).
    pub inputs: Vec<Matrix>,
    pub logits: Matrix,
    pub output: Matrix,
}

/// Training targets, one per batch row.
#[derive(Debug, Clone, Copy)]
pub enum Targets<'a> {
    Classes(&'a [usize]),
    Values(&'a Matrix),
}

impl Targets<'_> {
    pub fn len(&self) -> usize {
        match self {
            Targets::Classes(c) => c.len(),
            Targets::Values(v) => v.rows(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn check(&self, rows: usize, outputs: usize) -> Result<()> {
        if self.len() != rows {
            return Err(invalid!("{} targets for {rows} rows", self.len()));
        }
        match self {
            Targets::Classes(c) if c.iter().any(|&y| y >= outputs) => {
                Err(invalid!("class label out of range for {outputs} outputs"))
            }
            Targets::Values(v) if v.cols() != outputs => {
                Err(invalid!("target width {} does not match {outputs} outputs", v.cols()))
            }
            _ => Ok(()),
        }
    }
}

pub fn softmax_rows(logits: &Matrix) -> Matrix {
    let mut out = logits.clone();
    for r in 0..out.rows() {
        let row = out.row_mut(r);
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mut total = 0.0;
        for v in row.iter_mut() {
            *v = (*v - max).exp();
            total += *v;
        }
        row.iter_mut().for_each(|v| *v /= total);
    }
    out
}

fn log_sum_exp(xs: &[f64]) -> f64 {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    max + xs.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Loss of one row and its gradient with respect to that row's logits.
fn row_loss(head: Head, cache: &ForwardCache, targets: &Targets<'_>, loss: &LossSpec, r: usize) -> Result<(f64, Vec<f64>)> {
    let logits = cache.logits.row(r);
    let out = cache.output.row(r);
    let k = logits.len();
    match (loss.kind, targets) {
        (LossKind::ClippedCrossEntropy, Targets::Classes(ys)) => {
            let y = ys[r];
            let nll = match head {
                Head::Softmax => log_sum_exp(logits) - logits[y],
                Head::Linear => {
                    let p = out[y];
                    if p > 0.0 { -p.ln() } else { f64::INFINITY }
                }
            };
            if nll >= loss.clip_m {
                return Ok((loss.clip_m, alloc::vec![0.0; k]));
            }
            let grad = match head {
                Head::Softmax => out.iter().enumerate().map(|(j, &p)| p - f64::from(u8::from(j == y))).collect(),
                Head::Linear => {
                    let mut g = alloc::vec![0.0; k];
                    g[y] = -1.0 / out[y];
                    g
                }
            };
            Ok((nll, grad))
        }
        (LossKind::ClippedSquared, Targets::Values(t)) => {
            let target = t.row(r);
            let diff: Vec<f64> = out.iter().zip(target).map(|(a, b)| a - b).collect();
            let sq: f64 = diff.iter().map(|d| d * d).sum();
            if sq >= loss.clip_m {
                return Ok((loss.clip_m, alloc::vec![0.0; k]));
            }
            let g_out: Vec<f64> = diff.iter().map(|d| 2.0 * d).collect();
            let grad = match head {
                Head::Linear => g_out,
                Head::Softmax => {
                    let dot: f64 = out.iter().zip(&g_out).map(|(p, g)| p * g).sum();
                    out.iter().zip(&g_out).map(|(p, g)| p * (g - dot)).collect()
                }
            };
            Ok((sq, grad))
        }
        (LossKind::ClippedSquared, Targets::Classes(ys)) => {
            // One-hot targets.
            let y = ys[r];
            let diff: Vec<f64> = out.iter().enumerate().map(|(j, a)| a - f64::from(u8::from(j == y))).collect();
            let sq: f64 = diff.iter().map(|d| d * d).sum();
            if sq >= loss.clip_m {
                return Ok((loss.clip_m, alloc::vec![0.0; k]));
            }
            let g_out: Vec<f64> = diff.iter().map(|d| 2.0 * d).collect();
            let grad = match head {
                Head::Linear => g_out,
                Head::Softmax => {
                    let dot: f64 = out.iter().zip(&g_out).map(|(p, g)| p * g).sum();
                    out.iter().zip(&g_out).map(|(p, g)| p * (g - dot)).collect()
                }
            };
            Ok((sq, grad))
        }
        (LossKind::ZeroOne, _) => Err(invalid!("the zero-one loss has no useful gradient")),
        (LossKind::ClippedCrossEntropy, Targets::Values(_)) => {
            Err(invalid!("cross-entropy needs class targets"))
        }
    }
}

fn loss_head_gradient(head: Head, cache: &ForwardCache, targets: &Targets<'_>, loss: &LossSpec) -> Result<(f64, Matrix)> {
    let rows = cache.logits.rows();
    targets.check(rows, cache.logits.cols())?;
    if rows == 0 {
        return Err(invalid!("empty batch"));
    }
    let scale = 1.0 / rows as f64;
    let mut dlogits = Matrix::zeros(rows, cache.logits.cols());
    let mut total = 0.0;
    for r in 0..rows {
        let (v, g) = row_loss(head, cache, targets, loss, r)?;
        total += v;
        for (d, gv) in dlogits.row_mut(r).iter_mut().zip(g) {
            *d = gv * scale;
        }
    }
    Ok((total * scale, dlogits))
}

/// Flat binary checkpoint: `u32` layer count, the layer sizes as `u32`, then
/// every parameter as `f64`, all little-endian, in [`Network::params_flat`] order.
pub fn checkpoint_bytes(net: &Network) -> Vec<u8> {
    let sizes = net.layer_sizes();
    let mut out = Vec::with_capacity(4 * (sizes.len() + 1) + 8 * net.num_params());
    out.extend_from_slice(&(sizes.len() as u32).to_le_bytes());
    for s in &sizes {
        out.extend_from_slice(&(*s as u32).to_le_bytes());
    }
    for p in net.params_flat() {
        out.extend_from_slice(&p.to_le_bytes());
    }
    out
}

/// Inverse of [`checkpoint_bytes`]; the head is not stored and must be supplied.
pub fn network_from_checkpoint(bytes: &[u8], head: Head) -> Result<Network> {
    let read_u32 = |at: usize| -> Result<u32> {
        bytes
            .get(at..at + 4)
            .map(|b| u32::from_le_bytes([b[0], b[1], b[2], b[3]]))
            .ok_or_else(|| invalid!("checkpoint truncated in header"))
    };
    let count = read_u32(0)? as usize;
    let sizes: Vec<usize> = (0..count).map(|i| read_u32(4 + 4 * i).map(|v| v as usize)).collect::<Result<_>>()?;
    let mut net = Network::zeros(&sizes, head)?;
    let start = 4 * (count + 1);
    let body = &bytes[start.min(bytes.len())..];
    if body.len() != 8 * net.num_params() {
        return Err(invalid!("checkpoint body has {} bytes, expected {}", body.len(), 8 * net.num_params()));
    }
    let params: Vec<f64> = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes([c[0], c[1], c[2], c[3], c[4], c[5], c[6], c[7]]))
        .collect();
    net.set_params_flat(&params)?;
    Ok(net)
}
