//! Sample-based estimators of the information quantities: MINE for mutual
//! information, a discriminator density-ratio estimator for KL, and the
//! plug-in estimator on count tables.

use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::Matrix;
use crate::nn::{adam_step, AdamState, Dense, Head, Network, TrainConfig};
use crate::rng::{derive_seed, permutation, seeded, standard_normal};
use crate::stats::{auc, log_mean_exp};

/// Minimum number of pairs accepted by [`mine_estimate`].
pub const MINE_MIN_PAIRS: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MineConfig {
    pub hidden_units: usize,
    pub hidden_layers: usize,
    pub learning_rate: f64,
    pub steps: usize,
    pub batch_size: usize,
    /// Decay of the moving average used in the denominator gradient.
    pub ema_decay: f64,
    /// Fraction of pairs held out for the final estimate.
    pub holdout_fraction: f64,
    /// Independent shuffles of the held-out set used for the marginal term.
    pub eval_shuffles: usize,
    pub seed: u64,
}

impl Default for MineConfig {
    fn default() -> Self {
        Self {
            hidden_units: 128,
            hidden_layers: 2,
            learning_rate: 1e-3,
            steps: 300,
            batch_size: 256,
            ema_decay: 0.99,
            holdout_fraction: 0.2,
            eval_shuffles: 8,
            seed: 0,
        }
    }
}

impl MineConfig {
    fn validate(&self) -> Result<()> {
        if self.steps == 0 || self.batch_size < 2 || self.hidden_units == 0 || self.eval_shuffles == 0 {
            return Err(invalid!("MINE needs steps >= 1, batch_size >= 2, hidden_units >= 1, eval_shuffles >= 1"));
        }
        if !(self.ema_decay > 0.0 && self.ema_decay < 1.0) {
            return Err(invalid!("ema_decay must lie in (0, 1)"));
        }
        if !(self.holdout_fraction > 0.0 && self.holdout_fraction < 1.0) {
            return Err(invalid!("holdout_fraction must lie in (0, 1)"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MineEstimate {
    /// Donsker–Varadhan value on the held-out pairs (nats).
    pub mi_hat: f64,
    /// Training-batch objective after every step.
    pub trace: Vec<f64>,
    pub train_pairs: usize,
    pub eval_pairs: usize,
}

/// Per-column mean and scale from the given rows; constant columns get scale 1.
#[derive(Debug, Clone, PartialEq)]
struct Standardizer {
    mean: Vec<f64>,
    scale: Vec<f64>,
}

impl Standardizer {
    fn fit(x: &Matrix, rows: &[usize]) -> Self {
        let d = x.cols();
        let n = rows.len() as f64;
        let mut mean = alloc::vec![0.0; d];
        for &r in rows {
            for (m, v) in mean.iter_mut().zip(x.row(r)) {
                *m += v / n;
            }
        }
        let mut var = alloc::vec![0.0; d];
        for &r in rows {
            for ((s, v), m) in var.iter_mut().zip(x.row(r)).zip(&mean) {
                *s += (v - m) * (v - m) / n;
            }
        }
        let scale = var.into_iter().map(|v| if v > 1e-24 { v.sqrt() } else { 1.0 }).collect();
        Self { mean, scale }
    }

    fn apply(&self, row: &[f64], out: &mut [f64]) {
        for (((o, v), m), s) in out.iter_mut().zip(row).zip(&self.mean).zip(&self.scale) {
            *o = (v - m) / s;
        }
    }
}

fn statistics_network(inputs: usize, hidden_units: usize, hidden_layers: usize, seed: u64) -> Result<Network> {
    let mut sizes = alloc::vec![inputs];
    sizes.extend(core::iter::repeat_n(hidden_units, hidden_layers));
    sizes.push(1);
    // A zero output layer starts every score at 0, which is the right answer
    // when the inputs carry no signal.
    let mut layers = Network::new(&sizes, Head::Linear, seed)?.layers().to_vec();
    if let Some(last) = layers.last_mut() {
        *last = Dense::zeros(last.weight.rows(), 1);
    }
    Network::from_layers(layers, Head::Linear)
}

/// Builds the `[x_i, y_{pair(i)}]` input rows, standardized.
fn paired_inputs(
    x: &Matrix,
    y: &Matrix,
    sx: &Standardizer,
    sy: &Standardizer,
    xs: &[usize],
    ys: &[usize],
) -> Matrix {
    let (dx, dy) = (x.cols(), y.cols());
    let mut out = Matrix::zeros(xs.len(), dx + dy);
    for (r, (&i, &j)) in xs.iter().zip(ys).enumerate() {
        let row = out.row_mut(r);
        sx.apply(x.row(i), &mut row[..dx]);
        sy.apply(y.row(j), &mut row[dx..]);
    }
    out
}

fn column(m: &Matrix) -> Vec<f64> {
    m.as_slice().to_vec()
}

/// MINE with the Donsker–Varadhan objective `mean_P T − log mean_Q e^T`.
///
/// Rows of `x` and `y` are paired draws from the joint. Product-of-marginals
/// samples come from shuffling `y` within each batch. The network is trained on
/// a split of the pairs and the returned estimate is the objective on the
/// held-out remainder, with the marginal term pooled over several shuffles.
pub fn mine_estimate(x: &Matrix, y: &Matrix, cfg: &MineConfig) -> Result<MineEstimate> {
    cfg.validate()?;
    let n = x.rows();
    if y.rows() != n {
        return Err(invalid!("x has {n} rows but y has {}", y.rows()));
    }
    if n < MINE_MIN_PAIRS {
        return Err(invalid!("MINE needs at least {MINE_MIN_PAIRS} pairs, got {n}"));
    }
    let order = permutation(&mut seeded(derive_seed(cfg.seed, 0)), n);
    let n_eval = ((n as f64 * cfg.holdout_fraction).round() as usize).clamp(2, n - 2);
    let (eval_idx, train_idx) = order.split_at(n_eval);
    let sx = Standardizer::fit(x, train_idx);
    let sy = Standardizer::fit(y, train_idx);

    let mut net = statistics_network(x.cols() + y.cols(), cfg.hidden_units, cfg.hidden_layers, derive_seed(cfg.seed, 1))?;
    let adam = TrainConfig { learning_rate: cfg.learning_rate, ..TrainConfig::default() };
    let mut state = AdamState::new(&net);
    let mut rng = seeded(derive_seed(cfg.seed, 2));
    let batch = cfg.batch_size.min(train_idx.len());
    let mut log_ema: Option<f64> = None;
    let mut trace = Vec::with_capacity(cfg.steps);
    let mut epoch_order: Vec<usize> = Vec::new();
    let mut cursor = 0;

    for step in 0..cfg.steps {
        if cursor + batch > epoch_order.len() {
            epoch_order = permutation(&mut rng, train_idx.len()).into_iter().map(|i| train_idx[i]).collect();
            cursor = 0;
        }
        let b = &epoch_order[cursor..cursor + batch];
        cursor += batch;
        let shuffled: Vec<usize> = permutation(&mut rng, batch).into_iter().map(|k| b[k]).collect();

        let joint_in = paired_inputs(x, y, &sx, &sy, b, b);
        let marg_in = paired_inputs(x, y, &sx, &sy, b, &shuffled);
        let cj = net.forward_cached(&joint_in)?;
        let cm = net.forward_cached(&marg_in)?;
        let tj = column(&cj.logits);
        let tm = column(&cm.logits);
        let lme = log_mean_exp(&tm);
        let objective = crate::stats::mean(&tj) - lme;
        trace.push(objective);
        if !objective.is_finite() {
            return Err(Error::TrainingDiverged { step, trace });
        }
        let updated = match log_ema {
            None => lme,
            Some(prev) => {
                // log(decay·e^prev + (1 − decay)·e^lme)
                let (a, c) = (prev + cfg.ema_decay.ln(), lme + (1.0 - cfg.ema_decay).ln());
                let hi = a.max(c);
                hi + ((a - hi).exp() + (c - hi).exp()).ln()
            }
        };
        log_ema = Some(updated);

        // Gradients of the negated objective with respect to T.
        let bf = batch as f64;
        let dj = Matrix::from_vec(batch, 1, alloc::vec![-1.0 / bf; batch])?;
        let dm = Matrix::from_vec(batch, 1, tm.iter().map(|&t| (t - updated).exp() / bf).collect())?;
        let mut grads = net.backward_from_logits(&cj, &dj)?;
        let gm = net.backward_from_logits(&cm, &dm)?;
        for (g, h) in grads.iter_mut().zip(&gm) {
            for (a, b) in g.weight.as_mut_slice().iter_mut().zip(h.weight.as_slice()) {
                *a += b;
            }
            for (a, b) in g.bias.iter_mut().zip(&h.bias) {
                *a += b;
            }
        }
        adam_step(&mut net, &grads, &mut state, &adam)?;
    }

    let joint_eval = paired_inputs(x, y, &sx, &sy, eval_idx, eval_idx);
    let tj = column(&net.forward(&joint_eval)?);
    let mut tm = Vec::with_capacity(n_eval * cfg.eval_shuffles);
    let mut eval_rng = seeded(derive_seed(cfg.seed, 3));
    for _ in 0..cfg.eval_shuffles {
        let shuffled: Vec<usize> = permutation(&mut eval_rng, n_eval).into_iter().map(|k| eval_idx[k]).collect();
        tm.extend(column(&net.forward(&paired_inputs(x, y, &sx, &sy, eval_idx, &shuffled))?));
    }
    let mi_hat = crate::stats::mean(&tj) - log_mean_exp(&tm);
    if !mi_hat.is_finite() {
        return Err(Error::TrainingDiverged { step: cfg.steps, trace });
    }
    Ok(MineEstimate { mi_hat, trace, train_pairs: train_idx.len(), eval_pairs: n_eval })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Calibration {
    None,
    /// Shifts the log-ratio so that its exponential averages to one under P.
    LogitSymmetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiscriminatorConfig {
    pub hidden_units: usize,
    pub hidden_layers: usize,
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    /// Cross-fitting folds; each fold is held out once.
    pub folds: usize,
    pub calibration: Calibration,
    pub seed: u64,
}

impl Default for DiscriminatorConfig {
    fn default() -> Self {
        Self {
            hidden_units: 16,
            hidden_layers: 1,
            learning_rate: 1e-3,
            epochs: 20,
            batch_size: 128,
            folds: 5,
            calibration: Calibration::None,
            seed: 0,
        }
    }
}

/// AUC above which the classes count as separable.
pub const SEPARABLE_AUC: f64 = 0.999;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityRatioEstimate {
    /// Estimate of `KL(P ‖ Q)` in nats.
    pub kl_hat: f64,
    /// Held-out AUC of the discriminator score for Q against P.
    pub auc: f64,
    /// Set when the classes are (nearly) separable and the estimate is unbounded in effect.
    pub unreliable: bool,
    pub trace: Vec<f64>,
}

fn sigmoid(s: f64) -> f64 {
    if s >= 0.0 {
        1.0 / (1.0 + (-s).exp())
    } else {
        let e = s.exp();
        e / (1.0 + e)
    }
}

/// `log(1 + e^s)` without overflow.
fn softplus(s: f64) -> f64 {
    if s > 0.0 { s + (-s).exp().ln_1p() } else { s.exp().ln_1p() }
}

/// KL(P ‖ Q) by the density-ratio trick: a discriminator `D(x) = P(class Q | x)`
/// is trained with logistic loss and the estimate is the mean over held-out P
/// samples of `log((1 − D)/D)`, corrected for unequal class sizes.
///
/// Both sample sets are split into `folds` parts. Each part is scored by a
/// discriminator trained on the others, so every P sample contributes to the
/// estimate exactly once. The AUC is computed from the pooled held-out scores.
/// Sets of equal size share one fold assignment, so when row `i` of `q` is a
/// transformed copy of row `i` of `p` the two are always held out together.
pub fn density_ratio_kl(p: &Matrix, q: &Matrix, cfg: &DiscriminatorConfig) -> Result<DensityRatioEstimate> {
    if p.cols() != q.cols() {
        return Err(invalid!("sample sets have different widths"));
    }
    if cfg.epochs == 0 || cfg.batch_size == 0 || cfg.hidden_units == 0 {
        return Err(invalid!("epochs, batch size and hidden units must be positive"));
    }
    if cfg.folds < 2 {
        return Err(invalid!("need at least 2 folds"));
    }
    if p.rows() < 2 * cfg.folds || q.rows() < 2 * cfg.folds {
        return Err(invalid!("each sample set needs at least two rows per fold"));
    }
    let fold_of = |n: usize, stream: u64| {
        let order = permutation(&mut seeded(derive_seed(cfg.seed, stream)), n);
        let mut fold = alloc::vec![0usize; n];
        for (k, &i) in order.iter().enumerate() {
            fold[i] = k % cfg.folds;
        }
        fold
    };
    let p_fold = fold_of(p.rows(), 0);
    let q_fold = fold_of(q.rows(), 0);

    let mut log_ratio_qp = Vec::with_capacity(p.rows());
    let (mut scores_p, mut scores_q) = (Vec::with_capacity(p.rows()), Vec::with_capacity(q.rows()));
    let mut trace = Vec::with_capacity(cfg.epochs * cfg.folds);
    for f in 0..cfg.folds {
        let pick = |fold: &[usize], held: bool| -> Vec<usize> {
            (0..fold.len()).filter(|&i| (fold[i] == f) == held).collect()
        };
        let (p_train, q_train) = (pick(&p_fold, false), pick(&q_fold, false));
        let (p_eval, q_eval) = (pick(&p_fold, true), pick(&q_fold, true));
        let fold_seed = derive_seed(cfg.seed, 10 + f as u64);
        let (net, std, fold_trace) = train_discriminator(p, q, &p_train, &q_train, cfg, fold_seed)?;
        trace.extend(fold_trace);
        let sp = column(&net.forward(&standardize_rows(p, &p_eval, &std))?);
        let sq = column(&net.forward(&standardize_rows(q, &q_eval, &std))?);
        // The logit estimates log(n_q q / (n_p p)).
        let prior = (q_train.len() as f64 / p_train.len() as f64).ln();
        log_ratio_qp.extend(sp.iter().map(|s| s - prior));
        scores_p.extend(sp);
        scores_q.extend(sq);
    }
    let shift = match cfg.calibration {
        Calibration::None => 0.0,
        Calibration::LogitSymmetric => -log_mean_exp(&log_ratio_qp),
    };
    let kl_hat = -crate::stats::mean(&log_ratio_qp) - shift;
    let auc_value = auc(&scores_p, &scores_q);
    Ok(DensityRatioEstimate { kl_hat, auc: auc_value, unreliable: auc_value > SEPARABLE_AUC, trace })
}

fn standardize_rows(src: &Matrix, rows: &[usize], std: &Standardizer) -> Matrix {
    let mut m = Matrix::zeros(rows.len(), src.cols());
    for (r, &i) in rows.iter().enumerate() {
        std.apply(src.row(i), m.row_mut(r));
    }
    m
}

fn train_discriminator(
    p: &Matrix,
    q: &Matrix,
    p_train: &[usize],
    q_train: &[usize],
    cfg: &DiscriminatorConfig,
    seed: u64,
) -> Result<(Network, Standardizer, Vec<f64>)> {
    // Pooled training rows: P first (label 0), then Q (label 1).
    let mut pooled = Matrix::zeros(p_train.len() + q_train.len(), p.cols());
    for (r, &i) in p_train.iter().enumerate() {
        pooled.row_mut(r).copy_from_slice(p.row(i));
    }
    for (r, &i) in q_train.iter().enumerate() {
        pooled.row_mut(p_train.len() + r).copy_from_slice(q.row(i));
    }
    let all: Vec<usize> = (0..pooled.rows()).collect();
    let std = Standardizer::fit(&pooled, &all);
    let train_x = standardize_rows(&pooled, &all, &std);
    let labels: Vec<f64> = (0..pooled.rows()).map(|r| f64::from(u8::from(r >= p_train.len()))).collect();

    let mut net = statistics_network(p.cols(), cfg.hidden_units, cfg.hidden_layers, derive_seed(seed, 0))?;
    let adam = TrainConfig { learning_rate: cfg.learning_rate, ..TrainConfig::default() };
    let mut state = AdamState::new(&net);
    let mut trace = Vec::with_capacity(cfg.epochs);
    for epoch in 0..cfg.epochs {
        let order = permutation(&mut seeded(derive_seed(seed, 1 + epoch as u64)), pooled.rows());
        let mut epoch_loss = 0.0;
        for chunk in order.chunks(cfg.batch_size) {
            let cache = net.forward_cached(&train_x.select_rows(chunk))?;
            let bf = chunk.len() as f64;
            let mut d = Matrix::zeros(chunk.len(), 1);
            for (r, &i) in chunk.iter().enumerate() {
                let s = cache.logits[(r, 0)];
                let y = labels[i];
                epoch_loss += softplus(s) - y * s;
                d[(r, 0)] = (sigmoid(s) - y) / bf;
            }
            let grads = net.backward_from_logits(&cache, &d)?;
            adam_step(&mut net, &grads, &mut state, &adam)?;
        }
        let mean_loss = epoch_loss / pooled.rows() as f64;
        trace.push(mean_loss);
        if !mean_loss.is_finite() {
            return Err(Error::TrainingDiverged { step: epoch, trace });
        }
    }
    Ok((net, std, trace))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlugInEstimate {
    pub mi_hat: f64,
    /// `(K_x + K_y − K_xy − 1)/(2N)` with `K` the number of occupied cells.
    pub miller_madow_correction: f64,
}

/// Plug-in MI of the empirical joint of a count table.
pub fn plug_in_mi_discrete(counts: &[Vec<u64>]) -> Result<PlugInEstimate> {
    let cols = counts.first().map_or(0, Vec::len);
    if cols == 0 || counts.iter().any(|r| r.len() != cols) {
        return Err(invalid!("count table must be a nonempty rectangle"));
    }
    let total: u64 = counts.iter().flatten().sum();
    if total == 0 {
        return Err(invalid!("count table is all zero"));
    }
    let n = total as f64;
    let joint = Matrix::from_fn(counts.len(), cols, |i, j| counts[i][j] as f64 / n);
    let mi_hat = crate::discrete::mi_unchecked(&joint);
    let occupied = |v: Vec<f64>| v.iter().filter(|&&p| p > 0.0).count() as f64;
    let kx = occupied(joint.row_sums());
    let ky = occupied(joint.col_sums());
    let kxy = joint.as_slice().iter().filter(|&&p| p > 0.0).count() as f64;
    Ok(PlugInEstimate { mi_hat, miller_madow_correction: (kx + ky - kxy - 1.0) / (2.0 * n) })
}

/// Fixed Gaussian projection `x ↦ x·P` with `P_{ij} ~ N(0, 1/out)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomProjection {
    pub matrix: Matrix,
}

impl RandomProjection {
    pub fn new(inputs: usize, outputs: usize, seed: u64) -> Result<Self> {
        if inputs == 0 || outputs == 0 {
            return Err(invalid!("projection sizes must be positive"));
        }
        let mut rng = seeded(seed);
        let scale = 1.0 / (outputs as f64).sqrt();
        Ok(Self { matrix: Matrix::from_fn(inputs, outputs, |_, _| scale * standard_normal(&mut rng)) })
    }

    pub fn project(&self, x: &Matrix) -> Result<Matrix> {
        x.matmul(&self.matrix)
    }
}

/// Pairs whose second coordinate is an independent copy, for zero-MI checks.
pub fn independent_pairs<R: Rng + ?Sized>(rng: &mut R, n: usize, dx: usize, dy: usize) -> (Matrix, Matrix) {
    let x = Matrix::from_fn(n, dx, |_, _| standard_normal(rng));
    let y = Matrix::from_fn(n, dy, |_, _| standard_normal(rng));
    (x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::correlated_pairs;
    use alloc::vec;

    #[test]
    fn plug_in_examples() {
        let r = plug_in_mi_discrete(&[vec![40, 10], vec![10, 40]]).unwrap();
        assert!((r.mi_hat - 0.192745).abs() < 5e-7);
        let r = plug_in_mi_discrete(&[vec![6, 14], vec![24, 56]]).unwrap();
        assert!(r.mi_hat.abs() < 1e-15);
        let r = plug_in_mi_discrete(&[vec![0, 7], vec![0, 0]]).unwrap();
        assert_eq!(r.mi_hat, 0.0);
        assert!(plug_in_mi_discrete(&[vec![0, 0]]).is_err());
    }

    #[test]
    fn projection_shapes() {
        let p = RandomProjection::new(10, 4, 1).unwrap();
        let x = Matrix::from_fn(3, 10, |r, c| (r + c) as f64);
        assert_eq!(p.project(&x).unwrap().cols(), 4);
        assert_eq!(p, RandomProjection::new(10, 4, 1).unwrap());
    }

    #[test]
    fn mine_small_gaussian() {
        let (x, y) = correlated_pairs(&mut seeded(1), 4000, 1, 0.8);
        let cfg = MineConfig { hidden_units: 32, steps: 400, batch_size: 256, seed: 3, ..MineConfig::default() };
        let est = mine_estimate(&x, &y, &cfg).unwrap();
        let truth = -0.5 * (1.0f64 - 0.64).ln();
        assert!(est.mi_hat > 0.5 * truth && est.mi_hat < truth + 0.1, "{}", est.mi_hat);
        let again = mine_estimate(&x, &y, &cfg).unwrap();
        assert_eq!(est, again);
        assert!(mine_estimate(&Matrix::zeros(10, 1), &Matrix::zeros(10, 1), &cfg).is_err());
    }

    #[test]
    fn discriminator_flags_separable() {
        let mut rng = seeded(2);
        let p = Matrix::from_fn(400, 1, |_, _| standard_normal(&mut rng) * 0.1 - 5.0);
        let q = Matrix::from_fn(400, 1, |_, _| standard_normal(&mut rng) * 0.1 + 5.0);
        let cfg = DiscriminatorConfig { epochs: 10, ..DiscriminatorConfig::default() };
        let est = density_ratio_kl(&p, &q, &cfg).unwrap();
        assert!(est.unreliable && est.auc > 0.999);
    }
}
