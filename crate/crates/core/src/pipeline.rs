//! Augmented datasets, empirical gaps and the per-cell image bound.
//!
//! A cell is one `(strength, seed)` pair. It trains `T` learners on seeded
//! subsamples of a pool, estimates the three information quantities and
//! assembles the per-sample bound. Cells are pure functions of their inputs so
//! the caller can run them concurrently and cache them by key.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bound::{assemble_bound_thm4, clamp_information, BoundReport};
use crate::error::{invalid, Result};
use crate::estimators::{density_ratio_kl, mine_estimate, DiscriminatorConfig, MineConfig, RandomProjection};
use crate::geometry::{apply_affine_into, sample_transform, AugmentationPolicy, TransformParams};
use crate::linalg::Matrix;
use crate::loss::LossSpec;
use crate::nn::{train, Head, Network, Targets, TrainConfig};
use crate::rng::{derive_path, derive_seed, permutation, seeded, standard_normal};
use crate::stats::{mean, spearman};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

/// Images flattened row-major into the rows of `images`, pixels in `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageDataset {
    pub name: String,
    pub split: Split,
    pub height: usize,
    pub width: usize,
    pub images: Matrix,
    pub labels: Vec<usize>,
    pub num_classes: usize,
    /// Stable item identifiers; augmentation streams are keyed by them.
    pub ids: Vec<u64>,
}

impl ImageDataset {
    pub fn new(
        name: &str,
        split: Split,
        height: usize,
        width: usize,
        images: Matrix,
        labels: Vec<usize>,
        num_classes: usize,
    ) -> Result<Self> {
        let ids = (0..labels.len() as u64).collect();
        Self::with_ids(name, split, height, width, images, labels, num_classes, ids)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn with_ids(
        name: &str,
        split: Split,
        height: usize,
        width: usize,
        images: Matrix,
        labels: Vec<usize>,
        num_classes: usize,
        ids: Vec<u64>,
    ) -> Result<Self> {
        if images.rows() != labels.len() || ids.len() != labels.len() {
            return Err(invalid!("{} images, {} labels, {} ids", images.rows(), labels.len(), ids.len()));
        }
        if images.cols() != height * width || height == 0 || width == 0 {
            return Err(invalid!("image rows have {} pixels, expected {height} x {width}", images.cols()));
        }
        if num_classes == 0 || labels.iter().any(|&l| l >= num_classes) {
            return Err(invalid!("labels must lie in [0, {num_classes})"));
        }
        if images.as_slice().iter().any(|v| !(0.0..=1.0).contains(v)) {
            return Err(invalid!("pixel values must lie in [0, 1]"));
        }
        Ok(Self { name: name.into(), split, height, width, images, labels, num_classes, ids })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Rows `indices` in the given order; ids travel with their items.
    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        if indices.iter().any(|&i| i >= self.len()) {
            return Err(invalid!("subset index out of range"));
        }
        Ok(Self {
            name: self.name.clone(),
            split: self.split,
            height: self.height,
            width: self.width,
            images: self.images.select_rows(indices),
            labels: indices.iter().map(|&i| self.labels[i]).collect(),
            num_classes: self.num_classes,
            ids: indices.iter().map(|&i| self.ids[i]).collect(),
        })
    }
}

// Seven-segment strokes in a unit box, y pointing down.
const SEGMENTS: [[f64; 4]; 7] = [
    [0.0, 0.0, 1.0, 0.0], // top
    [1.0, 0.0, 1.0, 0.5], // upper right
    [1.0, 0.5, 1.0, 1.0], // lower right
    [0.0, 1.0, 1.0, 1.0], // bottom
    [0.0, 0.5, 0.0, 1.0], // lower left
    [0.0, 0.0, 0.0, 0.5], // upper left
    [0.0, 0.5, 1.0, 0.5], // middle
];

const DIGIT_SEGMENTS: [u8; 10] = [
    0b0111111, 0b0000110, 0b1011011, 0b1001111, 0b1100110, 0b1101101, 0b1111101, 0b0000111, 0b1111111, 0b1101111,
];

fn segment_distance(px: f64, py: f64, [ax, ay, bx, by]: [f64; 4]) -> f64 {
    let (dx, dy) = (bx - ax, by - ay);
    let len2 = dx * dx + dy * dy;
    let t = if len2 > 0.0 { (((px - ax) * dx + (py - ay) * dy) / len2).clamp(0.0, 1.0) } else { 0.0 };
    let (qx, qy) = (ax + t * dx - px, ay + t * dy - py);
    (qx * qx + qy * qy).sqrt()
}

fn render_digit<R: Rng + ?Sized>(rng: &mut R, digit: usize, height: usize, width: usize, out: &mut [f64]) {
    let (h, w) = (height as f64, width as f64);
    let box_w = w * rng.random_range(0.32..0.48);
    let box_h = h * rng.random_range(0.55..0.70);
    let cx = 0.5 * (w - 1.0) + rng.random_range(-0.07..0.07) * w;
    let cy = 0.5 * (h - 1.0) + rng.random_range(-0.07..0.07) * h;
    let slant = rng.random_range(-0.25..0.25);
    let half_width = rng.random_range(0.7..1.4) * w / 28.0;
    let intensity = rng.random_range(0.8..1.0);
    let strokes: Vec<[f64; 4]> = (0..7)
        .filter(|&s| DIGIT_SEGMENTS[digit] >> s & 1 == 1)
        .map(|s| {
            let [ax, ay, bx, by] = SEGMENTS[s];
            let place = |x: f64, y: f64| {
                let py = cy + (y - 0.5) * box_h;
                (cx + (x - 0.5) * box_w - slant * (py - cy), py)
            };
            let (ax, ay) = place(ax, ay);
            let (bx, by) = place(bx, by);
            [ax, ay, bx, by]
        })
        .collect();
    for r in 0..height {
        for c in 0..width {
            let d = strokes.iter().map(|&s| segment_distance(c as f64, r as f64, s)).fold(f64::INFINITY, f64::min);
            out[r * width + c] = ((half_width + 0.5 - d).clamp(0.0, 1.0)) * intensity;
        }
    }
}

/// Seeded digit-like images: slanted seven-segment glyphs with random size,
/// position, stroke width and intensity on a zero background. Item `i` of a
/// split depends only on `(seed, split, i)`.
pub fn synthetic_digits(count: usize, height: usize, width: usize, split: Split, seed: u64) -> Result<ImageDataset> {
    if height < 8 || width < 8 {
        return Err(invalid!("synthetic digits need at least 8 x 8 pixels"));
    }
    let tag = match split {
        Split::Train => 0,
        Split::Test => 1,
    };
    let mut images = Matrix::zeros(count, height * width);
    let mut labels = Vec::with_capacity(count);
    let mut ids = Vec::with_capacity(count);
    for i in 0..count {
        let mut rng = seeded(derive_path(seed, &[tag, i as u64]));
        let digit = rng.random_range(0..10);
        render_digit(&mut rng, digit, height, width, images.row_mut(i));
        labels.push(digit);
        ids.push((tag << 32) | i as u64);
    }
    ImageDataset::with_ids("synthetic-digits", split, height, width, images, labels, 10, ids)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    /// Row of the source item in the dataset that was augmented.
    pub item: usize,
    pub id: u64,
    /// Augmentation index in `[0, n)`.
    pub j: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentedDataset {
    pub height: usize,
    pub width: usize,
    /// Row `i·n + j` holds augmentation `j` of item `i`.
    pub images: Matrix,
    pub labels: Vec<usize>,
    pub provenance: Vec<Provenance>,
    pub params: Vec<TransformParams>,
    pub n_augment: usize,
}

impl AugmentedDataset {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// The `m·n` augmented training set. Item `i` draws its `n` transforms from a
/// stream keyed by `(seed, id_i)`, so augmenting a subset equals taking the
/// matching rows of the augmented full set.
pub fn build_augmented_dataset(ds: &ImageDataset, policy: &AugmentationPolicy, seed: u64) -> Result<AugmentedDataset> {
    let (n, len) = (policy.n_augment, ds.height * ds.width);
    let rows = ds.len() * n;
    let mut images = Matrix::zeros(rows, len);
    let mut labels = Vec::with_capacity(rows);
    let mut provenance = Vec::with_capacity(rows);
    let mut params = Vec::with_capacity(rows);
    for i in 0..ds.len() {
        let mut rng = seeded(derive_path(seed, &[ds.ids[i]]));
        for j in 0..n {
            let p = sample_transform(policy, ds.height, ds.width, &mut rng);
            apply_affine_into(ds.images.row(i), ds.height, ds.width, &p, images.row_mut(i * n + j))?;
            labels.push(ds.labels[i]);
            provenance.push(Provenance { item: i, id: ds.ids[i], j });
            params.push(p);
        }
    }
    Ok(AugmentedDataset { height: ds.height, width: ds.width, images, labels, provenance, params, n_augment: n })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub train_loss: f64,
    pub test_loss: f64,
    pub gap: f64,
}

/// Test loss minus the average loss over the augmented training items.
pub fn empirical_gap(
    net: &Network,
    train_inputs: &Matrix,
    train_labels: &[usize],
    test_inputs: &Matrix,
    test_labels: &[usize],
    loss: &LossSpec,
) -> Result<GapReport> {
    if train_labels.is_empty() || test_labels.is_empty() {
        return Err(invalid!("gap needs nonempty train and test sets"));
    }
    let train_loss = net.mean_loss(train_inputs, &Targets::Classes(train_labels), loss)?;
    let test_loss = net.mean_loss(test_inputs, &Targets::Classes(test_labels), loss)?;
    Ok(GapReport { train_loss, test_loss, gap: test_loss - train_loss })
}

/// Numerical settings of the image experiment. Data sources live with the caller.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub train_subset_size: usize,
    pub test_size: usize,
    pub strengths: Vec<f64>,
    pub n_augment: usize,
    pub hidden_sizes: Vec<usize>,
    pub train: TrainConfig,
    pub mine: MineConfig,
    pub discriminator: DiscriminatorConfig,
    pub num_seeds: usize,
    pub num_model_runs: usize,
    pub clip_m: f64,
    /// Training positions whose MI terms are estimated (pooled over runs).
    pub probe_samples: usize,
    /// Original/augmented pairs fed to the KL discriminator.
    pub kl_samples: usize,
    pub image_projection_dim: usize,
    pub param_projection_dim: usize,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            train_subset_size: 2000,
            test_size: 2000,
            strengths: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            n_augment: 10,
            hidden_sizes: vec![100],
            train: TrainConfig { epochs: 5, ..TrainConfig::default() },
            mine: MineConfig::default(),
            discriminator: DiscriminatorConfig::default(),
            num_seeds: 5,
            num_model_runs: 20,
            clip_m: 10.0,
            probe_samples: 50,
            kl_samples: 2000,
            image_projection_dim: 64,
            param_projection_dim: 32,
            seed: 0,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.strengths.is_empty() || self.strengths.iter().any(|s| !(0.0..=1.0).contains(s)) {
            return Err(invalid!("strengths must be a nonempty subset of [0, 1]"));
        }
        if self.num_seeds == 0 || self.num_model_runs == 0 || self.n_augment == 0 {
            return Err(invalid!("num_seeds, num_model_runs and n_augment must be positive"));
        }
        if self.probe_samples == 0 || self.probe_samples > self.train_subset_size {
            return Err(invalid!("probe_samples must lie in [1, train_subset_size]"));
        }
        if self.test_size == 0 || self.kl_samples < 2 * self.discriminator.folds {
            return Err(invalid!("test_size must be positive and kl_samples at least two per fold"));
        }
        if self.image_projection_dim == 0 || self.param_projection_dim == 0 {
            return Err(invalid!("projection dimensions must be positive"));
        }
        if !(self.clip_m > 0.0) {
            return Err(invalid!("clip_m must be positive"));
        }
        self.train.validate()
    }

    /// Network layer sizes for `pixels` inputs and `classes` outputs.
    pub fn layer_sizes(&self, pixels: usize, classes: usize) -> Vec<usize> {
        let mut sizes = vec![pixels];
        sizes.extend_from_slice(&self.hidden_sizes);
        sizes.push(classes);
        sizes
    }
}

/// Fixed projections shared by every cell of an experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct Projections {
    pub image: RandomProjection,
    pub params: RandomProjection,
}

impl Projections {
    pub fn new(cfg: &ExperimentConfig, pixels: usize, num_params: usize) -> Result<Self> {
        Ok(Self {
            image: RandomProjection::new(pixels, cfg.image_projection_dim, derive_seed(cfg.seed, 1))?,
            params: RandomProjection::new(num_params, cfg.param_projection_dim, derive_seed(cfg.seed, 2))?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CellRecord {
    pub strength: f64,
    pub seed_index: usize,
    pub train_loss: f64,
    pub test_loss: f64,
    pub empirical_gap: f64,
    pub kl_hat: f64,
    pub kl_auc: f64,
    pub per_sample_mi_hat: f64,
    pub aug_mi_hat: f64,
    pub bound: BoundReport,
    pub diagnostics: Vec<String>,
}

fn repeat_rows(rows: &[&[f64]], times: usize) -> Matrix {
    let cols = rows.first().map_or(0, |r| r.len());
    let mut m = Matrix::zeros(rows.len() * times, cols);
    for (k, r) in rows.iter().enumerate() {
        for t in 0..times {
            m.row_mut(k * times + t).copy_from_slice(r);
        }
    }
    m
}

/// One `(strength, seed)` cell.
///
/// Per-sample MI is estimated by MINE on `(projected Z_i, projected W)` pooled
/// over the probe positions and the `T` runs; augmentation MI on
/// `(transform parameters, [projected W, projected Z_i])` pooled the same way.
/// Pooled values fill every probe entry of the bound.
pub fn run_cell(
    cfg: &ExperimentConfig,
    pool: &ImageDataset,
    test: &ImageDataset,
    proj: &Projections,
    strength: f64,
    seed_index: usize,
) -> Result<CellRecord> {
    cfg.validate()?;
    if pool.len() < cfg.train_subset_size.max(cfg.kl_samples) || test.len() < cfg.test_size {
        return Err(invalid!("pool or test set is smaller than the configured sizes"));
    }
    let policy = AugmentationPolicy::new(strength, cfg.n_augment)?;
    let loss = LossSpec::clipped_cross_entropy(cfg.clip_m)?;
    // Strength is not part of the stream: cells at different strengths share
    // subsamples, initializations and transform uniforms.
    let cell_seed = derive_path(cfg.seed, &[seed_index as u64]);
    let test = test.subset(&(0..cfg.test_size).collect::<Vec<_>>())?;
    let sizes = cfg.layer_sizes(pool.height * pool.width, pool.num_classes);
    let (m, n, p, runs) = (cfg.train_subset_size, cfg.n_augment, cfg.probe_samples, cfg.num_model_runs);

    let mut gaps = Vec::with_capacity(runs);
    let mut z_proj = Matrix::zeros(p * runs, cfg.image_projection_dim);
    let mut w_proj = Matrix::zeros(runs, cfg.param_projection_dim);
    let mut g_params = Matrix::zeros(p * n * runs, 3);
    for t in 0..runs {
        let run_seed = derive_path(cell_seed, &[t as u64]);
        let order = permutation(&mut seeded(derive_seed(run_seed, 0)), pool.len());
        let subset = pool.subset(&order[..m])?;
        let aug = build_augmented_dataset(&subset, &policy, derive_seed(run_seed, 1))?;
        let mut net = Network::new(&sizes, Head::Softmax, derive_seed(run_seed, 2))?;
        let train_cfg = TrainConfig { seed: derive_seed(run_seed, 3), ..cfg.train };
        train(&mut net, &aug.images, &Targets::Classes(&aug.labels), &train_cfg, &loss)?;
        gaps.push(empirical_gap(&net, &aug.images, &aug.labels, &test.images, &test.labels, &loss)?);

        let flat = net.params_flat();
        let w = proj.params.project(&Matrix::from_vec(1, flat.len(), flat)?)?;
        w_proj.row_mut(t).copy_from_slice(w.row(0));
        let probes = subset.images.select_rows(&(0..p).collect::<Vec<_>>());
        let zp = proj.image.project(&probes)?;
        for i in 0..p {
            z_proj.row_mut(t * p + i).copy_from_slice(zp.row(i));
            for j in 0..n {
                let a = aug.params[i * n + j].to_array();
                g_params.row_mut((t * p + i) * n + j).copy_from_slice(&a);
            }
        }
    }

    let mut diagnostics = Vec::new();
    // Per-sample pairs: row t·p + i holds (Z_i of run t, W of run t).
    let w_rows: Vec<&[f64]> = (0..runs).map(|t| w_proj.row(t)).collect();
    let w_per_probe = repeat_rows(&w_rows, p);
    let mine_cfg = |stream: u64| MineConfig { seed: derive_seed(cell_seed, stream), ..cfg.mine };
    let per_sample = mine_estimate(&z_proj, &w_per_probe, &mine_cfg(10))?.mi_hat;

    let wz = w_per_probe.hstack(&z_proj)?;
    let wz_rows: Vec<&[f64]> = (0..wz.rows()).map(|r| wz.row(r)).collect();
    let aug_mi = mine_estimate(&g_params, &repeat_rows(&wz_rows, n), &mine_cfg(11))?.mi_hat;

    // KL between original and augmented images on a separate draw from the pool.
    let kl_order = permutation(&mut seeded(derive_seed(cell_seed, 20)), pool.len());
    let originals = pool.subset(&kl_order[..cfg.kl_samples])?;
    let single = AugmentationPolicy::new(strength, 1)?;
    let shifted = build_augmented_dataset(&originals, &single, derive_seed(cell_seed, 21))?;
    let disc = DiscriminatorConfig { seed: derive_seed(cell_seed, 22), ..cfg.discriminator };
    let kl = density_ratio_kl(&proj.image.project(&originals.images)?, &proj.image.project(&shifted.images)?, &disc)?;
    if kl.unreliable {
        diagnostics.push(format!("kl discriminator separates the samples (auc {:.4}); estimate is a lower bound in effect", kl.auc));
    }
    for (name, v) in [("kl", kl.kl_hat), ("per-sample mi", per_sample), ("augmentation mi", aug_mi)] {
        if v < 0.0 {
            diagnostics.push(format!("{name} estimate {v:.5} clamped to 0"));
        }
    }

    let bound = assemble_bound_thm4(
        cfg.clip_m / 2.0,
        clamp_information(kl.kl_hat)?,
        &vec![clamp_information(per_sample)?; p],
        &vec![vec![clamp_information(aug_mi)?; n]; p],
    )?;
    let train_loss = mean(&gaps.iter().map(|g| g.train_loss).collect::<Vec<_>>());
    let test_loss = mean(&gaps.iter().map(|g| g.test_loss).collect::<Vec<_>>());
    Ok(CellRecord {
        strength,
        seed_index,
        train_loss,
        test_loss,
        empirical_gap: test_loss - train_loss,
        kl_hat: kl.kl_hat,
        kl_auc: kl.auc,
        per_sample_mi_hat: per_sample,
        aug_mi_hat: aug_mi,
        bound,
        diagnostics,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrengthRecord {
    pub strength: f64,
    /// Seed averages.
    pub empirical_gap: f64,
    pub kl_hat: f64,
    /// One pooled estimate per seed (raw, before clamping).
    pub per_sample_mi_hats: Vec<f64>,
    pub aug_mi_hats: Vec<f64>,
    /// Bound from the seed-averaged clamped information values.
    pub bound: BoundReport,
    pub seed_totals: Vec<f64>,
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub records: Vec<StrengthRecord>,
    pub seeds: Vec<usize>,
    /// Spearman correlation of strength with the seed-averaged bound total.
    pub spearman_strength_total: f64,
    /// Same correlation over all `(strength, seed)` cells.
    pub spearman_pooled: f64,
}

/// Groups cells by strength (in the order of `strengths`) and averages over seeds.
pub fn summarize(cfg: &ExperimentConfig, cells: &[CellRecord]) -> Result<RunSummary> {
    let mut records = Vec::with_capacity(cfg.strengths.len());
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for &s in &cfg.strengths {
        let mut group: Vec<&CellRecord> = cells.iter().filter(|c| c.strength == s).collect();
        group.sort_by_key(|c| c.seed_index);
        if group.is_empty() {
            return Err(invalid!("no cells for strength {s}"));
        }
        let avg = |f: &dyn Fn(&CellRecord) -> f64| mean(&group.iter().map(|c| f(c)).collect::<Vec<_>>());
        let clamp_avg = |f: &dyn Fn(&CellRecord) -> f64| -> Result<f64> {
            let v: Result<Vec<f64>> = group.iter().map(|c| clamp_information(f(c))).collect();
            Ok(mean(&v?))
        };
        let (p, n) = (cfg.probe_samples, cfg.n_augment);
        let bound = assemble_bound_thm4(
            cfg.clip_m / 2.0,
            clamp_avg(&|c| c.kl_hat)?,
            &vec![clamp_avg(&|c| c.per_sample_mi_hat)?; p],
            &vec![vec![clamp_avg(&|c| c.aug_mi_hat)?; n]; p],
        )?;
        for c in &group {
            xs.push(s);
            ys.push(c.bound.total);
        }
        let mut diagnostics: Vec<String> = Vec::new();
        for c in &group {
            for d in &c.diagnostics {
                diagnostics.push(format!("seed {}: {d}", c.seed_index));
            }
        }
        records.push(StrengthRecord {
            strength: s,
            empirical_gap: avg(&|c| c.empirical_gap),
            kl_hat: avg(&|c| c.kl_hat),
            per_sample_mi_hats: group.iter().map(|c| c.per_sample_mi_hat).collect(),
            aug_mi_hats: group.iter().map(|c| c.aug_mi_hat).collect(),
            seed_totals: group.iter().map(|c| c.bound.total).collect(),
            bound,
            diagnostics,
        });
    }
    let strengths: Vec<f64> = records.iter().map(|r| r.strength).collect();
    let totals: Vec<f64> = records.iter().map(|r| r.bound.total).collect();
    let mut seeds: Vec<usize> = cells.iter().map(|c| c.seed_index).collect();
    seeds.sort_unstable();
    seeds.dedup();
    Ok(RunSummary {
        records,
        seeds,
        spearman_strength_total: spearman(&strengths, &totals),
        spearman_pooled: spearman(&xs, &ys),
    })
}

/// Gaussian noise images for tests that need data without structure.
pub fn noise_images(count: usize, height: usize, width: usize, seed: u64) -> Result<ImageDataset> {
    let mut rng = seeded(seed);
    let images = Matrix::from_fn(count, height * width, |_, _| (0.5 + 0.15 * standard_normal(&mut rng)).clamp(0.0, 1.0));
    let labels = (0..count).map(|_| rng.random_range(0..10)).collect();
    ImageDataset::new("noise", Split::Train, height, width, images, labels, 10)
}

#[cfg(test)]
mod tests;
