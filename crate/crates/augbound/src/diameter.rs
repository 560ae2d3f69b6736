//! Group diameter estimates for the identity, a fixed translation, a rotation
//! of the unit disk and the image policy across strengths.

use augbound_core::geometry::{
    circle_rotation_diameter_quadrature, group_diameter, AugmentationPolicy, IdentityAction, ImageAction,
    PlanarRotation, Translation,
};
use augbound_core::linalg::Matrix;
use augbound_core::pipeline::{synthetic_digits, ImageDataset, Split};
use augbound_core::rng::{derive_seed, seeded};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::{DataConfig, DataSource, DiameterConfig};
use crate::error::AppResult;
use crate::idx::load_image_dataset;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageDiameter {
    pub delta_hat: f64,
    pub strength: f64,
    pub metric: String,
    pub num_points: usize,
    pub inner_mc: usize,
    pub argmax_point_id: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiameterReport {
    pub identity: f64,
    pub translation: f64,
    pub translation_norm: f64,
    pub disk_rotation: f64,
    pub disk_rotation_quadrature: f64,
    /// Max over dataset images; this is the gated estimate.
    pub image: Vec<ImageDiameter>,
    pub image_monotone: bool,
    /// Max over uniform-noise images of the same shape, for comparison.
    pub image_domain: Vec<ImageDiameter>,
    pub image_domain_monotone: bool,
    pub pass: bool,
}

fn dataset_points(cfg: &DiameterConfig, data: &DataConfig) -> AppResult<ImageDataset> {
    match data.source {
        DataSource::Synthetic => {
            Ok(synthetic_digits(cfg.num_points, data.height, data.width, Split::Train, data.synthetic_seed)?)
        }
        DataSource::Idx => {
            let missing = || crate::AppError::Config("pipeline.data.train_images and train_labels are required".into());
            let images = data.train_images.as_deref().ok_or_else(missing)?;
            let labels = data.train_labels.as_deref().ok_or_else(missing)?;
            let all = load_image_dataset(images, labels, "idx", Split::Train)?;
            let n = cfg.num_points.min(all.len());
            Ok(all.subset(&(0..n).collect::<Vec<_>>())?)
        }
    }
}

fn noise_points(count: usize, height: usize, width: usize, seed: u64) -> AppResult<ImageDataset> {
    let mut rng = seeded(seed);
    let images = Matrix::from_fn(count, height * width, |_, _| rng.random_range(0.0..1.0));
    Ok(ImageDataset::new("uniform-noise", Split::Train, height, width, images, vec![0; count], 1)?)
}

fn image_sweep(cfg: &DiameterConfig, points: &ImageDataset, seed: u64) -> AppResult<(Vec<ImageDiameter>, bool)> {
    let rows: Vec<&[f64]> = (0..points.len()).map(|i| points.images.row(i)).collect();
    let mut image = Vec::with_capacity(cfg.strengths.len());
    for &s in &cfg.strengths {
        let action = ImageAction { policy: AugmentationPolicy::new(s, 1)?, height: points.height, width: points.width };
        // Same stream at every strength, so the transforms differ only in scale.
        let d = group_diameter(&action, &rows, cfg.inner_mc, seed)?;
        image.push(ImageDiameter {
            delta_hat: d.delta_hat,
            strength: s,
            metric: d.metric_name,
            num_points: d.num_points,
            inner_mc: d.num_inner_mc,
            argmax_point_id: points.ids[d.argmax_point_id],
        });
    }
    let mut by_strength: Vec<&ImageDiameter> = image.iter().collect();
    by_strength.sort_by(|a, b| a.strength.total_cmp(&b.strength));
    let monotone = by_strength.windows(2).all(|w| w[1].delta_hat >= w[0].delta_hat);
    Ok((image, monotone))
}

/// Tolerance on the disk rotation estimate.
pub const DISK_TOLERANCE: f64 = 1e-3;

pub fn run_diameter(cfg: &DiameterConfig, data: &DataConfig) -> AppResult<DiameterReport> {
    let seed = cfg.seed;
    // Small integer points keep `(z + τ) − z = τ` exact.
    let grid: Vec<Vec<f64>> = (0..5).map(|i| (0..cfg.translation.len()).map(|j| f64::from(i * 3 + j as i32)).collect()).collect();
    let refs: Vec<&[f64]> = grid.iter().map(Vec::as_slice).collect();
    let identity = group_diameter(&IdentityAction, &refs, cfg.inner_mc, derive_seed(seed, 1))?.delta_hat;
    let translation =
        group_diameter(&Translation { tau: cfg.translation.clone() }, &refs, cfg.inner_mc, derive_seed(seed, 2))?.delta_hat;
    let translation_norm = cfg.translation.iter().map(|t| t * t).sum::<f64>().sqrt();

    let disk: Vec<Vec<f64>> = [0.25, 0.5, 0.75, 1.0].iter().map(|&r| vec![r, 0.0]).collect();
    let disk_refs: Vec<&[f64]> = disk.iter().map(Vec::as_slice).collect();
    let rotation = PlanarRotation { max_angle: std::f64::consts::PI };
    let disk_rotation = group_diameter(&rotation, &disk_refs, cfg.rotation_inner_mc, derive_seed(seed, 3))?.delta_hat;
    let disk_rotation_quadrature = circle_rotation_diameter_quadrature();

    let points = dataset_points(cfg, data)?;
    let (image, image_monotone) = image_sweep(cfg, &points, derive_seed(seed, 4))?;
    let noise = noise_points(points.len(), points.height, points.width, derive_seed(seed, 5))?;
    let (image_domain, image_domain_monotone) = image_sweep(cfg, &noise, derive_seed(seed, 6))?;
    let pass = identity == 0.0
        && translation == translation_norm
        && (disk_rotation - disk_rotation_quadrature).abs() <= DISK_TOLERANCE
        && image_monotone;
    Ok(DiameterReport {
        identity,
        translation,
        translation_norm,
        disk_rotation,
        disk_rotation_quadrature,
        image,
        image_monotone,
        image_domain,
        image_domain_monotone,
        pass,
    })
}
