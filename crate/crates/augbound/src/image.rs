//! The image bound experiment: data loading, cached cells run on a worker
//! pool, and the seed-averaged report.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use augbound_core::nn::{Head, Network};
use augbound_core::pipeline::{
    run_cell, summarize, synthetic_digits, CellRecord, ImageDataset, Projections, Split, StrengthRecord,
};
use serde::{Deserialize, Serialize};

use crate::cache::{cache_key, key_hex, Cache};
use crate::config::{DataConfig, DataSource, PipelineConfig};
use crate::error::{AppError, AppResult};
use crate::idx::load_image_dataset;
use crate::plot::{render, Panel, Series};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub config_hash: String,
    pub dataset: String,
    pub seeds: Vec<usize>,
    pub strengths: Vec<StrengthRecord>,
    pub spearman_strength_total: f64,
    pub spearman_pooled: f64,
    /// Sum of per-cell compute times, including cells served from the cache.
    pub wall_clock_seconds: f64,
    pub protocol_notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct CachedCell {
    record: CellRecord,
    compute_seconds: f64,
}

/// The pool that learners subsample from and the test set.
pub fn load_data(data: &DataConfig, test_size: usize) -> AppResult<(ImageDataset, ImageDataset)> {
    match data.source {
        DataSource::Synthetic => Ok((
            synthetic_digits(data.synthetic_pool_size, data.height, data.width, Split::Train, data.synthetic_seed)?,
            synthetic_digits(test_size, data.height, data.width, Split::Test, data.synthetic_seed)?,
        )),
        DataSource::Idx => {
            let need = |p: &Option<std::path::PathBuf>, what: &str| {
                p.clone().ok_or_else(|| AppError::Config(format!("pipeline.data.{what} is required for idx data")))
            };
            let train = load_image_dataset(
                &need(&data.train_images, "train_images")?,
                &need(&data.train_labels, "train_labels")?,
                "idx",
                Split::Train,
            )?;
            let test = load_image_dataset(
                &need(&data.test_images, "test_images")?,
                &need(&data.test_labels, "test_labels")?,
                "idx",
                Split::Test,
            )?;
            Ok((train, test))
        }
    }
}

#[derive(Serialize)]
struct KeyDoc<'a> {
    data: &'a DataConfig,
    experiment: &'a augbound_core::pipeline::ExperimentConfig,
}

/// Runs every `(strength, seed)` cell on `jobs` threads, reusing cached cells.
pub fn run_image_bound(cfg: &PipelineConfig, jobs: usize) -> AppResult<RunReport> {
    let exp = &cfg.experiment;
    exp.validate()?;
    let (pool, test) = load_data(&cfg.data, exp.test_size)?;
    let doc = KeyDoc { data: &cfg.data, experiment: exp };
    let config_hash = cache_key(&doc, "")?;
    let cache = cfg.cache_dir.as_deref().map(Cache::open).transpose()?;

    let cells: Vec<(f64, usize)> =
        exp.strengths.iter().flat_map(|&s| (0..exp.num_seeds).map(move |k| (s, k))).collect();
    let keys: Vec<u64> =
        cells.iter().map(|(s, k)| cache_key(&doc, &format!("strength={s};seed={k}"))).collect::<AppResult<_>>()?;
    let mut results: Vec<Option<CachedCell>> = keys.iter().map(|&k| cache.as_ref().and_then(|c| c.get(k))).collect();

    let pending: Vec<usize> = (0..cells.len()).filter(|&i| results[i].is_none()).collect();
    if !pending.is_empty() {
        let sizes = exp.layer_sizes(pool.height * pool.width, pool.num_classes);
        let num_params = Network::zeros(&sizes, Head::Softmax)?.num_params();
        let proj = Projections::new(exp, pool.height * pool.width, num_params)?;
        let next = AtomicUsize::new(0);
        let out: Mutex<Vec<(usize, AppResult<CachedCell>)>> = Mutex::new(Vec::new());
        std::thread::scope(|scope| {
            for _ in 0..jobs.clamp(1, pending.len()) {
                scope.spawn(|| loop {
                    let k = next.fetch_add(1, Ordering::Relaxed);
                    let Some(&i) = pending.get(k) else { break };
                    let (strength, seed) = cells[i];
                    let start = Instant::now();
                    let result = run_cell(exp, &pool, &test, &proj, strength, seed)
                        .map_err(AppError::from)
                        .map(|record| CachedCell { record, compute_seconds: start.elapsed().as_secs_f64() });
                    if let (Ok(c), Some(cache)) = (&result, &cache) {
                        if let Err(e) = cache.put(keys[i], c) {
                            out.lock().expect("poisoned").push((i, Err(e)));
                            continue;
                        }
                    }
                    out.lock().expect("poisoned").push((i, result));
                });
            }
        });
        for (i, r) in out.into_inner().expect("poisoned") {
            results[i] = Some(r?);
        }
    }

    let done: Vec<CachedCell> = results.into_iter().map(|c| c.expect("every cell computed")).collect();
    let records: Vec<CellRecord> = done.iter().map(|c| c.record.clone()).collect();
    let summary = summarize(exp, &records)?;
    Ok(RunReport {
        config_hash: key_hex(config_hash),
        dataset: pool.name.clone(),
        seeds: summary.seeds,
        strengths: summary.records,
        spearman_strength_total: summary.spearman_strength_total,
        spearman_pooled: summary.spearman_pooled,
        wall_clock_seconds: done.iter().map(|c| c.compute_seconds).sum(),
        protocol_notes: vec![
            format!(
                "desk scale: {} training items, {} test items, {} augmentations, {} learner runs per cell, {} seeds",
                exp.train_subset_size, exp.test_size, exp.n_augment, exp.num_model_runs, exp.num_seeds
            ),
            format!(
                "information terms pooled over {} probe positions and all runs; the pooled value fills each per-sample entry",
                exp.probe_samples
            ),
            "empirical gap and bound use the same clipped cross-entropy; R = clip_m / 2".into(),
        ],
    })
}

pub const IMAGE_CSV_HEADER: &str = "strength,empirical_gap,kl_hat,per_sample_mi,aug_mi,term1,term2,term3,total";

/// Seed-averaged values per strength.
pub fn image_csv(report: &RunReport) -> String {
    let mut out = String::from(IMAGE_CSV_HEADER);
    out.push('\n');
    for r in &report.strengths {
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        let b = &r.bound;
        let fields = [
            r.strength,
            r.empirical_gap,
            r.kl_hat,
            mean(&r.per_sample_mi_hats),
            mean(&r.aug_mi_hats),
            b.term1,
            b.term2,
            b.term3,
            b.total,
        ];
        out.push_str(&fields.iter().map(f64::to_string).collect::<Vec<_>>().join(","));
        out.push('\n');
    }
    out
}

pub fn image_svg(report: &RunReport) -> String {
    let series = |name: &str, f: &dyn Fn(&StrengthRecord) -> f64| Series {
        name: name.into(),
        points: report.strengths.iter().map(|r| (r.strength, f(r))).collect(),
    };
    let bound = Panel {
        title: "bound and empirical gap".into(),
        x_label: "strength".into(),
        series: vec![series("bound total", &|r| r.bound.total), series("empirical gap", &|r| r.empirical_gap)],
    };
    let terms = Panel {
        title: "bound terms".into(),
        x_label: "strength".into(),
        series: vec![
            series("KL", &|r| r.bound.term1),
            series("per-sample MI", &|r| r.bound.term2),
            series("augmentation MI", &|r| r.bound.term3),
        ],
    };
    render(&[vec![bound, terms]])
}
