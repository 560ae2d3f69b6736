//! The JSON configuration document and `--set key.path=value` overrides.

use std::path::{Path, PathBuf};

use augbound_core::estimators::{DiscriminatorConfig, MineConfig};
use augbound_core::gaussian::GaussianSetting;
use augbound_core::pipeline::ExperimentConfig;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{read_file, AppError, AppResult};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GaussianSweepConfig {
    pub base: GaussianSetting,
    pub t2_grid: Vec<f64>,
    pub n_grid: Vec<usize>,
    pub m_grid: Vec<usize>,
    /// Bound scale; `None` uses `clip_m / 2` of the base setting.
    pub r: Option<f64>,
    pub svg: bool,
}

impl Default for GaussianSweepConfig {
    fn default() -> Self {
        Self {
            base: GaussianSetting::new(1, 10, 4, 1.0, 1.0, 0.01),
            t2_grid: vec![0.0, 0.1, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0],
            n_grid: (1..=10).collect(),
            m_grid: vec![5, 10, 50],
            r: None,
            svg: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiscreteSuiteConfig {
    pub seed: u64,
    /// Worlds, pairs or chains per check.
    pub trials: usize,
}

impl Default for DiscreteSuiteConfig {
    fn default() -> Self {
        Self { seed: 0, trials: 1000 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DataSource {
    /// Seeded seven-segment digits generated in memory.
    Synthetic,
    /// Four IDX files.
    Idx,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DataConfig {
    pub source: DataSource,
    pub train_images: Option<PathBuf>,
    pub train_labels: Option<PathBuf>,
    pub test_images: Option<PathBuf>,
    pub test_labels: Option<PathBuf>,
    pub synthetic_pool_size: usize,
    pub synthetic_seed: u64,
    pub height: usize,
    pub width: usize,
}

impl Default for DataConfig {
    fn default() -> Self {
        Self {
            source: DataSource::Synthetic,
            train_images: None,
            train_labels: None,
            test_images: None,
            test_labels: None,
            synthetic_pool_size: 10_000,
            synthetic_seed: 0,
            height: 28,
            width: 28,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub data: DataConfig,
    pub experiment: ExperimentConfig,
    pub cache_dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiameterConfig {
    pub strengths: Vec<f64>,
    pub num_points: usize,
    pub inner_mc: usize,
    /// Draws per point for the rotation of the unit disk.
    pub rotation_inner_mc: usize,
    pub translation: Vec<f64>,
    pub seed: u64,
}

impl Default for DiameterConfig {
    fn default() -> Self {
        Self {
            strengths: vec![0.0, 0.25, 0.5, 0.75, 1.0],
            num_points: 200,
            inner_mc: 20,
            rotation_inner_mc: 1_000_000,
            translation: vec![3.0, 4.0],
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelftestConfig {
    pub pairs: usize,
    pub mine_seeds: usize,
    pub rho: f64,
    pub mine: MineConfig,
    pub discriminator: DiscriminatorConfig,
    pub seed: u64,
}

impl Default for SelftestConfig {
    fn default() -> Self {
        Self {
            pairs: 10_000,
            mine_seeds: 5,
            rho: 0.5,
            mine: MineConfig::default(),
            discriminator: DiscriminatorConfig::default(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub gaussian: GaussianSweepConfig,
    pub discrete: DiscreteSuiteConfig,
    pub pipeline: PipelineConfig,
    pub diameter: DiameterConfig,
    pub selftest: SelftestConfig,
}

fn config_err(msg: impl Into<String>) -> AppError {
    AppError::Config(msg.into())
}

/// Sets `path` (dot separated) in `doc`. Every segment must already exist,
/// except that a `null` optional field may be replaced. The value is read as
/// JSON when it parses and as a string otherwise.
pub fn set_path(doc: &mut Value, path: &str, raw: &str) -> AppResult<()> {
    let mut node = doc;
    for key in path.split('.') {
        node = match node {
            Value::Object(map) => map.get_mut(key).ok_or_else(|| config_err(format!("unknown key '{key}' in '{path}'")))?,
            Value::Array(items) => {
                let i: usize = key.parse().map_err(|_| config_err(format!("'{key}' is not an index in '{path}'")))?;
                let len = items.len();
                items.get_mut(i).ok_or_else(|| config_err(format!("index {i} out of range ({len}) in '{path}'")))?
            }
            _ => return Err(config_err(format!("'{path}' goes below a scalar"))),
        };
    }
    *node = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_owned()));
    Ok(())
}

pub fn apply_overrides(config: &Config, sets: &[String]) -> AppResult<Config> {
    let mut doc = serde_json::to_value(config)?;
    for item in sets {
        let (path, raw) = item.split_once('=').ok_or_else(|| config_err(format!("override '{item}' is not KEY=VALUE")))?;
        set_path(&mut doc, path.trim(), raw.trim())?;
    }
    serde_json::from_value(doc).map_err(|e| config_err(format!("after overrides: {e}")))
}

/// Defaults, then the file (if any), then the overrides.
pub fn load_config(path: Option<&Path>, sets: &[String]) -> AppResult<Config> {
    let base = match path {
        Some(p) => {
            let bytes = read_file(p).map_err(|e| config_err(e.to_string()))?;
            serde_json::from_slice(&bytes).map_err(|e| config_err(format!("{}: {e}", p.display())))?
        }
        None => Config::default(),
    };
    apply_overrides(&base, sets)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_follow_dotted_paths() {
        let sets = vec![
            "pipeline.experiment.n_augment=3".to_owned(),
            "gaussian.t2_grid=[0, 1]".to_owned(),
            "pipeline.data.source=idx".to_owned(),
            "pipeline.cache_dir=/tmp/x".to_owned(),
            "diameter.strengths.1=0.3".to_owned(),
        ];
        let c = apply_overrides(&Config::default(), &sets).unwrap();
        assert_eq!(c.pipeline.experiment.n_augment, 3);
        assert_eq!(c.gaussian.t2_grid, vec![0.0, 1.0]);
        assert_eq!(c.pipeline.data.source, DataSource::Idx);
        assert_eq!(c.pipeline.cache_dir, Some(PathBuf::from("/tmp/x")));
        assert_eq!(c.diameter.strengths[1], 0.3);
    }

    #[test]
    fn bad_overrides_are_config_errors() {
        for bad in ["pipeline.nope=1", "discrete.trials", "discrete.trials=abc", "discrete.trials.x=1"] {
            let r = apply_overrides(&Config::default(), &[bad.to_owned()]);
            assert!(matches!(r, Err(AppError::Config(_))), "{bad}");
        }
    }

    #[test]
    fn default_round_trips() {
        let c = Config::default();
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<Config>(&text).unwrap(), c);
        assert!(serde_json::from_str::<Config>(r#"{"bogus": 1}"#).is_err());
    }
}
