//! Estimator self-test on problems with known answers.

use augbound_core::estimators::{density_ratio_kl, independent_pairs, mine_estimate, DiscriminatorConfig, MineConfig};
use augbound_core::gaussian::correlated_pairs;
use augbound_core::rng::{derive_seed, seeded, standard_normal};
use augbound_core::Matrix;
use serde::{Deserialize, Serialize};

use crate::config::SelftestConfig;
use crate::error::AppResult;

pub const MINE_TOLERANCE: f64 = 0.03;
pub const KL_TOLERANCE: f64 = 0.03;
pub const ZERO_TOLERANCE: f64 = 0.02;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelftestReport {
    pub rho: f64,
    pub mine_target: f64,
    pub mine_values: Vec<f64>,
    pub mine_mean: f64,
    pub mine_independent: Vec<f64>,
    pub kl_target: f64,
    pub kl_hat: f64,
    pub kl_auc: f64,
    pub kl_identical: f64,
    pub pass: bool,
}

fn normal_column(seed: u64, rows: usize, sd: f64) -> Matrix {
    let mut rng = seeded(seed);
    Matrix::from_fn(rows, 1, |_, _| sd * standard_normal(&mut rng))
}

/// MINE on correlated and independent Gaussian pairs; density-ratio KL on
/// N(0,1) against N(0,2) and against a second N(0,1) sample.
pub fn run_selftest(cfg: &SelftestConfig) -> AppResult<SelftestReport> {
    let seed = cfg.seed;
    let mine_target = -0.5 * (1.0 - cfg.rho * cfg.rho).ln();
    let (mut mine_values, mut mine_independent) = (Vec::new(), Vec::new());
    for k in 0..cfg.mine_seeds as u64 {
        let mine = MineConfig { seed: derive_seed(seed, 100 + k), ..cfg.mine };
        let (x, y) = correlated_pairs(&mut seeded(derive_seed(seed, 200 + k)), cfg.pairs, 1, cfg.rho);
        mine_values.push(mine_estimate(&x, &y, &mine)?.mi_hat);
        let (x, y) = independent_pairs(&mut seeded(derive_seed(seed, 300 + k)), cfg.pairs, 1, 1);
        mine_independent.push(mine_estimate(&x, &y, &mine)?.mi_hat);
    }
    let mine_mean = mine_values.iter().sum::<f64>() / mine_values.len().max(1) as f64;

    let kl_target = 0.5 * (0.5 - 1.0 + 2f64.ln());
    let disc = DiscriminatorConfig { seed: derive_seed(seed, 400), ..cfg.discriminator };
    let p = normal_column(derive_seed(seed, 401), cfg.pairs, 1.0);
    let q = normal_column(derive_seed(seed, 402), cfg.pairs, 2f64.sqrt());
    let q_same = normal_column(derive_seed(seed, 403), cfg.pairs, 1.0);
    let shifted = density_ratio_kl(&p, &q, &disc)?;
    let identical = density_ratio_kl(&p, &q_same, &disc)?;

    let pass = (mine_mean - mine_target).abs() <= MINE_TOLERANCE
        && mine_independent.iter().all(|v| v.abs() <= ZERO_TOLERANCE)
        && (shifted.kl_hat - kl_target).abs() <= KL_TOLERANCE
        && identical.kl_hat.abs() <= ZERO_TOLERANCE;
    Ok(SelftestReport {
        rho: cfg.rho,
        mine_target,
        mine_values,
        mine_mean,
        mine_independent,
        kl_target,
        kl_hat: shifted.kl_hat,
        kl_auc: shifted.auc,
        kl_identical: identical.kl_hat,
        pass,
    })
}
