//! Exact information measures on finite supports, and finite "worlds" on which
//! every identity and inequality of the augmentation bounds can be checked by
//! enumeration.

mod checks;
mod world;

pub use checks::*;
pub use world::*;

use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::linalg::Matrix;

/// Tolerance on the total mass of a probability vector.
pub const MASS_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct DiscreteDistribution {
    probs: Vec<f64>,
}

impl DiscreteDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(invalid!("distribution needs a nonempty support"));
        }
        if let Some(p) = probs.iter().find(|p| !(**p >= 0.0) || !p.is_finite()) {
            return Err(invalid!("probabilities must be finite and nonnegative, found {p}"));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > MASS_TOLERANCE {
            return Err(invalid!("probabilities sum to {total}, not 1"));
        }
        Ok(Self { probs })
    }

    /// Normalizes nonnegative weights.
    pub fn from_weights(weights: &[f64]) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) {
            return Err(invalid!("weights must have positive total mass"));
        }
        Self::new(weights.iter().map(|w| w / total).collect())
    }

    pub fn uniform(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(invalid!("uniform distribution needs k >= 1"));
        }
        Ok(Self { probs: alloc::vec![1.0 / k as f64; k] })
    }

    pub fn point_mass(k: usize, at: usize) -> Result<Self> {
        if at >= k {
            return Err(invalid!("point mass index {at} outside support of size {k}"));
        }
        let mut probs = alloc::vec![0.0; k];
        probs[at] = 1.0;
        Ok(Self { probs })
    }

    #[inline]
    pub fn support_size(&self) -> usize {
        self.probs.len()
    }

    #[inline]
    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    #[inline]
    pub fn p(&self, i: usize) -> f64 {
        self.probs[i]
    }

    pub fn min_prob(&self) -> f64 {
        self.probs.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn entropy(&self) -> f64 {
        entropy(&self.probs)
    }
}

impl TryFrom<Vec<f64>> for DiscreteDistribution {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<DiscreteDistribution> for Vec<f64> {
    fn from(d: DiscreteDistribution) -> Self {
        d.probs
    }
}

/// Shannon entropy in nats with `0·log 0 = 0`.
pub fn entropy(probs: &[f64]) -> f64 {
    -probs.iter().filter(|&&p| p > 0.0).map(|&p| p * p.ln()).sum::<f64>()
}

/// `Σ p log(p/q)` on raw slices; errors when `p > 0` meets `q = 0`.
pub fn kl_slices(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(invalid!("support sizes differ: {} vs {}", p.len(), q.len()));
    }
    let mut acc = 0.0;
    for (i, (&pi, &qi)) in p.iter().zip(q).enumerate() {
        if pi > 0.0 {
            if qi <= 0.0 {
                return Err(Error::DivergenceUndefined { index: i });
            }
            acc += pi * (pi / qi).ln();
        }
    }
    Ok(acc)
}

pub fn kl_discrete(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<f64> {
    kl_slices(&p.probs, &q.probs)
}

/// Total variation as the supremum over events: `½ Σ |P − Q|`.
pub fn tv_slices(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(invalid!("support sizes differ: {} vs {}", p.len(), q.len()));
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

pub fn tv_discrete(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<f64> {
    tv_slices(&p.probs, &q.probs)
}

fn validate_joint(joint: &Matrix) -> Result<()> {
    if joint.rows() == 0 || joint.cols() == 0 {
        return Err(invalid!("joint table is empty"));
    }
    if joint.as_slice().iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
        return Err(invalid!("joint table entries must be finite and nonnegative"));
    }
    let total = joint.sum();
    if (total - 1.0).abs() > MASS_TOLERANCE {
        return Err(invalid!("joint table sums to {total}, not 1"));
    }
    Ok(())
}

/// `I(X;Y) = Σ J log(J / (P_X P_Y))` for a joint table with rows X, columns Y.
pub fn mutual_information_exact(joint: &Matrix) -> Result<f64> {
    validate_joint(joint)?;
    Ok(mi_unchecked(joint))
}

pub(crate) fn mi_unchecked(joint: &Matrix) -> f64 {
    let px = joint.row_sums();
    let py = joint.col_sums();
    let mut acc = 0.0;
    for (i, row) in joint.row_iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v > 0.0 {
                acc += v * (v / (px[i] * py[j])).ln();
            }
        }
    }
    acc.max(0.0)
}

/// The same quantity computed as `E_X[KL(P_{Y|X} ‖ P_Y)]`.
pub fn mutual_information_as_expected_kl(joint: &Matrix) -> Result<f64> {
    validate_joint(joint)?;
    let py = joint.col_sums();
    let mut acc = 0.0;
    for row in joint.row_iter() {
        let px: f64 = row.iter().sum();
        if px > 0.0 {
            let cond: Vec<f64> = row.iter().map(|v| v / px).collect();
            acc += px * kl_slices(&cond, &py)?;
        }
    }
    Ok(acc)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReversePinsker {
    pub kl: f64,
    pub tv: f64,
    pub q_min: f64,
    /// `tv² / q_min` with `tv` the event-supremum distance.
    pub paper_bound: f64,
    /// `(2·tv)² / q_min`, i.e. the squared L1 distance over `q_min`.
    pub corrected_bound: f64,
    pub paper_holds: bool,
    pub corrected_holds: bool,
}

pub fn verify_reverse_pinsker(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<ReversePinsker> {
    reverse_pinsker_slices(p.probs(), q.probs())
}

pub(crate) fn reverse_pinsker_slices(p: &[f64], q: &[f64]) -> Result<ReversePinsker> {
    let q_min = q.iter().copied().fold(f64::INFINITY, f64::min);
    if !(q_min > 0.0) {
        return Err(invalid!("reference distribution must be strictly positive (q_min = {q_min})"));
    }
    let kl = kl_slices(p, q)?;
    let tv = tv_slices(p, q)?;
    let paper_bound = tv * tv / q_min;
    let corrected_bound = 4.0 * tv * tv / q_min;
    Ok(ReversePinsker {
        kl,
        tv,
        q_min,
        paper_bound,
        corrected_bound,
        paper_holds: kl <= paper_bound + 1e-15,
        corrected_holds: kl <= corrected_bound + 1e-15,
    })
}
