//! Bounded losses, their sub-Gaussian constants, and an empirical CGF check.

use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::stats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LossKind {
    ClippedSquared,
    ClippedCrossEntropy,
    ZeroOne,
}

/// A loss bounded in `[0, clip_m]`, hence `clip_m / 2`-sub-Gaussian.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossSpec {
    pub kind: LossKind,
    pub clip_m: f64,
    pub sub_gaussian_r: f64,
}

/// Default clipping level of the classifier loss.
pub const DEFAULT_CROSS_ENTROPY_CLIP: f64 = 10.0;

impl LossSpec {
    pub fn new(kind: LossKind, clip_m: f64) -> Result<Self> {
        if !(clip_m > 0.0 && clip_m.is_finite()) {
            return Err(invalid!("clip_M must be positive and finite, got {clip_m}"));
        }
        if kind == LossKind::ZeroOne && clip_m != 1.0 {
            return Err(invalid!("zero-one loss takes values in [0, 1]; clip_M must be 1"));
        }
        Ok(Self { kind, clip_m, sub_gaussian_r: sub_gaussian_constant(0.0, clip_m)? })
    }

    pub fn clipped_squared(clip_m: f64) -> Result<Self> {
        Self::new(LossKind::ClippedSquared, clip_m)
    }

    pub fn clipped_cross_entropy(clip_m: f64) -> Result<Self> {
        Self::new(LossKind::ClippedCrossEntropy, clip_m)
    }

    pub fn zero_one() -> Self {
        Self { kind: LossKind::ZeroOne, clip_m: 1.0, sub_gaussian_r: 0.5 }
    }
}

#[derive(Debug, Clone, Copy)]
pub enum LossTarget<'a> {
    Vector(&'a [f64]),
    Class(usize),
}

/// Evaluates the clipped loss.
///
/// For cross-entropy and zero-one the prediction is a probability vector over
/// classes; for the squared loss it is compared coordinate-wise to the target.
pub fn evaluate_loss(spec: &LossSpec, prediction: &[f64], target: LossTarget<'_>) -> Result<f64> {
    let raw = match (spec.kind, target) {
        (LossKind::ClippedSquared, LossTarget::Vector(z)) => {
            if z.len() != prediction.len() {
                return Err(invalid!(
                    "prediction has {} coordinates, target has {}",
                    prediction.len(),
                    z.len()
                ));
            }
            prediction.iter().zip(z).map(|(w, z)| (w - z) * (w - z)).sum::<f64>()
        }
        (LossKind::ClippedCrossEntropy, LossTarget::Class(y)) => {
            let p = *prediction
                .get(y)
                .ok_or_else(|| invalid!("class {y} out of range for {} outputs", prediction.len()))?;
            if p <= 0.0 {
                f64::INFINITY
            } else {
                -p.ln()
            }
        }
        (LossKind::ZeroOne, LossTarget::Class(y)) => {
            if y >= prediction.len() {
                return Err(invalid!("class {y} out of range for {} outputs", prediction.len()));
            }
            if argmax(prediction) == y {
                0.0
            } else {
                1.0
            }
        }
        (kind, _) => return Err(invalid!("target type does not match loss kind {kind:?}")),
    };
    if raw.is_nan() {
        return Err(invalid!("loss evaluated to NaN"));
    }
    Ok(raw.min(spec.clip_m))
}

pub(crate) fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in xs.iter().enumerate() {
        if v > xs[best] {
            best = i;
        }
    }
    best
}

/// Sub-Gaussian constant of a variable bounded in `[a, b]`.
pub fn sub_gaussian_constant(a: f64, b: f64) -> Result<f64> {
    if !(a <= b) {
        return Err(invalid!("lower bound {a} exceeds upper bound {b}"));
    }
    Ok((b - a) / 2.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CgfPoint {
    pub lambda: f64,
    pub psi_hat: f64,
    pub bound: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CgfCheck {
    /// `max_λ (ψ̂(λ) − λ²R²/2)`, before slack.
    pub max_violation: f64,
    pub holds: bool,
    pub points: Vec<CgfPoint>,
}

pub const CGF_MIN_SAMPLES: usize = 1000;

/// Checks `ψ̂(λ) ≤ λ²R²/2` on a grid, allowing three delta-method standard
/// errors of Monte-Carlo slack per grid point.
pub fn empirical_cgf_check(samples: &[f64], r: f64, lambda_grid: &[f64]) -> Result<CgfCheck> {
    if samples.is_empty() {
        return Err(invalid!("empty sample"));
    }
    if samples.len() < CGF_MIN_SAMPLES {
        return Err(invalid!("need at least {CGF_MIN_SAMPLES} samples, got {}", samples.len()));
    }
    if !(r > 0.0) {
        return Err(invalid!("R must be positive"));
    }
    if lambda_grid.iter().any(|l| !l.is_finite()) {
        return Err(invalid!("lambda grid contains non-finite values"));
    }
    let n = samples.len() as f64;
    let mu = stats::mean(samples);
    let mut points = Vec::with_capacity(lambda_grid.len());
    let mut max_violation = f64::NEG_INFINITY;
    let mut holds = true;
    let mut shifted = Vec::with_capacity(samples.len());
    for &lambda in lambda_grid {
        shifted.clear();
        shifted.extend(samples.iter().map(|x| lambda * (x - mu)));
        let top = shifted.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        // scaled terms exp(λ(x − x̄) − top) lie in (0, 1]
        let scaled: Vec<f64> = shifted.iter().map(|s| (s - top).exp()).collect();
        let m = stats::mean(&scaled);
        let psi_hat = top + m.ln();
        let se = stats::variance(&scaled).sqrt() / (n.sqrt() * m);
        let slack = 3.0 * se;
        let bound = lambda * lambda * r * r / 2.0;
        let violation = psi_hat - bound;
        max_violation = max_violation.max(violation);
        holds &= violation <= slack;
        points.push(CgfPoint { lambda, psi_hat, bound, slack });
    }
    Ok(CgfCheck { max_violation, holds, points })
}
