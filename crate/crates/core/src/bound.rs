//! Assembly of the three-term bounds from information quantities (nats).
//!
//! Both forms share the distribution-shift term `√(2·KL)`. The dataset form
//! uses `√(2·I(S;W)/m)` and a per-example augmentation term averaged over the
//! sample; the per-sample form replaces them by averages of `√(2·I)` over
//! individual samples and (sample, augmentation) pairs.

use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TheoremTag {
    #[serde(rename = "thm3")]
    Thm3,
    #[serde(rename = "thm4")]
    Thm4,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OrbitInformation {
    Dataset(f64),
    PerSample(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum AugmentationInformation {
    PerExample(Vec<f64>),
    PerPair(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    #[serde(rename = "R")]
    pub r: f64,
    pub kl_term_raw: f64,
    pub orbit_mi_raw: OrbitInformation,
    pub aug_mi_raw: AugmentationInformation,
    pub term1: f64,
    pub term2: f64,
    pub term3: f64,
    pub total: f64,
    pub theorem_tag: TheoremTag,
}

impl BoundReport {
    /// Recomputes a per-sample (thm4) report from its stored raw quantities.
    pub fn recompute_thm4(&self) -> Result<BoundReport> {
        match (&self.orbit_mi_raw, &self.aug_mi_raw, self.theorem_tag) {
            (OrbitInformation::PerSample(per), AugmentationInformation::PerPair(pairs), TheoremTag::Thm4) => {
                assemble_bound_thm4(self.r, self.kl_term_raw, per, pairs)
            }
            _ => Err(invalid!("report does not carry per-sample/per-pair information")),
        }
    }
}

fn check_info(name: &str, v: f64) -> Result<()> {
    if !(v >= 0.0) || !v.is_finite() {
        return Err(invalid!("{name} must be a finite nonnegative information value, got {v}"));
    }
    Ok(())
}

fn check_r(r: f64) -> Result<()> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(invalid!("R must be positive and finite, got {r}"));
    }
    Ok(())
}

/// Clamps a raw estimator output at zero; NaN is rejected.
pub fn clamp_information(raw: f64) -> Result<f64> {
    if raw.is_nan() {
        return Err(invalid!("information estimate is NaN"));
    }
    Ok(raw.max(0.0))
}

pub fn assemble_bound_thm3(
    r: f64,
    kl: f64,
    dataset_mi: f64,
    m: usize,
    per_example_aug_mi: &[f64],
    n: usize,
) -> Result<BoundReport> {
    check_r(r)?;
    check_info("kl", kl)?;
    check_info("dataset_mi", dataset_mi)?;
    if m == 0 || n == 0 {
        return Err(invalid!("m and n must be positive"));
    }
    if per_example_aug_mi.len() != m {
        return Err(invalid!("expected {m} per-example values, got {}", per_example_aug_mi.len()));
    }
    for &v in per_example_aug_mi {
        check_info("per_example_aug_mi", v)?;
    }
    let term1 = (2.0 * kl).sqrt();
    let term2 = (2.0 * dataset_mi / m as f64).sqrt();
    let term3 = per_example_aug_mi.iter().map(|&i| (2.0 * i / n as f64).sqrt()).sum::<f64>() / m as f64;
    Ok(BoundReport {
        r,
        kl_term_raw: kl,
        orbit_mi_raw: OrbitInformation::Dataset(dataset_mi),
        aug_mi_raw: AugmentationInformation::PerExample(per_example_aug_mi.to_vec()),
        term1,
        term2,
        term3,
        total: r * (term1 + term2 + term3),
        theorem_tag: TheoremTag::Thm3,
    })
}

pub fn assemble_bound_thm4(r: f64, kl: f64, per_sample_mi: &[f64], per_pair_aug_mi: &[Vec<f64>]) -> Result<BoundReport> {
    check_r(r)?;
    check_info("kl", kl)?;
    let m = per_sample_mi.len();
    if m == 0 {
        return Err(invalid!("per-sample list is empty"));
    }
    if per_pair_aug_mi.len() != m {
        return Err(invalid!("per-pair matrix has {} rows, expected {m}", per_pair_aug_mi.len()));
    }
    let n = per_pair_aug_mi[0].len();
    if n == 0 || per_pair_aug_mi.iter().any(|row| row.len() != n) {
        return Err(invalid!("per-pair matrix rows must share a positive length"));
    }
    for &v in per_sample_mi.iter().chain(per_pair_aug_mi.iter().flatten()) {
        check_info("mutual information", v)?;
    }
    let term1 = (2.0 * kl).sqrt();
    let term2 = per_sample_mi.iter().map(|&i| (2.0 * i).sqrt()).sum::<f64>() / m as f64;
    let term3 = per_pair_aug_mi.iter().flatten().map(|&i| (2.0 * i).sqrt()).sum::<f64>() / (m * n) as f64;
    Ok(BoundReport {
        r,
        kl_term_raw: kl,
        orbit_mi_raw: OrbitInformation::PerSample(per_sample_mi.to_vec()),
        aug_mi_raw: AugmentationInformation::PerPair(per_pair_aug_mi.to_vec()),
        term1,
        term2,
        term3,
        total: r * (term1 + term2 + term3),
        theorem_tag: TheoremTag::Thm4,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn thm3_zero_information_is_zero() {
        let b = assemble_bound_thm3(3.0, 0.0, 0.0, 4, &[0.0; 4], 2).unwrap();
        assert_eq!(b.total, 0.0);
    }

    #[test]
    fn thm3_worked_example() {
        // √0.16 + √0.01 + √0.004
        let b = assemble_bound_thm3(1.0, 0.08, 0.5, 100, &[0.02; 100], 10).unwrap();
        assert!((b.term1 - 0.4).abs() < 1e-12);
        assert!((b.term2 - 0.1).abs() < 1e-12);
        assert!((b.term3 - 0.004f64.sqrt()).abs() < 1e-12);
        assert!((b.total - 0.563246).abs() < 1e-6);
        let doubled = assemble_bound_thm3(2.0, 0.08, 0.5, 100, &[0.02; 100], 10).unwrap();
        assert!((doubled.total - 2.0 * b.total).abs() < 1e-12);
    }

    #[test]
    fn thm4_worked_example() {
        let b = assemble_bound_thm4(1.0, 0.0, &[0.5, 0.5], &[vec![0.0], vec![0.0]]).unwrap();
        assert!((b.total - 1.0).abs() < 1e-12);
        let z = assemble_bound_thm4(1.0, 0.0, &[0.0; 3], &[vec![0.0; 2], vec![0.0; 2], vec![0.0; 2]]).unwrap();
        assert_eq!(z.total, 0.0);
    }

    #[test]
    fn equal_per_sample_values_match_dataset_form() {
        let m = 7;
        let c = 0.3;
        let t4 = assemble_bound_thm4(1.0, 0.1, &vec![c; m], &vec![vec![0.0]; m]).unwrap();
        let t3 = assemble_bound_thm3(1.0, 0.1, m as f64 * c, m, &vec![0.0; m], 1).unwrap();
        assert!((t4.term2 - t3.term2).abs() < 1e-12);
    }

    #[test]
    fn negative_or_misshapen_inputs_are_rejected() {
        assert!(assemble_bound_thm3(1.0, -0.1, 0.0, 1, &[0.0], 1).is_err());
        assert!(assemble_bound_thm3(1.0, 0.0, 0.0, 2, &[0.0], 1).is_err());
        assert!(assemble_bound_thm3(0.0, 0.0, 0.0, 1, &[0.0], 1).is_err());
        assert!(assemble_bound_thm4(1.0, 0.0, &[0.1], &[vec![-0.2]]).is_err());
        assert!(assemble_bound_thm4(1.0, 0.0, &[0.1, 0.1], &[vec![0.2]]).is_err());
        assert!(assemble_bound_thm4(1.0, 0.0, &[0.1, 0.1], &[vec![0.2], vec![]]).is_err());
    }

    #[test]
    fn clamp_keeps_nonnegative() {
        assert_eq!(clamp_information(-0.01).unwrap(), 0.0);
        assert_eq!(clamp_information(0.2).unwrap(), 0.2);
        assert!(clamp_information(f64::NAN).is_err());
    }

    #[test]
    fn recompute_round_trips() {
        let b = assemble_bound_thm4(5.0, 0.4, &[0.1, 0.2], &[vec![0.01, 0.02], vec![0.03, 0.0]]).unwrap();
        assert_eq!(b.recompute_thm4().unwrap(), b);
    }
}
