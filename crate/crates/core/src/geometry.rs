//! Group actions on vectors and images, affine augmentation, and estimation of
//! the group diameter `sup_z E_G d(z, G·z)`.

use alloc::vec::Vec;
use core::f64::consts::PI;

#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::quadrature::adaptive_simpson;
use crate::rng::{derive_seed, seeded, StreamRng};

/// Random affine augmentation: rotation uniform on `±10·strength` degrees and
/// translation uniform on `±strength` of the image width/height.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AugmentationPolicy {
    pub strength: f64,
    pub n_augment: usize,
}

impl AugmentationPolicy {
    pub fn new(strength: f64, n_augment: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&strength) {
            return Err(invalid!("strength must lie in [0, 1], got {strength}"));
        }
        if n_augment == 0 {
            return Err(invalid!("n_augment must be positive"));
        }
        Ok(Self { strength, n_augment })
    }

    pub fn max_rotation_deg(&self) -> f64 {
        self.strength * 10.0
    }

    pub fn max_translate_frac(&self) -> f64 {
        self.strength
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformParams {
    pub angle_rad: f64,
    pub shift_x: f64,
    pub shift_y: f64,
}

impl TransformParams {
    pub const IDENTITY: Self = Self { angle_rad: 0.0, shift_x: 0.0, shift_y: 0.0 };

    pub fn is_identity(&self) -> bool {
        self.angle_rad == 0.0 && self.shift_x == 0.0 && self.shift_y == 0.0
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.angle_rad, self.shift_x, self.shift_y]
    }
}

/// Always draws three uniforms so streams stay aligned across strengths.
pub fn sample_transform<R: Rng + ?Sized>(
    policy: &AugmentationPolicy,
    height: usize,
    width: usize,
    rng: &mut R,
) -> TransformParams {
    let ua: f64 = rng.random_range(-1.0..=1.0);
    let ux: f64 = rng.random_range(-1.0..=1.0);
    let uy: f64 = rng.random_range(-1.0..=1.0);
    let frac = policy.max_translate_frac();
    TransformParams {
        angle_rad: ua * policy.max_rotation_deg().to_radians(),
        shift_x: ux * frac * width as f64,
        shift_y: uy * frac * height as f64,
    }
}

/// Warps a row-major `height × width` image: the output at `p` reads the input
/// at `R(−θ)(p − c − t) + c` with `c = ((W−1)/2, (H−1)/2)`, bilinear
/// interpolation and zeros outside the grid.
pub fn apply_affine(pixels: &[f64], height: usize, width: usize, params: &TransformParams) -> Result<Vec<f64>> {
    let mut out = alloc::vec![0.0; pixels.len()];
    apply_affine_into(pixels, height, width, params, &mut out)?;
    Ok(out)
}

pub fn apply_affine_into(
    pixels: &[f64],
    height: usize,
    width: usize,
    params: &TransformParams,
    out: &mut [f64],
) -> Result<()> {
    if height == 0 || width == 0 || pixels.len() != height * width || out.len() != pixels.len() {
        return Err(invalid!("image buffer does not match {height} x {width}"));
    }
    if pixels.iter().any(|v| !v.is_finite()) {
        return Err(invalid!("image contains non-finite pixels"));
    }
    if params.is_identity() {
        out.copy_from_slice(pixels);
        return Ok(());
    }
    let (sin, cos) = params.angle_rad.sin_cos();
    let cx = (width as f64 - 1.0) / 2.0;
    let cy = (height as f64 - 1.0) / 2.0;
    let at = |r: isize, c: isize| -> f64 {
        if r < 0 || c < 0 || r >= height as isize || c >= width as isize {
            0.0
        } else {
            pixels[r as usize * width + c as usize]
        }
    };
    for r in 0..height {
        for c in 0..width {
            let dx = c as f64 - cx - params.shift_x;
            let dy = r as f64 - cy - params.shift_y;
            let sx = cos * dx + sin * dy + cx;
            let sy = -sin * dx + cos * dy + cy;
            let x0 = sx.floor();
            let y0 = sy.floor();
            let fx = sx - x0;
            let fy = sy - y0;
            let (xi, yi) = (x0 as isize, y0 as isize);
            let mut v = (1.0 - fx) * (1.0 - fy) * at(yi, xi);
            if fx != 0.0 {
                v += fx * (1.0 - fy) * at(yi, xi + 1);
            }
            if fy != 0.0 {
                v += (1.0 - fx) * fy * at(yi + 1, xi);
                if fx != 0.0 {
                    v += fx * fy * at(yi + 1, xi + 1);
                }
            }
            out[r * width + c] = v;
        }
    }
    Ok(())
}

/// A randomized map on flat vectors, `z ↦ G·z` with `G` drawn per call.
pub trait RandomAction {
    fn dim(&self) -> Option<usize>;
    fn sample_apply(&self, rng: &mut StreamRng, z: &[f64], out: &mut [f64]) -> Result<()>;
}

/// Dirac at the identity.
#[derive(Debug, Clone, Copy, Default)]
pub struct IdentityAction;

impl RandomAction for IdentityAction {
    fn dim(&self) -> Option<usize> {
        None
    }

    fn sample_apply(&self, _rng: &mut StreamRng, z: &[f64], out: &mut [f64]) -> Result<()> {
        out.copy_from_slice(z);
        Ok(())
    }
}

/// Deterministic translation `z ↦ z + τ`.
#[derive(Debug, Clone)]
pub struct Translation {
    pub tau: Vec<f64>,
}

impl RandomAction for Translation {
    fn dim(&self) -> Option<usize> {
        Some(self.tau.len())
    }

    fn sample_apply(&self, _rng: &mut StreamRng, z: &[f64], out: &mut [f64]) -> Result<()> {
        for ((o, &a), &t) in out.iter_mut().zip(z).zip(&self.tau) {
            *o = a + t;
        }
        Ok(())
    }
}

/// Rotation of the plane by an angle uniform on `[−max_angle, max_angle]`.
#[derive(Debug, Clone, Copy)]
pub struct PlanarRotation {
    pub max_angle: f64,
}

impl RandomAction for PlanarRotation {
    fn dim(&self) -> Option<usize> {
        Some(2)
    }

    fn sample_apply(&self, rng: &mut StreamRng, z: &[f64], out: &mut [f64]) -> Result<()> {
        let phi: f64 = rng.random_range(-self.max_angle..=self.max_angle);
        let (s, c) = phi.sin_cos();
        out[0] = c * z[0] - s * z[1];
        out[1] = s * z[0] + c * z[1];
        Ok(())
    }
}

/// The image augmentation policy acting on flattened `height × width` images.
#[derive(Debug, Clone, Copy)]
pub struct ImageAction {
    pub policy: AugmentationPolicy,
    pub height: usize,
    pub width: usize,
}

impl RandomAction for ImageAction {
    fn dim(&self) -> Option<usize> {
        Some(self.height * self.width)
    }

    fn sample_apply(&self, rng: &mut StreamRng, z: &[f64], out: &mut [f64]) -> Result<()> {
        let params = sample_transform(&self.policy, self.height, self.width, rng);
        apply_affine_into(z, self.height, self.width, &params, out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiameterEstimate {
    pub delta_hat: f64,
    /// Index of the maximizing point among those supplied.
    pub argmax_point_id: usize,
    pub num_inner_mc: usize,
    pub num_points: usize,
    pub metric_name: alloc::string::String,
    /// Mean displacement at every supplied point.
    pub per_point: Vec<f64>,
}

fn l2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Mean L2 displacement of one point over `inner_mc` draws.
pub fn mean_displacement<A: RandomAction + ?Sized>(action: &A, z: &[f64], inner_mc: usize, seed: u64) -> Result<f64> {
    if let Some(d) = action.dim() {
        if d != z.len() {
            return Err(invalid!("point has dimension {}, action expects {d}", z.len()));
        }
    }
    let mut rng = seeded(seed);
    let mut out = alloc::vec![0.0; z.len()];
    let mut acc = 0.0;
    for _ in 0..inner_mc {
        action.sample_apply(&mut rng, z, &mut out)?;
        acc += l2(z, &out);
    }
    Ok(acc / inner_mc as f64)
}

/// `max_z (1/K) Σ_k ‖z − G_k z‖₂` over the supplied points. Point `i` uses
/// the stream `derive_seed(seed, i)`, so the result does not depend on the
/// order in which points are evaluated.
pub fn group_diameter<A: RandomAction + ?Sized>(
    action: &A,
    points: &[&[f64]],
    inner_mc: usize,
    seed: u64,
) -> Result<DiameterEstimate> {
    let per_point = points
        .iter()
        .enumerate()
        .map(|(i, z)| mean_displacement(action, z, inner_mc.max(1), derive_seed(seed, i as u64)))
        .collect::<Result<Vec<f64>>>()?;
    diameter_from_means(per_point, inner_mc)
}

/// Assembles an estimate from precomputed per-point mean displacements.
pub fn diameter_from_means(per_point: Vec<f64>, inner_mc: usize) -> Result<DiameterEstimate> {
    if per_point.is_empty() {
        return Err(invalid!("group diameter needs at least one point"));
    }
    if inner_mc == 0 {
        return Err(invalid!("inner_mc must be at least 1"));
    }
    let (argmax, &delta) = per_point
        .iter()
        .enumerate()
        .fold((0, &f64::NEG_INFINITY), |best, cur| if *cur.1 > *best.1 { cur } else { best });
    Ok(DiameterEstimate {
        delta_hat: delta.max(0.0),
        argmax_point_id: argmax,
        num_inner_mc: inner_mc,
        num_points: per_point.len(),
        metric_name: "euclidean-l2".into(),
        per_point,
    })
}

/// `E[2 sin(|φ|/2)]` for `φ` uniform on `[−π, π]`: the mean chord length
/// swept by a boundary point of the unit disk, by adaptive quadrature.
pub fn circle_rotation_diameter_quadrature() -> f64 {
    adaptive_simpson(|phi| 2.0 * (phi.abs() / 2.0).sin(), -PI, PI, 1e-13) / (2.0 * PI)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleCheck {
    pub amplitude: f64,
    pub grid_size: usize,
    pub kl: f64,
    pub lipschitz_lp: f64,
    pub lower_c: f64,
    pub delta: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Density `p(φ) = (1 + a sin φ)/(2π)` on the circle under uniform full-circle
/// rotation, evaluated on a periodic grid of `grid_size` points with the arc
/// metric `min(|φ−φ'|, 2π−|φ−φ'|)`.
pub fn prop1_circle_check(a: f64, grid_size: usize) -> Result<CircleCheck> {
    if !(0.0..1.0).contains(&a) {
        return Err(invalid!("amplitude must lie in [0, 1) for a valid density, got {a}"));
    }
    if grid_size < 256 || grid_size % 2 != 0 {
        return Err(invalid!("grid_size must be even and at least 256"));
    }
    let n = grid_size;
    let h = 2.0 * PI / n as f64;
    let phis: Vec<f64> = (0..n).map(|k| k as f64 * h).collect();
    let p: Vec<f64> = phis.iter().map(|&f| (1.0 + a * f.sin()) / (2.0 * PI)).collect();
    // Averaging over all grid rotations.
    let p_g = p.iter().sum::<f64>() / n as f64;
    let lower_c = p_g;
    // Periodic trapezoid rule, spectrally accurate for smooth periodic integrands.
    let kl = (p.iter().map(|&v| if v > 0.0 { v * (v / p_g).ln() } else { 0.0 }).sum::<f64>() * h).max(0.0);
    let lipschitz_lp = phis.iter().map(|&f| (a * f.cos() / (2.0 * PI)).abs()).fold(0.0, f64::max);
    let delta = (0..n).map(|k| (k as f64 * h).min(2.0 * PI - k as f64 * h)).sum::<f64>() / n as f64;
    let bound = lipschitz_lp * delta / lower_c;
    Ok(CircleCheck { amplitude: a, grid_size, kl, lipschitz_lp, lower_c, delta, bound, holds: kl <= bound + 1e-15 })
}

/// Reference KL of the circle density against the uniform one by adaptive quadrature.
pub fn circle_kl_quadrature(a: f64) -> f64 {
    adaptive_simpson(|f| {
        let v = 1.0 + a * f.sin();
        v / (2.0 * PI) * v.ln()
    }, 0.0, 2.0 * PI, 1e-13)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_strength_is_identity() {
        let policy = AugmentationPolicy::new(0.0, 10).unwrap();
        let mut rng = seeded(1);
        for _ in 0..100 {
            assert!(sample_transform(&policy, 28, 28, &mut rng).is_identity());
        }
    }

    #[test]
    fn full_strength_angle_coverage() {
        let policy = AugmentationPolicy::new(1.0, 10).unwrap();
        let mut rng = seeded(2);
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for _ in 0..10_000 {
            let t = sample_transform(&policy, 28, 28, &mut rng);
            let deg = t.angle_rad.to_degrees();
            assert!(deg.abs() <= 10.0 + 1e-12);
            assert!(t.shift_x.abs() <= 28.0 && t.shift_y.abs() <= 28.0);
            lo = lo.min(deg);
            hi = hi.max(deg);
        }
        assert!((hi - lo) / 20.0 >= 0.95);
        let a = sample_transform(&policy, 28, 28, &mut seeded(3));
        let b = sample_transform(&policy, 28, 28, &mut seeded(3));
        assert_eq!(a, b);
    }

    #[test]
    fn identity_and_zero_image() {
        let img: Vec<f64> = (0..35).map(|v| v as f64 * 0.37).collect();
        assert_eq!(apply_affine(&img, 5, 7, &TransformParams::IDENTITY).unwrap(), img);
        let zero = alloc::vec![0.0; 35];
        let t = TransformParams { angle_rad: 0.3, shift_x: 1.7, shift_y: -0.4 };
        assert_eq!(apply_affine(&zero, 5, 7, &t).unwrap(), zero);
        let mut bad = img.clone();
        bad[3] = f64::NAN;
        assert!(apply_affine(&bad, 5, 7, &t).is_err());
    }

    #[test]
    fn integer_shift_moves_columns() {
        let (h, w) = (4, 6);
        let img: Vec<f64> = (0..h * w).map(|v| v as f64 + 1.0).collect();
        let out = apply_affine(&img, h, w, &TransformParams { angle_rad: 0.0, shift_x: 1.0, shift_y: 0.0 }).unwrap();
        for r in 0..h {
            assert_eq!(out[r * w], 0.0);
            for c in 1..w {
                assert_eq!(out[r * w + c], img[r * w + c - 1]);
            }
        }
    }

    #[test]
    fn rotated_disk_interior_unchanged() {
        let (h, w) = (41, 41);
        let (cx, cy) = (20.0, 20.0);
        let radius = 12.0;
        let dist = |r: usize, c: usize| ((r as f64 - cy).powi(2) + (c as f64 - cx).powi(2)).sqrt();
        let img: Vec<f64> =
            (0..h * w).map(|i| if dist(i / w, i % w) <= radius { 1.0 } else { 0.0 }).collect();
        for angle in [0.1, 0.7, 1.9, -2.5] {
            let out = apply_affine(&img, h, w, &TransformParams { angle_rad: angle, shift_x: 0.0, shift_y: 0.0 }).unwrap();
            for i in 0..h * w {
                let d = dist(i / w, i % w);
                if (d - radius).abs() > 2.0 {
                    assert!((out[i] - img[i]).abs() < 1e-6, "pixel {i} at radius {d}");
                }
            }
        }
    }

    #[test]
    fn diameter_examples() {
        let pts: Vec<Vec<f64>> = (0..5).map(|i| alloc::vec![i as f64, -(i as f64), 0.5]).collect();
        let refs: Vec<&[f64]> = pts.iter().map(|p| p.as_slice()).collect();
        let d = group_diameter(&IdentityAction, &refs, 10, 0).unwrap();
        assert_eq!(d.delta_hat, 0.0);
        let tau = alloc::vec![3.0, 4.0, 0.0];
        let d = group_diameter(&Translation { tau }, &refs, 3, 0).unwrap();
        assert_eq!(d.delta_hat, 5.0);
        assert!(group_diameter(&IdentityAction, &[], 3, 0).is_err());
    }

    #[test]
    fn circle_rotation_diameter() {
        let exact = circle_rotation_diameter_quadrature();
        assert!((exact - 4.0 / PI).abs() < 1e-10);
        let pts: Vec<Vec<f64>> = [0.0, 0.5, 1.0]
            .iter()
            .flat_map(|&r| (0..4).map(move |k| alloc::vec![r * (k as f64).cos(), r * (k as f64).sin()]))
            .collect();
        let refs: Vec<&[f64]> = pts.iter().map(|p| p.as_slice()).collect();
        let d = group_diameter(&PlanarRotation { max_angle: PI }, &refs, 200_000, 4).unwrap();
        assert!(d.argmax_point_id >= 8);
        assert!((d.delta_hat - exact).abs() < 1e-2);
    }

    #[test]
    fn circle_check() {
        let c = prop1_circle_check(0.0, 512).unwrap();
        assert_eq!(c.kl, 0.0);
        assert_eq!(c.lipschitz_lp, 0.0);
        assert_eq!(c.bound, 0.0);
        assert!(c.holds);
        let c = prop1_circle_check(0.5, 512).unwrap();
        assert!((c.delta - PI / 2.0).abs() < 1e-12);
        assert!((c.bound - 0.5 * PI / 2.0).abs() < 1e-12);
        assert!((c.kl - circle_kl_quadrature(0.5)).abs() < 1e-10);
        assert!((c.kl - 0.0646381).abs() < 1e-6);
        let mut prev = 0.0;
        for i in 1..10 {
            let a = 0.1 * i as f64;
            let c = prop1_circle_check(a, 1024).unwrap();
            assert!(c.holds && c.kl > prev);
            prev = c.kl;
        }
        assert!(prop1_circle_check(1.0, 512).is_err());
        assert!(prop1_circle_check(0.5, 100).is_err());
    }
}
