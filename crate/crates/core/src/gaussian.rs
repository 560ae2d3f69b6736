//! Gaussian mean estimation with additive Gaussian augmentation.
//!
//! Data `Z_i ~ N(μ, s²I)`, augmentations `G_j ~ N(0, t²I)` shared across the
//! sample, and the learner `W = (1/(mn)) Σ_i Σ_j (Z_i + G_j) + ε` with
//! `ε ~ N(0, ν²I)`. All information quantities are in nats.

use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::bound::{assemble_bound_thm4, BoundReport};
use crate::error::{invalid, Error, Result};
use crate::linalg::Matrix;
use crate::quadrature::adaptive_simpson;
use crate::rng::{seeded, standard_normal};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianSetting {
    pub d: usize,
    pub m: usize,
    pub n: usize,
    pub s2: f64,
    pub t2: f64,
    pub nu2: f64,
    /// Mean vector; empty means zero.
    #[serde(default)]
    pub mu: Vec<f64>,
    pub clip_m: f64,
}

impl GaussianSetting {
    pub fn new(d: usize, m: usize, n: usize, s2: f64, t2: f64, nu2: f64) -> Self {
        Self { d, m, n, s2, t2, nu2, mu: Vec::new(), clip_m: 4.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 || self.m == 0 || self.n == 0 {
            return Err(invalid!("d, m and n must be positive"));
        }
        if !(self.s2 >= 0.0 && self.t2 >= 0.0 && self.nu2 >= 0.0) {
            return Err(invalid!("variances must be nonnegative"));
        }
        if !self.mu.is_empty() && self.mu.len() != self.d {
            return Err(invalid!("mean has length {}, expected {}", self.mu.len(), self.d));
        }
        if !(self.clip_m > 0.0) {
            return Err(invalid!("clip constant must be positive"));
        }
        Ok(())
    }

    pub fn mean(&self, k: usize) -> f64 {
        self.mu.get(k).copied().unwrap_or(0.0)
    }

    /// Sub-Gaussian constant of the clipped squared loss.
    pub fn r(&self) -> f64 {
        self.clip_m / 2.0
    }

    /// `Var(W)` per coordinate.
    pub fn w_variance(&self) -> f64 {
        self.s2 / self.m as f64 + self.t2 / self.n as f64 + self.nu2
    }
}

/// `KL(N(μ, s²I) ‖ N(μ, (s²+t²)I)) = (d/2)(ρ − 1 − log ρ)`, `ρ = s²/(s²+t²)`.
pub fn kl_shift(s: &GaussianSetting) -> Result<f64> {
    s.validate()?;
    if !(s.s2 > 0.0) {
        return Err(invalid!("data variance must be positive"));
    }
    let rho = s.s2 / (s.s2 + s.t2);
    Ok((0.5 * s.d as f64 * (rho - 1.0 - rho.ln())).max(0.0))
}

/// The same divergence by adaptive Simpson quadrature of the univariate
/// integrand over ±12 combined standard deviations, times `d`.
pub fn kl_shift_quadrature(s: &GaussianSetting) -> Result<f64> {
    s.validate()?;
    if !(s.s2 > 0.0) {
        return Err(invalid!("data variance must be positive"));
    }
    let (a, b) = (s.s2, s.s2 + s.t2);
    let log_p = |x: f64| -0.5 * x * x / a - 0.5 * (2.0 * core::f64::consts::PI * a).ln();
    let log_q = |x: f64| -0.5 * x * x / b - 0.5 * (2.0 * core::f64::consts::PI * b).ln();
    let half = 12.0 * b.sqrt();
    let per_coord = adaptive_simpson(
        |x| {
            let lp = log_p(x);
            lp.exp() * (lp - log_q(x))
        },
        -half,
        half,
        1e-10,
    );
    Ok(s.d as f64 * per_coord)
}

/// `I(Z_1; W)` from the covariance structure: `Var(Z_1) = s²`,
/// `Cov(Z_1, W) = s²/m`, `Var(W) = s²/m + t²/n + ν²`, which gives
/// `(d/2) log[(m s² + m² t²/n + m² ν²) / ((m−1) s² + m² t²/n + m² ν²)]`.
///
/// Returns `+∞` when the denominator vanishes (`m = 1`, `t² = ν² = 0`).
pub fn orbit_mi_per_sample(s: &GaussianSetting) -> Result<f64> {
    s.validate()?;
    let (m, n) = (s.m as f64, s.n as f64);
    let extra = m * m * (s.t2 / n + s.nu2);
    let num = m * s.s2 + extra;
    let den = (m - 1.0) * s.s2 + extra;
    Ok(log_ratio(s.d, num, den))
}

/// The closed form with the augmentation variance entering as `t²/n` rather
/// than `m²t²/n`. It agrees with [`orbit_mi_per_sample`] when `t² = 0` or
/// `m = 1` and overstates the information otherwise.
pub fn orbit_mi_per_sample_printed(s: &GaussianSetting) -> Result<f64> {
    s.validate()?;
    let (m, n) = (s.m as f64, s.n as f64);
    let num = m * (s.s2 + s.t2 / (m * n)) + m * m * s.nu2;
    let den = (m - 1.0) * s.s2 + s.t2 / n + m * m * s.nu2;
    Ok(log_ratio(s.d, num, den))
}

fn log_ratio(d: usize, num: f64, den: f64) -> f64 {
    if num == 0.0 {
        return 0.0;
    }
    if den <= 0.0 {
        return f64::INFINITY;
    }
    (0.5 * d as f64 * (num / den).ln()).max(0.0)
}

/// `I(G_j; W | Z_i = z) = (d/2) log(1 + (t²/n²) / ((n−1)t²/n² + (m−1)s²/m² + ν²))`.
///
/// Returns `+∞` when `t² > 0` and the channel noise vanishes.
pub fn aug_mi_per_pair(s: &GaussianSetting) -> Result<f64> {
    s.validate()?;
    if s.t2 == 0.0 {
        return Ok(0.0);
    }
    let (m, n) = (s.m as f64, s.n as f64);
    let signal = s.t2 / (n * n);
    let noise = (n - 1.0) * s.t2 / (n * n) + (m - 1.0) * s.s2 / (m * m) + s.nu2;
    if noise <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(0.5 * s.d as f64 * (signal / noise).ln_1p())
}

/// Raw information and the three bound terms for one setting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Corollary1Terms {
    pub kl: f64,
    pub orbit_mi: f64,
    pub aug_mi: f64,
    pub term1: f64,
    pub term2: f64,
    pub term3: f64,
    pub total: f64,
}

impl Corollary1Terms {
    pub fn from_information(kl: f64, orbit_mi: f64, aug_mi: f64, r: f64) -> Self {
        let term1 = (2.0 * kl).sqrt();
        let term2 = (2.0 * orbit_mi).sqrt();
        let term3 = (2.0 * aug_mi).sqrt();
        Self { kl, orbit_mi, aug_mi, term1, term2, term3, total: r * (term1 + term2 + term3) }
    }

    pub fn is_finite(&self) -> bool {
        self.total.is_finite()
    }
}

pub fn corollary1_terms(s: &GaussianSetting, r: f64) -> Result<Corollary1Terms> {
    Ok(Corollary1Terms::from_information(kl_shift(s)?, orbit_mi_per_sample(s)?, aug_mi_per_pair(s)?, r))
}

/// The per-sample bound for the Gaussian model. All samples and pairs are
/// exchangeable, so every per-sample and per-pair entry equals the closed form.
pub fn corollary1_bound(s: &GaussianSetting, r: f64) -> Result<BoundReport> {
    let kl = kl_shift(s)?;
    let orbit = orbit_mi_per_sample(s)?;
    let aug = aug_mi_per_pair(s)?;
    if !orbit.is_finite() || !aug.is_finite() {
        return Err(Error::BoundUndefined("information is infinite in this setting".into()));
    }
    assemble_bound_thm4(r, kl, &alloc::vec![orbit; s.m], &alloc::vec![alloc::vec![aug; s.n]; s.m])
}

/// Draws of `(Z_1, G_1, W)`, one row per replicate.
#[derive(Debug, Clone, PartialEq)]
pub struct LearnerSamples {
    pub z1: Matrix,
    pub g1: Matrix,
    pub w: Matrix,
}

/// Simulates the learner `reps` times. If `fixed_z1` is given, the first data
/// point is held at that value in every replicate.
fn simulate(s: &GaussianSetting, seed: u64, reps: usize, fixed_z1: Option<&[f64]>) -> Result<LearnerSamples> {
    s.validate()?;
    if reps == 0 {
        return Err(invalid!("reps must be at least 1"));
    }
    let d = s.d;
    let (sd_s, sd_t, sd_nu) = (s.s2.sqrt(), s.t2.sqrt(), s.nu2.sqrt());
    let mut rng = seeded(seed);
    let mut z1 = Matrix::zeros(reps, d);
    let mut g1 = Matrix::zeros(reps, d);
    let mut w = Matrix::zeros(reps, d);
    let inv_mn = 1.0 / (s.m * s.n) as f64;
    let mut zs = alloc::vec![0.0; s.m];
    let mut gs = alloc::vec![0.0; s.n];
    for r in 0..reps {
        for k in 0..d {
            let mu = s.mean(k);
            for (i, z) in zs.iter_mut().enumerate() {
                *z = match (i, fixed_z1) {
                    (0, Some(fixed)) => fixed[k],
                    _ => mu + sd_s * standard_normal(&mut rng),
                };
            }
            for g in gs.iter_mut() {
                *g = sd_t * standard_normal(&mut rng);
            }
            let eps = sd_nu * standard_normal(&mut rng);
            let mut acc = 0.0;
            for &z in &zs {
                for &g in &gs {
                    acc += z + g;
                }
            }
            z1[(r, k)] = zs[0];
            g1[(r, k)] = gs[0];
            w[(r, k)] = acc * inv_mn + eps;
        }
    }
    Ok(LearnerSamples { z1, g1, w })
}

pub fn simulate_learner(s: &GaussianSetting, seed: u64, reps: usize) -> Result<LearnerSamples> {
    simulate(s, seed, reps, None)
}

/// Replicates with the first data point held at `z1`, for `I(G_1; W | Z_1 = z1)`.
pub fn simulate_learner_given(s: &GaussianSetting, z1: &[f64], seed: u64, reps: usize) -> Result<LearnerSamples> {
    if z1.len() != s.d {
        return Err(invalid!("fixed point has length {}, expected {}", z1.len(), s.d));
    }
    simulate(s, seed, reps, Some(z1))
}

/// Minimum number of pairs accepted by [`mc_gaussian_mi`].
pub const MC_MIN_SAMPLES: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McEstimate {
    pub mi: f64,
    /// Set when some sample correlation reached ±1 and was clamped.
    pub clamped: bool,
}

/// Gaussian MI estimate `Σ_k −½ log(1 − ρ̂_k²)` from per-coordinate sample
/// correlations of paired draws.
pub fn mc_gaussian_mi(x: &Matrix, y: &Matrix) -> Result<McEstimate> {
    if x.rows() != y.rows() || x.cols() != y.cols() {
        return Err(invalid!("paired samples must have equal shapes"));
    }
    if x.rows() < MC_MIN_SAMPLES {
        return Err(invalid!("need at least {MC_MIN_SAMPLES} pairs, got {}", x.rows()));
    }
    let n = x.rows() as f64;
    let mut total = 0.0;
    let mut clamped = false;
    for k in 0..x.cols() {
        let (mut mx, mut my) = (0.0, 0.0);
        for r in 0..x.rows() {
            mx += x[(r, k)];
            my += y[(r, k)];
        }
        mx /= n;
        my /= n;
        let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
        for r in 0..x.rows() {
            let (a, b) = (x[(r, k)] - mx, y[(r, k)] - my);
            sxx += a * a;
            syy += b * b;
            sxy += a * b;
        }
        let mut rho2 = if sxx > 0.0 && syy > 0.0 { sxy * sxy / (sxx * syy) } else { 0.0 };
        if rho2 >= 1.0 - 1e-12 {
            rho2 = 1.0 - 1e-12;
            clamped = true;
        }
        total += -0.5 * (1.0 - rho2).ln();
    }
    Ok(McEstimate { mi: total, clamped })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepPanel {
    /// Varies `t²` at the base `n` and `m`.
    Strength,
    /// Varies `(n, m)` at the base `t²`.
    Multiplicity,
}

/// One grid point. Information and terms are `None` where infinite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub panel: SweepPanel,
    pub t2: f64,
    pub n: usize,
    pub m: usize,
    pub kl_nats: Option<f64>,
    pub orbit_mi_nats: Option<f64>,
    pub aug_mi_nats: Option<f64>,
    pub term1: Option<f64>,
    pub term2: Option<f64>,
    pub term3: Option<f64>,
    pub total: Option<f64>,
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

pub fn sweep_row(s: &GaussianSetting, r: f64, panel: SweepPanel) -> Result<SweepRow> {
    let t = corollary1_terms(s, r)?;
    Ok(SweepRow {
        panel,
        t2: s.t2,
        n: s.n,
        m: s.m,
        kl_nats: finite(t.kl),
        orbit_mi_nats: finite(t.orbit_mi),
        aug_mi_nats: finite(t.aug_mi),
        term1: finite(t.term1),
        term2: finite(t.term2),
        term3: finite(t.term3),
        total: finite(t.total),
    })
}

/// The two panels of the Gaussian figure: one row per `t²` at the base
/// `(n, m)`, then one row per `(m, n)` pair at the base `t²`.
pub fn figure1_sweep(
    base: &GaussianSetting,
    t2_grid: &[f64],
    n_grid: &[usize],
    m_grid: &[usize],
    r: f64,
) -> Result<Vec<SweepRow>> {
    if t2_grid.is_empty() || n_grid.is_empty() || m_grid.is_empty() {
        return Err(invalid!("sweep grids must be nonempty"));
    }
    let mut rows = Vec::with_capacity(t2_grid.len() + n_grid.len() * m_grid.len());
    for &t2 in t2_grid {
        rows.push(sweep_row(&GaussianSetting { t2, ..base.clone() }, r, SweepPanel::Strength)?);
    }
    for &m in m_grid {
        for &n in n_grid {
            rows.push(sweep_row(&GaussianSetting { m, n, ..base.clone() }, r, SweepPanel::Multiplicity)?);
        }
    }
    Ok(rows)
}

/// Draws `reps` pairs with per-coordinate correlation `rho`.
pub fn correlated_pairs<R: Rng + ?Sized>(rng: &mut R, reps: usize, d: usize, rho: f64) -> (Matrix, Matrix) {
    let c = (1.0 - rho * rho).max(0.0).sqrt();
    let mut x = Matrix::zeros(reps, d);
    let mut y = Matrix::zeros(reps, d);
    for r in 0..reps {
        for k in 0..d {
            let a = standard_normal(rng);
            let b = standard_normal(rng);
            x[(r, k)] = a;
            y[(r, k)] = rho * a + c * b;
        }
    }
    (x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::LN_2;

    fn g(d: usize, m: usize, n: usize, s2: f64, t2: f64, nu2: f64) -> GaussianSetting {
        GaussianSetting::new(d, m, n, s2, t2, nu2)
    }

    #[test]
    fn kl_examples() {
        assert_eq!(kl_shift(&g(3, 1, 1, 1.0, 0.0, 0.0)).unwrap(), 0.0);
        let s = g(1, 1, 1, 1.0, 1.0, 0.0);
        let closed = kl_shift(&s).unwrap();
        let quad = kl_shift_quadrature(&s).unwrap();
        assert!((closed - 0.096574).abs() < 1e-6);
        assert!((closed - quad).abs() < 1e-6);
        let mut prev = -1.0;
        for i in 0..50 {
            let v = kl_shift(&g(2, 1, 1, 1.0, 0.1 * i as f64, 0.0)).unwrap();
            assert!(v > prev);
            prev = v;
        }
    }

    #[test]
    fn orbit_mi_examples() {
        assert_eq!(orbit_mi_per_sample(&g(1, 3, 1, 0.0, 1.0, 0.5)).unwrap(), 0.0);
        let s = g(1, 2, 1, 1.0, 0.0, 0.0);
        assert!((orbit_mi_per_sample(&s).unwrap() - 0.5 * LN_2).abs() < 1e-15);
        assert!((orbit_mi_per_sample_printed(&s).unwrap() - 0.5 * LN_2).abs() < 1e-15);
        let s = g(1, 2, 1, 1.0, 1.0, 0.0);
        assert!((orbit_mi_per_sample_printed(&s).unwrap() - 0.5 * 1.5f64.ln()).abs() < 1e-15);
        // Var(W) = 3/2 and Cov(Z_1, W) = 1/2, so ρ² = 1/6.
        assert!((orbit_mi_per_sample(&s).unwrap() - 0.5 * 1.2f64.ln()).abs() < 1e-15);
        assert_eq!(orbit_mi_per_sample(&g(1, 1, 1, 1.0, 0.0, 0.0)).unwrap(), f64::INFINITY);
    }

    #[test]
    fn aug_mi_examples() {
        assert_eq!(aug_mi_per_pair(&g(1, 4, 2, 1.0, 0.0, 0.0)).unwrap(), 0.0);
        assert!((aug_mi_per_pair(&g(1, 1, 2, 1.0, 1.0, 0.0)).unwrap() - 0.5 * LN_2).abs() < 1e-15);
        for n in [2usize, 3, 8] {
            let limit = 0.5 * (n as f64 / (n as f64 - 1.0)).ln();
            let v = aug_mi_per_pair(&g(1, 3, n, 1.0, 1e6, 0.1)).unwrap();
            assert!((v - limit).abs() / limit < 0.01);
        }
        assert_eq!(aug_mi_per_pair(&g(1, 1, 1, 1.0, 1.0, 0.0)).unwrap(), f64::INFINITY);
    }

    #[test]
    fn bound_examples() {
        let t = corollary1_terms(&g(1, 3, 2, 1.0, 0.0, 0.3), 1.0).unwrap();
        assert_eq!(t.term1, 0.0);
        assert_eq!(t.term3, 0.0);
        let s = g(1, 2, 1, 1.0, 1.0, 0.0);
        let t = Corollary1Terms::from_information(
            kl_shift(&s).unwrap(),
            orbit_mi_per_sample_printed(&s).unwrap(),
            aug_mi_per_pair(&s).unwrap(),
            1.0,
        );
        assert!((t.term1 - 0.439486).abs() < 1e-6);
        assert!((t.aug_mi - 0.5 * 5f64.ln()).abs() < 1e-15);
        assert!((t.term3 - 1.268636).abs() < 1e-6);
        assert!((t.term2 - 1.5f64.ln().sqrt()).abs() < 1e-15);
        assert!((t.total - 2.344883).abs() < 1e-6);
        let report = corollary1_bound(&s, 1.0).unwrap();
        let direct = corollary1_terms(&s, 1.0).unwrap();
        assert!((report.total - direct.total).abs() < 1e-14);
        assert!(corollary1_bound(&g(1, 1, 1, 1.0, 0.0, 0.0), 1.0).is_err());
    }

    #[test]
    fn information_is_linear_in_dimension() {
        let a = g(1, 3, 2, 1.3, 0.7, 0.2);
        let b = GaussianSetting { d: 5, ..a.clone() };
        for f in [kl_shift, orbit_mi_per_sample, aug_mi_per_pair] {
            assert!((5.0 * f(&a).unwrap() - f(&b).unwrap()).abs() < 1e-13);
        }
    }

    #[test]
    fn simulation_examples() {
        let s = g(2, 1, 1, 1.0, 0.0, 0.0);
        let out = simulate_learner(&s, 1, 100).unwrap();
        assert_eq!(out.w, out.z1);

        let s = GaussianSetting { mu: alloc::vec![0.5], ..g(1, 3, 2, 1.0, 0.5, 0.2) };
        let reps = 100_000;
        let out = simulate_learner(&s, 2, reps).unwrap();
        let w = out.w.as_slice();
        let mean = crate::stats::mean(w);
        let var = crate::stats::variance(w);
        let expected = s.w_variance();
        assert!((mean - 0.5).abs() < 4.0 * (expected / reps as f64).sqrt());
        assert!((var - expected).abs() / expected < 0.05);
    }

    #[test]
    fn monte_carlo_matches_closed_forms() {
        let mut rng = seeded(5);
        let (x, y) = correlated_pairs(&mut rng, 100_000, 1, 0.0);
        assert!(mc_gaussian_mi(&x, &y).unwrap().mi < 0.01);
        let (x, y) = correlated_pairs(&mut rng, 100_000, 1, 0.5);
        assert!((mc_gaussian_mi(&x, &y).unwrap().mi - 0.143841).abs() < 0.01);

        let s = g(1, 2, 1, 1.0, 1.0, 0.0);
        let out = simulate_learner(&s, 7, 100_000).unwrap();
        let mc = mc_gaussian_mi(&out.z1, &out.w).unwrap().mi;
        let exact = orbit_mi_per_sample(&s).unwrap();
        assert!((mc - exact).abs() / exact < 0.05, "mc {mc} exact {exact}");

        let s = g(1, 3, 2, 1.0, 1.0, 0.1);
        let out = simulate_learner_given(&s, &[0.3], 8, 100_000).unwrap();
        let mc = mc_gaussian_mi(&out.g1, &out.w).unwrap().mi;
        let exact = aug_mi_per_pair(&s).unwrap();
        assert!((mc - exact).abs() / exact < 0.05, "mc {mc} exact {exact}");

        let small = Matrix::zeros(10, 1);
        assert!(mc_gaussian_mi(&small, &small).is_err());
    }

    #[test]
    fn sweep_shape_and_trends() {
        let base = g(1, 10, 4, 1.0, 1.0, 0.01);
        let t2: Vec<f64> = (0..20).map(|i| 0.25 * i as f64).collect();
        let rows = figure1_sweep(&base, &t2, &[1, 2, 4, 8], &[5, 10], 2.0).unwrap();
        assert_eq!(rows.len(), 20 + 8);
        let strength: Vec<&SweepRow> = rows.iter().filter(|r| r.panel == SweepPanel::Strength).collect();
        assert_eq!(strength[0].kl_nats, Some(0.0));
        assert_eq!(strength[0].aug_mi_nats, Some(0.0));
        for w in strength.windows(2) {
            assert!(w[1].kl_nats.unwrap() > w[0].kl_nats.unwrap());
            assert!(w[1].orbit_mi_nats.unwrap() < w[0].orbit_mi_nats.unwrap());
        }
        let multi: Vec<&SweepRow> = rows.iter().filter(|r| r.panel == SweepPanel::Multiplicity && r.m == 5).collect();
        for w in multi.windows(2) {
            assert!(w[1].aug_mi_nats.unwrap() < w[0].aug_mi_nats.unwrap());
        }
    }
}
