use alloc::vec::Vec;

#[cfg(not(feature = "std"))]
use num_traits::Float;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{
    entropy, kl_slices, mi_unchecked, mutual_information_as_expected_kl, reverse_pinsker_slices, tv_slices,
    DiscreteDistribution, DiscreteWorld,
};
use crate::error::{invalid, Error, Result};
use crate::linalg::Matrix;
use crate::rng::{dirichlet_uniform, seeded};

/// Largest number of joint configurations any exact enumeration will visit.
pub const ENUMERATION_LIMIT: u128 = 1_000_000;

fn configurations(base: usize, len: usize) -> Option<u128> {
    (base as u128).checked_pow(len as u32)
}

fn guard(count: Option<u128>) -> Result<usize> {
    match count {
        Some(c) if c <= ENUMERATION_LIMIT => Ok(c as usize),
        Some(c) => Err(Error::TooLarge { configurations: c, limit: ENUMERATION_LIMIT }),
        None => Err(Error::TooLarge { configurations: u128::MAX, limit: ENUMERATION_LIMIT }),
    }
}

/// Writes the base-`base` digits of `index` into `out`, least significant first.
fn digits(mut index: usize, base: usize, out: &mut [usize]) {
    for d in out.iter_mut() {
        *d = index % base;
        index /= base;
    }
}

fn product_prob(dist: &DiscreteDistribution, idx: &[usize]) -> f64 {
    idx.iter().map(|&i| dist.p(i)).product()
}

fn check_sizes(m: usize, n: usize) -> Result<()> {
    if m == 0 || n == 0 {
        return Err(invalid!("m and n must be positive (m = {m}, n = {n})"));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decomposition {
    /// `E[L_D(W) − L_{D_G∘D}(W)]`
    pub term1: f64,
    /// `E[L_{D_G∘D}(W) − L_{D_G∘S}(W)]`
    pub term2: f64,
    /// `E[L_{D_G∘S}(W) − L_{E∘S}(W)]`
    pub term3: f64,
    pub sum: f64,
    /// `E[L_D(W) − L_{E∘S}(W)]`
    pub direct_gap: f64,
}

/// Exact expected generalization gap and its three-way split, enumerating
/// every dataset `S ∈ Z^m` and augmentation draw `E ∈ G^n`.
///
/// The learner trained on `(S, E)` outputs `W` from the mixture
/// `(1/(mn)) Σ_i Σ_j P(· | Z_i, G_j)`.
pub fn gen_gap_decomposition_exact(world: &DiscreteWorld, m: usize, n: usize) -> Result<Decomposition> {
    check_sizes(m, n)?;
    let (nz, ng, nw) = (world.z_size(), world.g_size(), world.w_size());
    let s_count = guard(configurations(nz, m))?;
    let e_count = guard(configurations(ng, n))?;
    guard((s_count as u128).checked_mul(e_count as u128))?;

    // Population risks per hypothesis.
    let mut l_d = alloc::vec![0.0; nw];
    let mut l_aug = alloc::vec![0.0; nw];
    // Orbit-averaged loss ℓ_G(w, z) = Σ_g p(g) ℓ(w, g·z).
    let mut orbit_loss = Matrix::zeros(nw, nz);
    for w in 0..nw {
        for z in 0..nz {
            let lg: f64 = (0..ng).map(|g| world.aug_dist.p(g) * world.loss(w, world.act(g, z))).sum();
            orbit_loss[(w, z)] = lg;
            l_d[w] += world.data_dist.p(z) * world.loss(w, z);
            l_aug[w] += world.data_dist.p(z) * lg;
        }
    }

    let inv_m = 1.0 / m as f64;
    let inv_mn = 1.0 / (m * n) as f64;
    let mut s = alloc::vec![0usize; m];
    let mut e = alloc::vec![0usize; n];
    let mut pw = alloc::vec![0.0; nw];
    let (mut t1, mut t2, mut t3, mut direct) = (0.0, 0.0, 0.0, 0.0);

    for si in 0..s_count {
        digits(si, nz, &mut s);
        let ps = product_prob(&world.data_dist, &s);
        if ps == 0.0 {
            continue;
        }
        for ei in 0..e_count {
            digits(ei, ng, &mut e);
            let p = ps * product_prob(&world.aug_dist, &e);
            if p == 0.0 {
                continue;
            }
            pw.iter_mut().for_each(|v| *v = 0.0);
            for &z in &s {
                for &g in &e {
                    for (acc, &c) in pw.iter_mut().zip(world.channel_row(z, g)) {
                        *acc += c;
                    }
                }
            }
            for w in 0..nw {
                let q = pw[w] * inv_mn;
                if q == 0.0 {
                    continue;
                }
                let l_gs: f64 = s.iter().map(|&z| orbit_loss[(w, z)]).sum::<f64>() * inv_m;
                let l_es: f64 =
                    s.iter().flat_map(|&z| e.iter().map(move |&g| (z, g))).map(|(z, g)| world.loss(w, world.act(g, z))).sum::<f64>()
                        * inv_mn;
                t1 += p * q * (l_d[w] - l_aug[w]);
                t2 += p * q * (l_aug[w] - l_gs);
                t3 += p * q * (l_gs - l_es);
                direct += p * q * (l_d[w] - l_es);
            }
        }
    }
    Ok(Decomposition { term1: t1, term2: t2, term3: t3, sum: t1 + t2 + t3, direct_gap: direct })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitContraction {
    pub mi_plain: f64,
    pub mi_orbit: f64,
    pub difference: f64,
    pub expected_kl: f64,
    pub equal: bool,
}

/// Compares `I(Z;W)` for `W ~ K(· | Z)` with the orbit-averaged channel
/// `W ~ E_G K(· | G·Z)`, where the world's channel is `P(· | z, g) = K(· | g·z)`.
pub fn orbit_contraction_check(world: &DiscreteWorld) -> Result<OrbitContraction> {
    if !world.data_is_invariant(1e-12) {
        return Err(Error::PreconditionViolated("data distribution is not invariant under the group".into()));
    }
    if !world.channel_depends_on_transformed_input(1e-12) {
        return Err(Error::PreconditionViolated(
            "channel must depend on (z, g) only through the transformed input g·z".into(),
        ));
    }
    let (nz, ng, nw) = (world.z_size(), world.g_size(), world.w_size());
    let kernel = world.input_kernel();
    let mut averaged = Matrix::zeros(nz, nw);
    for z in 0..nz {
        for g in 0..ng {
            let pg = world.aug_dist.p(g);
            let row = kernel.row(world.act(g, z));
            for (a, &k) in averaged.row_mut(z).iter_mut().zip(row) {
                *a += pg * k;
            }
        }
    }
    let joint = |cond: &Matrix| {
        Matrix::from_fn(nz, nw, |z, w| world.data_dist.p(z) * cond[(z, w)])
    };
    let mi_plain = mi_unchecked(&joint(&kernel));
    let mi_orbit = mi_unchecked(&joint(&averaged));
    let mut expected_kl = 0.0;
    for z in 0..nz {
        let pz = world.data_dist.p(z);
        if pz == 0.0 {
            continue;
        }
        for g in 0..ng {
            let pg = world.aug_dist.p(g);
            if pg > 0.0 {
                expected_kl += pz * pg * kl_slices(kernel.row(world.act(g, z)), averaged.row(z))?;
            }
        }
    }
    let difference = mi_plain - mi_orbit;
    Ok(OrbitContraction {
        mi_plain,
        mi_orbit,
        difference,
        expected_kl,
        equal: (difference - expected_kl).abs() < 1e-12 && difference >= -1e-12,
    })
}

/// `sup_z E_G d(z, G·z)` over the world's points and metric.
pub fn group_diameter_discrete(world: &DiscreteWorld) -> f64 {
    (0..world.z_size())
        .map(|z| {
            (0..world.g_size())
                .map(|g| world.aug_dist.p(g) * world.metric[(z, world.act(g, z))])
                .sum::<f64>()
        })
        .fold(0.0, f64::max)
}

/// Smallest `C` with `TV(P(·|z,g), P(·|z,g')) ≤ C·d(g·z, g'·z)` at this `z`.
fn lipschitz_constant(world: &DiscreteWorld, z: usize) -> Result<f64> {
    let ng = world.g_size();
    let mut c: f64 = 0.0;
    for g in 0..ng {
        for h in (g + 1)..ng {
            let tv = tv_slices(world.channel_row(z, g), world.channel_row(z, h))?;
            let d = world.metric[(world.act(g, z), world.act(h, z))];
            if d > 0.0 {
                c = c.max(tv / d);
            } else if tv > 1e-15 {
                return Err(Error::PreconditionViolated(alloc::format!(
                    "channel differs for augmentations {g} and {h} that map {z} to the same point"
                )));
            }
        }
    }
    Ok(c)
}

/// Joint table of `(G, W)` given a fixed input `z`, rows `g`.
fn aug_joint(world: &DiscreteWorld, z: usize) -> Matrix {
    Matrix::from_fn(world.g_size(), world.w_size(), |g, w| world.aug_dist.p(g) * world.channel_row(z, g)[w])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prop3Check {
    pub z: usize,
    pub exact_aug_mi: f64,
    pub lipschitz_c: f64,
    pub delta_g: f64,
    pub delta_z: f64,
    /// TV between the `(G, W)` joint and the product of its marginals.
    pub tv_joint: f64,
    /// `C²Δ²/δ_z`
    pub paper_bound: f64,
    /// `4·C²Δ²/δ_z`
    pub corrected_bound: f64,
    pub paper_holds: bool,
    pub corrected_holds: bool,
    pub triangle_inequality: bool,
}

pub fn prop3_bound_check(world: &DiscreteWorld, z: usize) -> Result<Prop3Check> {
    if z >= world.z_size() {
        return Err(invalid!("z = {z} outside Z of size {}", world.z_size()));
    }
    if world.aug_dist.min_prob() <= 0.0 {
        return Err(Error::BoundUndefined("augmentation distribution is not strictly positive".into()));
    }
    let averaged = world.averaged_channel(z);
    let min_w = averaged.iter().copied().fold(f64::INFINITY, f64::min);
    let delta_z = world.aug_dist.min_prob() * min_w;
    if !(delta_z > 0.0) {
        return Err(Error::BoundUndefined(alloc::format!("δ_z = 0 at z = {z}")));
    }
    let joint = aug_joint(world, z);
    let exact_aug_mi = mi_unchecked(&joint);
    let tv_joint: f64 = (0..world.g_size())
        .map(|g| world.aug_dist.p(g) * tv_slices(world.channel_row(z, g), &averaged).unwrap_or(0.0))
        .sum();
    let c = lipschitz_constant(world, z)?;
    let delta_g = group_diameter_discrete(world);
    let paper_bound = c * c * delta_g * delta_g / delta_z;
    let corrected_bound = 4.0 * paper_bound;
    Ok(Prop3Check {
        z,
        exact_aug_mi,
        lipschitz_c: c,
        delta_g,
        delta_z,
        tv_joint,
        paper_bound,
        corrected_bound,
        paper_holds: exact_aug_mi <= paper_bound + 1e-12,
        corrected_holds: exact_aug_mi <= corrected_bound + 1e-12,
        triangle_inequality: world.triangle_inequality_holds(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prop4Check {
    pub z: usize,
    pub exact_aug_mi: f64,
    /// Largest density ratio of the `(G, W)` joint against the product of marginals.
    pub beta: f64,
    pub tv_joint: f64,
    pub lipschitz_c: f64,
    pub delta_g: f64,
    /// `(√β/2)·TV` with the event-supremum TV.
    pub paper_tv_bound: f64,
    /// `√β·TV`, the same expression with the L1 distance.
    pub l1_tv_bound: f64,
    /// `(√β/2)·C·Δ`
    pub paper_bound: f64,
    /// `√β·C·Δ`
    pub l1_bound: f64,
    pub paper_tv_holds: bool,
    pub l1_tv_holds: bool,
    pub paper_holds: bool,
    pub l1_holds: bool,
}

/// Evaluates the bounded-density-ratio bound on a finite world at input `z`.
pub fn prop4_bound_check(world: &DiscreteWorld, z: usize) -> Result<Prop4Check> {
    if z >= world.z_size() {
        return Err(invalid!("z = {z} outside Z of size {}", world.z_size()));
    }
    let averaged = world.averaged_channel(z);
    let mut beta: f64 = 0.0;
    for g in 0..world.g_size() {
        if world.aug_dist.p(g) == 0.0 {
            continue;
        }
        for (w, &p) in world.channel_row(z, g).iter().enumerate() {
            if p > 0.0 {
                beta = beta.max(p / averaged[w]);
            }
        }
    }
    let exact_aug_mi = mi_unchecked(&aug_joint(world, z));
    let tv_joint: f64 = (0..world.g_size())
        .map(|g| world.aug_dist.p(g) * tv_slices(world.channel_row(z, g), &averaged).unwrap_or(0.0))
        .sum();
    let c = lipschitz_constant(world, z)?;
    let delta_g = group_diameter_discrete(world);
    let sb = beta.sqrt();
    let paper_tv_bound = 0.5 * sb * tv_joint;
    let l1_tv_bound = sb * tv_joint;
    let paper_bound = 0.5 * sb * c * delta_g;
    let l1_bound = sb * c * delta_g;
    let tol = 1e-12;
    Ok(Prop4Check {
        z,
        exact_aug_mi,
        beta,
        tv_joint,
        lipschitz_c: c,
        delta_g,
        paper_tv_bound,
        l1_tv_bound,
        paper_bound,
        l1_bound,
        paper_tv_holds: exact_aug_mi <= paper_tv_bound + tol,
        l1_tv_holds: exact_aug_mi <= l1_tv_bound + tol,
        paper_holds: exact_aug_mi <= paper_bound + tol,
        l1_holds: exact_aug_mi <= l1_bound + tol,
    })
}

/// A learner given directly as `P(w | S)` for every dataset `S ∈ Z^m`.
///
/// Row `s` corresponds to the dataset whose `i`-th point is the `i`-th
/// base-`|Z|` digit of `s`, least significant first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LearnerTable {
    pub z_size: usize,
    pub m: usize,
    pub table: Matrix,
}

impl LearnerTable {
    pub fn new(z_size: usize, m: usize, table: Matrix) -> Result<Self> {
        let rows = guard(configurations(z_size, m))?;
        if m == 0 || table.rows() != rows || table.cols() == 0 {
            return Err(invalid!("learner table must have |Z|^m = {rows} rows"));
        }
        for row in table.row_iter() {
            let total: f64 = row.iter().sum();
            if row.iter().any(|p| !(*p >= 0.0)) || (total - 1.0).abs() > super::MASS_TOLERANCE {
                return Err(invalid!("learner rows must be distributions"));
            }
        }
        Ok(Self { z_size, m, table })
    }

    /// The augmented learner of a world with `E` marginalized out:
    /// `P(w | S) = (1/m) Σ_i Σ_g p(g) P(w | Z_i, g)`.
    pub fn from_world(world: &DiscreteWorld, m: usize) -> Result<Self> {
        check_sizes(m, 1)?;
        let nz = world.z_size();
        let rows = guard(configurations(nz, m))?;
        let averaged: Vec<Vec<f64>> = (0..nz).map(|z| world.averaged_channel(z)).collect();
        let mut table = Matrix::zeros(rows, world.w_size());
        let mut s = alloc::vec![0usize; m];
        for si in 0..rows {
            digits(si, nz, &mut s);
            let row = table.row_mut(si);
            for &z in &s {
                for (r, &a) in row.iter_mut().zip(&averaged[z]) {
                    *r += a / m as f64;
                }
            }
        }
        Self::new(nz, m, table)
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, z_size: usize, m: usize, w_size: usize) -> Result<Self> {
        let rows = guard(configurations(z_size, m))?;
        let mut table = Matrix::zeros(rows, w_size);
        for r in 0..rows {
            table.row_mut(r).copy_from_slice(&dirichlet_uniform(rng, w_size));
        }
        Self::new(z_size, m, table)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerSampleCheck {
    pub per_sample_mi: Vec<f64>,
    pub dataset_mi: f64,
    /// `(1/m) Σ_i √(2·I(Z_i;W))`
    pub lhs: f64,
    /// `√((2/m)·I(S;W))`
    pub rhs: f64,
    pub holds: bool,
}

pub fn per_sample_vs_dataset_mi(data_dist: &DiscreteDistribution, learner: &LearnerTable) -> Result<PerSampleCheck> {
    let nz = learner.z_size;
    if data_dist.support_size() != nz {
        return Err(invalid!("data distribution has support {}, learner expects {nz}", data_dist.support_size()));
    }
    let m = learner.m;
    let nw = learner.table.cols();
    let rows = learner.table.rows();
    let mut s_joint = Matrix::zeros(rows, nw);
    let mut marginals: Vec<Matrix> = (0..m).map(|_| Matrix::zeros(nz, nw)).collect();
    let mut s = alloc::vec![0usize; m];
    for si in 0..rows {
        digits(si, nz, &mut s);
        let ps = product_prob(data_dist, &s);
        for w in 0..nw {
            let v = ps * learner.table[(si, w)];
            s_joint[(si, w)] = v;
            for (i, &z) in s.iter().enumerate() {
                marginals[i][(z, w)] += v;
            }
        }
    }
    let dataset_mi = mi_unchecked(&s_joint);
    let per_sample_mi: Vec<f64> = marginals.iter().map(mi_unchecked).collect();
    let lhs = per_sample_mi.iter().map(|i| (2.0 * i).sqrt()).sum::<f64>() / m as f64;
    let rhs = (2.0 * dataset_mi / m as f64).sqrt();
    Ok(PerSampleCheck { per_sample_mi, dataset_mi, lhs, rhs, holds: lhs <= rhs + 1e-12 })
}

/// A finite Markov chain `X → Y → Z`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkovChain {
    pub px: DiscreteDistribution,
    pub py_given_x: Matrix,
    pub pz_given_y: Matrix,
}

impl MarkovChain {
    pub fn random(seed: u64, x: usize, y: usize, z: usize) -> Result<Self> {
        let mut rng = seeded(seed);
        let px = DiscreteDistribution::from_weights(&dirichlet_uniform(&mut rng, x))?;
        let mut py_given_x = Matrix::zeros(x, y);
        for i in 0..x {
            py_given_x.row_mut(i).copy_from_slice(&dirichlet_uniform(&mut rng, y));
        }
        let mut pz_given_y = Matrix::zeros(y, z);
        for i in 0..y {
            pz_given_y.row_mut(i).copy_from_slice(&dirichlet_uniform(&mut rng, z));
        }
        Ok(Self { px, py_given_x, pz_given_y })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaRecord {
    pub i_xy: f64,
    pub i_xy_as_kl: f64,
    pub i_yz: f64,
    pub i_xz: f64,
    pub kl_identity_holds: bool,
    pub data_processing_holds: bool,
    pub pass: bool,
}

/// Checks `I(X;Y) = E_X KL(P_{Y|X} ‖ P_Y)` and `I(X;Z) ≤ min(I(X;Y), I(Y;Z))`.
pub fn verify_information_lemmas(chain: &MarkovChain) -> Result<LemmaRecord> {
    let nx = chain.px.support_size();
    let (ny, nz) = (chain.py_given_x.cols(), chain.pz_given_y.cols());
    if chain.py_given_x.rows() != nx || chain.pz_given_y.rows() != ny {
        return Err(invalid!("chain transition shapes do not line up"));
    }
    let xy = Matrix::from_fn(nx, ny, |i, j| chain.px.p(i) * chain.py_given_x[(i, j)]);
    let py = xy.col_sums();
    let yz = Matrix::from_fn(ny, nz, |j, k| py[j] * chain.pz_given_y[(j, k)]);
    let xz = xy.matmul(&chain.pz_given_y)?;
    let i_xy = mi_unchecked(&xy);
    let i_xy_as_kl = mutual_information_as_expected_kl(&xy)?;
    let i_yz = mi_unchecked(&yz);
    let i_xz = mi_unchecked(&xz);
    let kl_identity_holds = (i_xy - i_xy_as_kl).abs() <= 1e-12;
    let data_processing_holds = i_xz <= i_xy.min(i_yz) + 1e-12;
    Ok(LemmaRecord {
        i_xy,
        i_xy_as_kl,
        i_yz,
        i_xz,
        kl_identity_holds,
        data_processing_holds,
        pass: kl_identity_holds && data_processing_holds,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Corollary2 {
    pub term_w: f64,
    pub term_g: f64,
    pub total: f64,
}

/// Bound with both information terms replaced by the entropy caps
/// `log|W|` and `log|G|`.
pub fn corollary2_report(m: usize, n: usize, w_size: usize, g_size: usize, kl: f64, r: f64) -> Result<Corollary2> {
    check_sizes(m, n)?;
    if w_size == 0 || g_size == 0 {
        return Err(invalid!("|W| and |G| must be positive"));
    }
    if !(kl >= 0.0) || !(r > 0.0) {
        return Err(invalid!("kl must be nonnegative and R positive"));
    }
    let term_w = (2.0 * (w_size as f64).ln() / m as f64).sqrt();
    let term_g = (2.0 * (g_size as f64).ln() / n as f64).sqrt();
    Ok(Corollary2 { term_w, term_g, total: r * ((2.0 * kl).sqrt() + term_w + term_g) })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyCap {
    pub dataset_mi: f64,
    pub w_entropy: f64,
    pub log_w: f64,
    /// `max_z I(E;W | Z_1 = z)`
    pub aug_mi_max: f64,
    pub log_g: f64,
    /// `n·log|G|`, the entropy of `E` under a uniform draw.
    pub n_log_g: f64,
    pub dataset_cap_holds: bool,
    /// Against `log|G|`; only guaranteed when `n = 1`.
    pub single_cap_holds: bool,
    pub aug_cap_holds: bool,
}

/// Enumerates `I(S;W)` and `I(E;W | Z_1 = z)` for the world's augmented learner.
pub fn check_entropy_cap(world: &DiscreteWorld, m: usize, n: usize) -> Result<EntropyCap> {
    check_sizes(m, n)?;
    let (nz, ng, nw) = (world.z_size(), world.g_size(), world.w_size());
    let learner = LearnerTable::from_world(world, m)?;
    let rows = learner.table.rows();
    let mut s = alloc::vec![0usize; m];
    let mut joint = Matrix::zeros(rows, nw);
    for si in 0..rows {
        digits(si, nz, &mut s);
        let ps = product_prob(&world.data_dist, &s);
        for w in 0..nw {
            joint[(si, w)] = ps * learner.table[(si, w)];
        }
    }
    let dataset_mi = mi_unchecked(&joint);
    let w_entropy = entropy(&joint.col_sums());

    // P(w | z, E) = (1/m)[A(z, E) + (m−1)·E_Z A(Z, E)] with A the average of
    // the channel over the draws in E; the other m−1 points are independent.
    let e_count = guard(configurations(ng, n))?;
    guard((e_count as u128).checked_mul(nz as u128))?;
    let mut e = alloc::vec![0usize; n];
    let mut aug_mi_max: f64 = 0.0;
    let mut a_rows = Matrix::zeros(nz, nw);
    let mut a_bar = alloc::vec![0.0; nw];
    let mut joints: Vec<Matrix> = (0..nz).map(|_| Matrix::zeros(e_count, nw)).collect();
    for ei in 0..e_count {
        digits(ei, ng, &mut e);
        let pe = product_prob(&world.aug_dist, &e);
        a_bar.iter_mut().for_each(|v| *v = 0.0);
        for z in 0..nz {
            let row = a_rows.row_mut(z);
            row.iter_mut().for_each(|v| *v = 0.0);
            for &g in &e {
                for (r, &c) in row.iter_mut().zip(world.channel_row(z, g)) {
                    *r += c / n as f64;
                }
            }
            for (b, &r) in a_bar.iter_mut().zip(row.iter()) {
                *b += world.data_dist.p(z) * r;
            }
        }
        for z in 0..nz {
            for w in 0..nw {
                let pw = (a_rows[(z, w)] + (m - 1) as f64 * a_bar[w]) / m as f64;
                joints[z][(ei, w)] = pe * pw;
            }
        }
    }
    for j in &joints {
        aug_mi_max = aug_mi_max.max(mi_unchecked(j));
    }
    let log_w = (nw as f64).ln();
    let log_g = (ng as f64).ln();
    let n_log_g = n as f64 * log_g;
    let tol = 1e-12;
    Ok(EntropyCap {
        dataset_mi,
        w_entropy,
        log_w,
        aug_mi_max,
        log_g,
        n_log_g,
        dataset_cap_holds: dataset_mi <= w_entropy + tol && w_entropy <= log_w + tol,
        single_cap_holds: aug_mi_max <= log_g + tol,
        aug_cap_holds: aug_mi_max <= n_log_g + tol,
    })
}

/// Random pair `(P, Q)` with `min Q ≥ q_floor`, for stress-testing the
/// reverse Pinsker inequality.
pub fn random_pinsker_pair<R: Rng + ?Sized>(rng: &mut R, k: usize, q_floor: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    if k == 0 || !(q_floor >= 0.0) || q_floor * k as f64 >= 1.0 {
        return Err(invalid!("need k >= 1 and q_floor * k < 1"));
    }
    let p = dirichlet_uniform(rng, k);
    let slack = 1.0 - q_floor * k as f64;
    let q: Vec<f64> = dirichlet_uniform(rng, k).into_iter().map(|v| q_floor + slack * v).collect();
    Ok((p, q))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PinskerSweep {
    pub trials: usize,
    pub corrected_failures: usize,
    pub paper_failures: usize,
    pub forward_failures: usize,
    pub min_q: f64,
}

/// Stress test of both reverse Pinsker constants and the forward inequality
/// `tv ≤ √(kl/2)` on seeded random pairs.
pub fn reverse_pinsker_sweep(seed: u64, trials: usize, k: usize, q_floor: f64) -> Result<PinskerSweep> {
    let mut out = PinskerSweep { trials, corrected_failures: 0, paper_failures: 0, forward_failures: 0, min_q: f64::INFINITY };
    for t in 0..trials {
        let mut rng = seeded(crate::rng::derive_seed(seed, t as u64));
        let (p, q) = random_pinsker_pair(&mut rng, k, q_floor)?;
        let r = reverse_pinsker_slices(&p, &q)?;
        out.min_q = out.min_q.min(r.q_min);
        out.corrected_failures += usize::from(!r.corrected_holds);
        out.paper_failures += usize::from(!r.paper_holds);
        out.forward_failures += usize::from(r.tv > (r.kl / 2.0).sqrt() + 1e-12);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::super::{random_world, AugKind, ChannelKind, DataKind, WorldSpec};
    use super::*;
    use alloc::vec;

    fn uniform(k: usize) -> DiscreteDistribution {
        DiscreteDistribution::uniform(k).unwrap()
    }

    #[test]
    fn decomposition_matches_direct_gap() {
        let w = random_world(&WorldSpec::new(2, 1, 2), 11).unwrap();
        let d = gen_gap_decomposition_exact(&w, 2, 1).unwrap();
        assert!((d.sum - d.direct_gap).abs() < 1e-12);
        for seed in 0..20 {
            let w = random_world(&WorldSpec::new(3, 2, 3), seed).unwrap();
            let d = gen_gap_decomposition_exact(&w, 2, 2).unwrap();
            assert!((d.sum - d.direct_gap).abs() < 1e-12, "{d:?}");
        }
    }

    #[test]
    fn decomposition_trivial_group() {
        let w = random_world(&WorldSpec::new(1, 3, 3), 4).unwrap();
        let d = gen_gap_decomposition_exact(&w, 2, 2).unwrap();
        assert_eq!(d.term1, 0.0);
        assert!(d.term3.abs() < 1e-15);
        assert!((d.sum - d.term2).abs() < 1e-15);
    }

    #[test]
    fn decomposition_invariant_data_has_no_shift() {
        let spec = WorldSpec::new(3, 1, 2).data(DataKind::Invariant).aug(AugKind::Uniform);
        let w = random_world(&spec, 2).unwrap();
        let d = gen_gap_decomposition_exact(&w, 2, 1).unwrap();
        assert!(d.term1.abs() < 1e-15);
    }

    #[test]
    fn decomposition_guard() {
        let w = random_world(&WorldSpec::new(2, 5, 2), 0).unwrap();
        assert!(matches!(gen_gap_decomposition_exact(&w, 6, 1), Err(Error::TooLarge { .. })));
    }

    #[test]
    fn orbit_contraction_examples() {
        let base = WorldSpec::new(3, 2, 4).data(DataKind::Invariant);
        let c = orbit_contraction_check(&random_world(&base.channel(ChannelKind::Constant), 1).unwrap()).unwrap();
        assert!(c.mi_plain.abs() < 1e-15 && c.mi_orbit.abs() < 1e-15 && c.difference.abs() < 1e-15);
        let c = orbit_contraction_check(&random_world(&base.channel(ChannelKind::OrbitOnly), 1).unwrap()).unwrap();
        assert!(c.difference.abs() < 1e-12 && c.equal);
        let c = orbit_contraction_check(&random_world(&base.channel(ChannelKind::InputKernel), 1).unwrap()).unwrap();
        assert!(c.equal && c.difference > 0.0, "{c:?}");

        let free = random_world(&WorldSpec::new(3, 2, 4), 1).unwrap();
        assert!(matches!(orbit_contraction_check(&free), Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn prop3_examples() {
        let w = random_world(&WorldSpec::new(3, 2, 3).channel(ChannelKind::IgnoresAugmentation), 3).unwrap();
        let p = prop3_bound_check(&w, 0).unwrap();
        assert_eq!(p.lipschitz_c, 0.0);
        assert!(p.exact_aug_mi.abs() < 1e-15 && p.paper_holds && p.corrected_holds);

        let w = random_world(&WorldSpec::new(1, 3, 3), 3).unwrap();
        let p = prop3_bound_check(&w, 1).unwrap();
        assert_eq!(p.delta_g, 0.0);
        assert!(p.exact_aug_mi.abs() < 1e-15);

        let w = random_world(&WorldSpec::new(3, 2, 3).channel(ChannelKind::InputKernel), 5).unwrap();
        for z in 0..w.z_size() {
            let p = prop3_bound_check(&w, z).unwrap();
            assert!(p.corrected_holds, "{p:?}");
            assert!(p.exact_aug_mi <= 4.0 * p.tv_joint * p.tv_joint / p.delta_z + 1e-12);
        }
    }

    #[test]
    fn prop4_reports_both_conventions() {
        let w = random_world(&WorldSpec::new(3, 2, 3), 8).unwrap();
        let p = prop4_bound_check(&w, 0).unwrap();
        assert!(p.beta >= 1.0);
        assert!((p.l1_tv_bound - 2.0 * p.paper_tv_bound).abs() < 1e-15);
        assert!((p.l1_bound - 2.0 * p.paper_bound).abs() < 1e-15);
    }

    #[test]
    fn per_sample_copy_example() {
        // W copies the first point.
        let table = Matrix::from_rows(&[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let learner = LearnerTable::new(2, 2, table).unwrap();
        let r = per_sample_vs_dataset_mi(&uniform(2), &learner).unwrap();
        assert!((r.lhs - 0.588705).abs() < 5e-7);
        assert!((r.rhs - 0.832555).abs() < 5e-7);
        assert!(r.holds);

        let flat = LearnerTable::new(2, 2, Matrix::from_fn(4, 3, |_, _| 1.0 / 3.0)).unwrap();
        let r = per_sample_vs_dataset_mi(&uniform(2), &flat).unwrap();
        assert!(r.lhs.abs() < 1e-15 && r.rhs.abs() < 1e-15);
    }

    #[test]
    fn per_sample_holds_on_random_learners() {
        for seed in 0..50 {
            let mut rng = seeded(seed);
            let learner = LearnerTable::random(&mut rng, 3, 2, 3).unwrap();
            let data = DiscreteDistribution::from_weights(&dirichlet_uniform(&mut rng, 3)).unwrap();
            assert!(per_sample_vs_dataset_mi(&data, &learner).unwrap().holds);
            let w = random_world(&WorldSpec::new(2, 2, 3), seed).unwrap();
            let l = LearnerTable::from_world(&w, 2).unwrap();
            assert!(per_sample_vs_dataset_mi(&w.data_dist, &l).unwrap().holds);
        }
    }

    #[test]
    fn lemma_examples() {
        let indep = MarkovChain {
            px: uniform(2),
            py_given_x: Matrix::from_fn(2, 3, |_, _| 1.0 / 3.0),
            pz_given_y: Matrix::from_fn(3, 2, |_, _| 0.5),
        };
        let r = verify_information_lemmas(&indep).unwrap();
        assert!(r.i_xy.abs() < 1e-15 && r.i_xy_as_kl.abs() < 1e-15 && r.pass);

        let copy = MarkovChain { px: uniform(3), py_given_x: Matrix::identity(3), pz_given_y: Matrix::identity(3) };
        let r = verify_information_lemmas(&copy).unwrap();
        let h = 3f64.ln();
        assert!((r.i_xz - h).abs() < 1e-14 && (r.i_xy - h).abs() < 1e-14 && r.pass);

        for seed in 0..100 {
            assert!(verify_information_lemmas(&MarkovChain::random(seed, 3, 4, 3).unwrap()).unwrap().pass);
        }
    }

    #[test]
    fn corollary2_examples() {
        assert_eq!(corollary2_report(10, 1, 1, 4, 0.0, 1.0).unwrap().term_w, 0.0);
        let c = corollary2_report(100, 1, 16, 1, 0.0, 1.0).unwrap();
        assert!((c.term_w - (2.0 * 16f64.ln() / 100.0).sqrt()).abs() < 1e-15);
        assert!((c.term_w - 0.235482).abs() < 5e-7);
        assert_eq!(c.term_g, 0.0);
    }

    #[test]
    fn entropy_caps_on_random_worlds() {
        for seed in 0..20 {
            let w = random_world(&WorldSpec::new(3, 1, 4), seed).unwrap();
            let cap = check_entropy_cap(&w, 2, 1).unwrap();
            assert!(cap.dataset_cap_holds && cap.single_cap_holds && cap.aug_cap_holds, "{cap:?}");
            let cap = check_entropy_cap(&w, 2, 3).unwrap();
            assert!(cap.dataset_cap_holds && cap.aug_cap_holds);
        }
    }

    #[test]
    fn reverse_pinsker_stress() {
        let r = reverse_pinsker_sweep(42, 1000, 4, 0.05).unwrap();
        assert_eq!(r.corrected_failures, 0);
        assert_eq!(r.forward_failures, 0);
        assert!(r.min_q >= 0.05);
    }
}
