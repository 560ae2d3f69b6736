use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{DiscreteDistribution, MASS_TOLERANCE};
use crate::error::{invalid, Result};
use crate::linalg::Matrix;
use crate::rng::{dirichlet_uniform, seeded};

/// A finite data space `Z`, augmentation set `G` acting on it, hypothesis space
/// `W`, and the learner channel `P(w | z, g)`.
///
/// `channel` has one row per `(z, g)` pair at index `z * |G| + g`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteWorld {
    pub data_dist: DiscreteDistribution,
    pub aug_dist: DiscreteDistribution,
    /// `group_table[g][z]` is `g·z`.
    pub group_table: Vec<Vec<usize>>,
    pub channel: Matrix,
    /// `loss_table[(w, z)]` is `ℓ(w, z)`.
    pub loss_table: Matrix,
    pub metric: Matrix,
    pub clip_m: f64,
}

impl DiscreteWorld {
    pub fn new(
        data_dist: DiscreteDistribution,
        aug_dist: DiscreteDistribution,
        group_table: Vec<Vec<usize>>,
        channel: Matrix,
        loss_table: Matrix,
        metric: Matrix,
        clip_m: f64,
    ) -> Result<Self> {
        let nz = data_dist.support_size();
        let ng = aug_dist.support_size();
        if group_table.len() != ng {
            return Err(invalid!("group table has {} rows, expected {ng}", group_table.len()));
        }
        for (g, row) in group_table.iter().enumerate() {
            if row.len() != nz {
                return Err(invalid!("group table row {g} has length {}, expected {nz}", row.len()));
            }
            let mut seen = alloc::vec![false; nz];
            for &z in row {
                if z >= nz || seen[z] {
                    return Err(invalid!("group element {g} does not act as a permutation of Z"));
                }
                seen[z] = true;
            }
        }
        if channel.rows() != nz * ng || channel.cols() == 0 {
            return Err(invalid!(
                "channel must be ({} x |W|), got ({} x {})",
                nz * ng,
                channel.rows(),
                channel.cols()
            ));
        }
        for (i, row) in channel.row_iter().enumerate() {
            let total: f64 = row.iter().sum();
            if row.iter().any(|p| !(*p >= 0.0)) || (total - 1.0).abs() > MASS_TOLERANCE {
                return Err(invalid!("channel row {i} is not a distribution"));
            }
        }
        let nw = channel.cols();
        if !(clip_m > 0.0) || !clip_m.is_finite() {
            return Err(invalid!("loss bound must be positive, got {clip_m}"));
        }
        if loss_table.rows() != nw || loss_table.cols() != nz {
            return Err(invalid!("loss table must be ({nw} x {nz})"));
        }
        if loss_table.as_slice().iter().any(|l| !(*l >= 0.0 && *l <= clip_m)) {
            return Err(invalid!("loss values must lie in [0, {clip_m}]"));
        }
        if metric.rows() != nz || metric.cols() != nz {
            return Err(invalid!("metric must be ({nz} x {nz})"));
        }
        for a in 0..nz {
            if metric[(a, a)] != 0.0 {
                return Err(invalid!("metric diagonal must be zero"));
            }
            for b in 0..nz {
                if !(metric[(a, b)] >= 0.0) || metric[(a, b)] != metric[(b, a)] {
                    return Err(invalid!("metric must be nonnegative and symmetric"));
                }
            }
        }
        Ok(Self { data_dist, aug_dist, group_table, channel, loss_table, metric, clip_m })
    }

    #[inline]
    pub fn z_size(&self) -> usize {
        self.data_dist.support_size()
    }

    #[inline]
    pub fn g_size(&self) -> usize {
        self.aug_dist.support_size()
    }

    #[inline]
    pub fn w_size(&self) -> usize {
        self.channel.cols()
    }

    #[inline]
    pub fn act(&self, g: usize, z: usize) -> usize {
        self.group_table[g][z]
    }

    #[inline]
    pub fn channel_row(&self, z: usize, g: usize) -> &[f64] {
        self.channel.row(z * self.g_size() + g)
    }

    #[inline]
    pub fn loss(&self, w: usize, z: usize) -> f64 {
        self.loss_table[(w, z)]
    }

    /// `Σ_g p(g) P(· | z, g)`.
    pub fn averaged_channel(&self, z: usize) -> Vec<f64> {
        let mut out = alloc::vec![0.0; self.w_size()];
        for g in 0..self.g_size() {
            let pg = self.aug_dist.p(g);
            for (o, &p) in out.iter_mut().zip(self.channel_row(z, g)) {
                *o += pg * p;
            }
        }
        out
    }

    pub fn identity_element(&self) -> Option<usize> {
        self.group_table.iter().position(|row| row.iter().enumerate().all(|(z, &gz)| gz == z))
    }

    /// Whether the tabulated actions contain the identity and are closed under composition.
    pub fn is_group(&self) -> bool {
        if self.identity_element().is_none() {
            return false;
        }
        let nz = self.z_size();
        for a in &self.group_table {
            for b in &self.group_table {
                let composed: Vec<usize> = (0..nz).map(|z| a[b[z]]).collect();
                if !self.group_table.contains(&composed) {
                    return false;
                }
            }
        }
        true
    }

    pub fn triangle_inequality_holds(&self) -> bool {
        let nz = self.z_size();
        let d = &self.metric;
        (0..nz).all(|a| {
            (0..nz).all(|b| (0..nz).all(|c| d[(a, c)] <= d[(a, b)] + d[(b, c)] + 1e-15))
        })
    }

    /// `D(g·z) = D(z)` for every `g` and `z`.
    pub fn data_is_invariant(&self, tol: f64) -> bool {
        self.group_table.iter().all(|row| {
            row.iter().enumerate().all(|(z, &gz)| (self.data_dist.p(gz) - self.data_dist.p(z)).abs() <= tol)
        })
    }

    /// Whether `P(· | z, g)` depends on `(z, g)` only through `g·z`.
    pub fn channel_depends_on_transformed_input(&self, tol: f64) -> bool {
        let nz = self.z_size();
        let ng = self.g_size();
        let mut rep: Vec<Option<(usize, usize)>> = alloc::vec![None; nz];
        for z in 0..nz {
            for g in 0..ng {
                let x = self.act(g, z);
                match rep[x] {
                    None => rep[x] = Some((z, g)),
                    Some((z0, g0)) => {
                        let same = self
                            .channel_row(z, g)
                            .iter()
                            .zip(self.channel_row(z0, g0))
                            .all(|(a, b)| (a - b).abs() <= tol);
                        if !same {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// The kernel `K(· | x)` with `P(· | z, g) = K(· | g·z)`; rows indexed by `x`.
    pub(crate) fn input_kernel(&self) -> Matrix {
        let nz = self.z_size();
        let mut k = Matrix::zeros(nz, self.w_size());
        // Element 0 is a bijection, so every x is reached as 0·z for exactly one z.
        for z in 0..nz {
            let x = self.act(0, z);
            k.row_mut(x).copy_from_slice(self.channel_row(z, 0));
        }
        k
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelKind {
    /// Independent Dirichlet row per `(z, g)`.
    Free,
    /// `P(w | z, g) = K(w | g·z)`.
    InputKernel,
    /// `P(w | z, g) = K(w | z)`, ignoring the augmentation.
    IgnoresAugmentation,
    /// One row shared by every input.
    Constant,
    /// Depends only on the orbit containing `z`.
    OrbitOnly,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DataKind {
    /// Dirichlet over all of `Z`.
    Free,
    /// Dirichlet over orbits, uniform within each orbit.
    Invariant,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AugKind {
    Uniform,
    Dirichlet,
}

/// Shape of a random world: `num_orbits` orbits of size `orbit_size` under the
/// cyclic group of order `orbit_size`, which rotates each orbit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WorldSpec {
    pub orbit_size: usize,
    pub num_orbits: usize,
    pub w_size: usize,
    pub data: DataKind,
    pub aug: AugKind,
    pub channel: ChannelKind,
}

impl WorldSpec {
    pub fn new(orbit_size: usize, num_orbits: usize, w_size: usize) -> Self {
        Self {
            orbit_size,
            num_orbits,
            w_size,
            data: DataKind::Free,
            aug: AugKind::Dirichlet,
            channel: ChannelKind::Free,
        }
    }

    pub fn data(mut self, data: DataKind) -> Self {
        self.data = data;
        self
    }

    pub fn aug(mut self, aug: AugKind) -> Self {
        self.aug = aug;
        self
    }

    pub fn channel(mut self, channel: ChannelKind) -> Self {
        self.channel = channel;
        self
    }
}

/// Cyclic action rotating each block of `orbit_size` consecutive points.
pub fn cyclic_orbit_table(orbit_size: usize, num_orbits: usize) -> Vec<Vec<usize>> {
    (0..orbit_size)
        .map(|g| {
            (0..orbit_size * num_orbits)
                .map(|z| {
                    let (o, r) = (z / orbit_size, z % orbit_size);
                    o * orbit_size + (r + g) % orbit_size
                })
                .collect()
        })
        .collect()
}

/// Symmetric metric with zero diagonal and off-diagonal values in `[0.5, 1]`,
/// which always satisfies the triangle inequality.
pub fn random_metric<R: Rng + ?Sized>(rng: &mut R, nz: usize) -> Matrix {
    let mut d = Matrix::zeros(nz, nz);
    for a in 0..nz {
        for b in (a + 1)..nz {
            let v = rng.random_range(0.5..=1.0);
            d[(a, b)] = v;
            d[(b, a)] = v;
        }
    }
    d
}

pub fn random_world(spec: &WorldSpec, seed: u64) -> Result<DiscreteWorld> {
    let WorldSpec { orbit_size: k, num_orbits, w_size: nw, .. } = *spec;
    if k == 0 || num_orbits == 0 || nw == 0 {
        return Err(invalid!("world sizes must be positive"));
    }
    let nz = k * num_orbits;
    let ng = k;
    let mut rng = seeded(seed);

    let data = match spec.data {
        DataKind::Free => dirichlet_uniform(&mut rng, nz),
        DataKind::Invariant => {
            let orbit = dirichlet_uniform(&mut rng, num_orbits);
            (0..nz).map(|z| orbit[z / k] / k as f64).collect()
        }
    };
    let aug = match spec.aug {
        AugKind::Uniform => alloc::vec![1.0 / ng as f64; ng],
        AugKind::Dirichlet => dirichlet_uniform(&mut rng, ng),
    };
    let table = cyclic_orbit_table(k, num_orbits);

    let mut channel = Matrix::zeros(nz * ng, nw);
    match spec.channel {
        ChannelKind::Free => {
            for r in 0..nz * ng {
                channel.row_mut(r).copy_from_slice(&dirichlet_uniform(&mut rng, nw));
            }
        }
        ChannelKind::InputKernel | ChannelKind::IgnoresAugmentation => {
            let kernel: Vec<Vec<f64>> = (0..nz).map(|_| dirichlet_uniform(&mut rng, nw)).collect();
            for z in 0..nz {
                for g in 0..ng {
                    let x = if spec.channel == ChannelKind::InputKernel { table[g][z] } else { z };
                    channel.row_mut(z * ng + g).copy_from_slice(&kernel[x]);
                }
            }
        }
        ChannelKind::Constant => {
            let row = dirichlet_uniform(&mut rng, nw);
            for r in 0..nz * ng {
                channel.row_mut(r).copy_from_slice(&row);
            }
        }
        ChannelKind::OrbitOnly => {
            let rows: Vec<Vec<f64>> = (0..num_orbits).map(|_| dirichlet_uniform(&mut rng, nw)).collect();
            for z in 0..nz {
                for g in 0..ng {
                    channel.row_mut(z * ng + g).copy_from_slice(&rows[z / k]);
                }
            }
        }
    }

    let loss = Matrix::from_fn(nw, nz, |_, _| rng.random_range(0.0..=1.0));
    let metric = random_metric(&mut rng, nz);

    DiscreteWorld::new(
        DiscreteDistribution::from_weights(&data)?,
        DiscreteDistribution::from_weights(&aug)?,
        table,
        channel,
        loss,
        metric,
        1.0,
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cyclic_table_is_a_group() {
        let w = random_world(&WorldSpec::new(3, 2, 2), 1).unwrap();
        assert!(w.is_group());
        assert_eq!(w.identity_element(), Some(0));
        assert!(w.triangle_inequality_holds());
        assert_eq!(w.z_size(), 6);
        assert_eq!(w.g_size(), 3);
    }

    #[test]
    fn invariant_data_and_kernel_channel() {
        let spec = WorldSpec::new(3, 2, 4).data(DataKind::Invariant).channel(ChannelKind::InputKernel);
        let w = random_world(&spec, 9).unwrap();
        assert!(w.data_is_invariant(1e-15));
        assert!(w.channel_depends_on_transformed_input(0.0));
        let free = random_world(&WorldSpec::new(3, 2, 4), 9).unwrap();
        assert!(!free.data_is_invariant(1e-12));
        assert!(!free.channel_depends_on_transformed_input(1e-12));
    }

    #[test]
    fn rejects_non_permutation_action() {
        let w = random_world(&WorldSpec::new(2, 1, 2), 1).unwrap();
        let bad = DiscreteWorld::new(
            w.data_dist.clone(),
            w.aug_dist.clone(),
            alloc::vec![alloc::vec![0, 1], alloc::vec![0, 0]],
            w.channel.clone(),
            w.loss_table.clone(),
            w.metric.clone(),
            1.0,
        );
        assert!(bad.is_err());
    }

    #[test]
    fn seeded_generation_repeats() {
        let spec = WorldSpec::new(2, 2, 3);
        assert_eq!(random_world(&spec, 5).unwrap(), random_world(&spec, 5).unwrap());
        assert_ne!(random_world(&spec, 5).unwrap(), random_world(&spec, 6).unwrap());
    }
}
