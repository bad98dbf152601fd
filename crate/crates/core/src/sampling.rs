//! Seeded random states, unitaries and drives for property checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::channels::{ChannelKind, KrausChannel, UnitaryDrive};
use crate::error::Result;
use crate::linalg::{ComplexMatrix, C64};
use crate::states::{BlochQubit, DensityMatrix};

/// Deterministic sampler backed by ChaCha8.
pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.rng.random_range(lo..hi)
    }

    pub fn index(&mut self, n: usize) -> usize {
        self.rng.random_range(0..n)
    }

    fn gaussian(&mut self) -> C64 {
        let re: f64 = StandardNormal.sample(&mut self.rng);
        let im: f64 = StandardNormal.sample(&mut self.rng);
        C64::new(re, im)
    }

    fn ginibre(&mut self, dim: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(dim, |_, _| self.gaussian())
    }

    /// Direction drawn uniformly on the unit sphere.
    pub fn unit_vector(&mut self) -> [f64; 3] {
        loop {
            let v: [f64; 3] = std::array::from_fn(|_| StandardNormal.sample(&mut self.rng));
            let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
            if n > 1e-8 {
                return v.map(|x| x / n);
            }
        }
    }

    /// Qubit with radius uniform in `[r_min, r_max]` and isotropic direction.
    pub fn bloch_qubit(&mut self, r_min: f64, r_max: f64) -> BlochQubit {
        let r = self.uniform(r_min, r_max);
        let u = self.unit_vector();
        let theta = u[2].clamp(-1.0, 1.0).acos();
        let phi = u[1].atan2(u[0]).rem_euclid(std::f64::consts::TAU);
        let phi = if phi >= std::f64::consts::TAU {
            0.0
        } else {
            phi
        };
        BlochQubit::new(r, theta, phi).expect("sampled coordinates lie in range")
    }

    /// Ginibre state `G G† / Tr`, mixed with `I/d` so that
    /// `κ_min ≥ kappa_floor`.
    pub fn density_matrix(&mut self, dim: usize, kappa_floor: f64) -> Result<DensityMatrix> {
        let g = self.ginibre(dim);
        let gg = g.checked_mul(&g.adjoint())?;
        let tr = gg.trace().re;
        let raw = gg.scale_real(1.0 / tr).hermitian_part();
        // A spread weight keeps some states close to the floor and some far above it.
        let w = self.uniform(0.0, 1.0 - kappa_floor * dim as f64);
        let mixed = raw
            .scale_real(w)
            .checked_add(&ComplexMatrix::identity(dim).scale_real((1.0 - w) / dim as f64))?;
        DensityMatrix::new(mixed)
    }

    /// Haar-like unitary from Gram-Schmidt on a Ginibre matrix.
    pub fn unitary(&mut self, dim: usize) -> ComplexMatrix {
        let g = self.ginibre(dim);
        let mut cols: Vec<Vec<C64>> = Vec::with_capacity(dim);
        for j in 0..dim {
            let mut v: Vec<C64> = (0..dim).map(|i| g[(i, j)]).collect();
            for q in &cols {
                let proj: C64 = q.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= proj * qi;
                }
            }
            let n = v.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            cols.push(v.into_iter().map(|x| x / n).collect());
        }
        ComplexMatrix::from_fn(dim, |i, j| cols[j][i])
    }

    pub fn unitary_drive(&mut self, norm_min: f64, norm_max: f64) -> UnitaryDrive {
        let n = self.uniform(norm_min, norm_max);
        UnitaryDrive::new(self.unit_vector().map(|x| x * n)).expect("finite drive vector")
    }

    /// One of the three channels with `α` uniform in `[0, 1]` for GAD.
    pub fn channel(&mut self, gamma: f64) -> KrausChannel {
        let kind = [
            ChannelKind::Depolarizing,
            ChannelKind::PhaseDamping,
            ChannelKind::GeneralizedAmplitudeDamping,
        ][self.index(3)];
        let alpha = self.uniform(0.0, 1.0);
        KrausChannel::new(kind, gamma, alpha).expect("valid channel parameters")
    }
}
