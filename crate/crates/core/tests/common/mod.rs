//! Independent 2×2 oracle for the integration tests. Shares no code with
//! the library: its own matrix type, Kraus operators written out entry by
//! entry, and matrix functions through the Sylvester projector formula.

#![allow(dead_code)]

use num_complex::Complex64 as C;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[C; 2]; 2]);

const O: C = C::new(0.0, 0.0);
const I1: C = C::new(1.0, 0.0);

impl Mat2 {
    pub fn zero() -> Self {
        Mat2([[O, O], [O, O]])
    }

    pub fn id() -> Self {
        Mat2([[I1, O], [O, I1]])
    }

    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Mat2([
            [C::new(a, 0.0), C::new(b, 0.0)],
            [C::new(c, 0.0), C::new(d, 0.0)],
        ])
    }

    /// `(I + v·σ)/2`, written out.
    pub fn state(v: [f64; 3]) -> Self {
        Mat2([
            [
                C::new(0.5 * (1.0 + v[2]), 0.0),
                C::new(0.5 * v[0], -0.5 * v[1]),
            ],
            [
                C::new(0.5 * v[0], 0.5 * v[1]),
                C::new(0.5 * (1.0 - v[2]), 0.0),
            ],
        ])
    }

    pub fn state_spherical(r: f64, theta: f64, phi: f64) -> Self {
        Self::state([
            r * theta.sin() * phi.cos(),
            r * theta.sin() * phi.sin(),
            r * theta.cos(),
        ])
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        let a = &self.0;
        let b = &o.0;
        let mut out = [[O; 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(out)
    }

    pub fn add(&self, o: &Mat2) -> Mat2 {
        let mut out = self.0;
        for (row, other) in out.iter_mut().zip(&o.0) {
            for (z, w) in row.iter_mut().zip(other) {
                *z += w;
            }
        }
        Mat2(out)
    }

    pub fn sub(&self, o: &Mat2) -> Mat2 {
        self.add(&o.scale(-1.0))
    }

    pub fn scale(&self, s: f64) -> Mat2 {
        Mat2(self.0.map(|row| row.map(|z| z * s)))
    }

    pub fn dagger(&self) -> Mat2 {
        let a = &self.0;
        Mat2([
            [a[0][0].conj(), a[1][0].conj()],
            [a[0][1].conj(), a[1][1].conj()],
        ])
    }

    pub fn trace(&self) -> C {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> C {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn max_abs_diff(&self, o: &Mat2) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                m = m.max((self.0[i][j] - o.0[i][j]).norm());
            }
        }
        m
    }

    /// Eigenvalues of a Hermitian matrix from the characteristic
    /// polynomial, ascending.
    pub fn eigenvalues(&self) -> [f64; 2] {
        let a = self.0[0][0].re;
        let d = self.0[1][1].re;
        let half_gap = (0.25 * (a - d) * (a - d) + self.0[0][1].norm_sqr()).sqrt();
        let mid = 0.5 * (a + d);
        [mid - half_gap, mid + half_gap]
    }

    /// `f(A)` for Hermitian `A` via `f(λ₁)(A − λ₂)/(λ₁ − λ₂) + f(λ₂)(A − λ₁)/(λ₂ − λ₁)`.
    pub fn func(&self, f: impl Fn(f64) -> f64) -> Mat2 {
        let [l1, l2] = self.eigenvalues();
        if (l2 - l1).abs() < 1e-300 {
            return Mat2::id().scale(f(l1));
        }
        let p1 = self.sub(&Mat2::id().scale(l2)).scale(1.0 / (l1 - l2));
        let p2 = self.sub(&Mat2::id().scale(l1)).scale(1.0 / (l2 - l1));
        p1.scale(f(l1)).add(&p2.scale(f(l2)))
    }

    pub fn log(&self) -> Mat2 {
        self.func(f64::ln)
    }

    /// `σ₁ + σ₂` from the eigenvalues of `A†A`.
    pub fn trace_norm(&self) -> f64 {
        let g = self.dagger().mul(self);
        let [a, b] = g.eigenvalues();
        a.max(0.0).sqrt() + b.max(0.0).sqrt()
    }

    pub fn bloch(&self) -> [f64; 3] {
        [
            2.0 * self.0[0][1].re,
            -2.0 * self.0[0][1].im,
            (self.0[0][0] - self.0[1][1]).re,
        ]
    }

    pub fn radius(&self) -> f64 {
        let v = self.bloch();
        (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
    }
}

pub fn entropy(rho: &Mat2) -> f64 {
    rho.eigenvalues()
        .iter()
        .map(|&p| if p > 0.0 { -p * p.ln() } else { 0.0 })
        .sum()
}

pub fn relative_entropy(rho: &Mat2, sigma: &Mat2) -> f64 {
    rho.mul(&rho.log().sub(&sigma.log())).trace().re
}

pub fn jeffreys(rho: &Mat2, sigma: &Mat2) -> f64 {
    0.5 * (relative_entropy(rho, sigma) + relative_entropy(sigma, rho))
}

pub fn jensen_shannon(rho: &Mat2, sigma: &Mat2) -> f64 {
    let m = rho.add(sigma).scale(0.5);
    0.5 * (relative_entropy(rho, &m) + relative_entropy(sigma, &m))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Noise {
    Depolarizing,
    PhaseDamping,
    Gad(f64),
}

fn ket_bra(i: usize, j: usize) -> Mat2 {
    let mut m = Mat2::zero();
    m.0[i][j] = I1;
    m
}

fn pauli(k: usize) -> Mat2 {
    match k {
        0 => Mat2::real(0.0, 1.0, 1.0, 0.0),
        1 => Mat2([[O, C::new(0.0, -1.0)], [C::new(0.0, 1.0), O]]),
        _ => Mat2::real(1.0, 0.0, 0.0, -1.0),
    }
}

/// Kraus operators `K_j(t)` and their time derivatives `dK_j/dt` for
/// `t > 0`, with `λ_t = 1 − e^{−Γt}`.
pub fn kraus(noise: Noise, gamma: f64, t: f64) -> Vec<(Mat2, Mat2)> {
    let lambda = 1.0 - (-gamma * t).exp();
    let dl = gamma * (-gamma * t).exp();
    // d sqrt(x)/dt for x(t) with rate dx.
    let droot = |x: f64, dx: f64| dx / (2.0 * x.sqrt());
    let s = (1.0 - lambda).sqrt();
    let ds = droot(1.0 - lambda, -dl);
    match noise {
        Noise::Depolarizing => {
            let a0 = 1.0 - 0.75 * lambda;
            let mut ops = vec![(
                Mat2::id().scale(a0.sqrt()),
                Mat2::id().scale(droot(a0, -0.75 * dl)),
            )];
            for k in 0..3 {
                ops.push((
                    pauli(k).scale((lambda / 4.0).sqrt()),
                    pauli(k).scale(droot(lambda / 4.0, dl / 4.0)),
                ));
            }
            ops
        }
        Noise::PhaseDamping => vec![
            (
                ket_bra(0, 0).add(&ket_bra(1, 1).scale(s)),
                ket_bra(1, 1).scale(ds),
            ),
            (
                ket_bra(1, 1).scale(lambda.sqrt()),
                ket_bra(1, 1).scale(droot(lambda, dl)),
            ),
        ],
        Noise::Gad(alpha) => {
            let a = alpha.sqrt();
            let b = (1.0 - alpha).sqrt();
            vec![
                (
                    ket_bra(0, 0).add(&ket_bra(1, 1).scale(s)).scale(a),
                    ket_bra(1, 1).scale(a * ds),
                ),
                (
                    ket_bra(0, 1).scale(a * lambda.sqrt()),
                    ket_bra(0, 1).scale(a * droot(lambda, dl)),
                ),
                (
                    ket_bra(0, 0).scale(s).add(&ket_bra(1, 1)).scale(b),
                    ket_bra(0, 0).scale(b * ds),
                ),
                (
                    ket_bra(1, 0).scale(b * lambda.sqrt()),
                    ket_bra(1, 0).scale(b * droot(lambda, dl)),
                ),
            ]
        }
    }
}

pub fn apply(noise: Noise, gamma: f64, t: f64, rho: &Mat2) -> Mat2 {
    kraus(noise, gamma, t)
        .iter()
        .fold(Mat2::zero(), |acc, (k, _)| {
            acc.add(&k.mul(rho).mul(&k.dagger()))
        })
}

/// Smallest time used in place of `t = 0`, where `dK/dt` diverges while
/// `K ρ dK†` stays finite.
pub const TINY_T: f64 = 1e-14;

/// `Σ_j ‖K_j ρ dK_j†/dt‖₁`.
pub fn kraus_speed_sum(noise: Noise, gamma: f64, t: f64, rho: &Mat2) -> f64 {
    kraus(noise, gamma, t.max(TINY_T))
        .iter()
        .map(|(k, dk)| k.mul(rho).mul(&dk.dagger()).trace_norm())
        .sum()
}

/// Deterministic xorshift stream in `[0, 1)`, independent of the library
/// sampler.
pub struct Stream(u64);

impl Stream {
    pub fn new(seed: u64) -> Self {
        Stream(seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1)
    }

    pub fn next(&mut self) -> f64 {
        self.0 ^= self.0 << 13;
        self.0 ^= self.0 >> 7;
        self.0 ^= self.0 << 17;
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next()
    }

    /// `(r, θ, φ)` with isotropic direction.
    pub fn qubit(&mut self, r_lo: f64, r_hi: f64) -> (f64, f64, f64) {
        let r = self.range(r_lo, r_hi);
        let theta = (1.0 - 2.0 * self.next()).acos();
        let phi = self.range(0.0, std::f64::consts::TAU);
        (r, theta, phi)
    }
}
