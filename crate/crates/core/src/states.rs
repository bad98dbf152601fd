//! Density matrices and the Bloch parametrization of qubits.

use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, ComplexMatrix, EigenDecomposition, C64};

/// Largest accepted `|Tr ρ − 1|`.
pub const TRACE_TOL: f64 = 1e-8;

/// Most negative eigenvalue still accepted as positive semidefinite.
pub const PSD_TOL: f64 = 1e-12;

/// Qubit state `(1/2)(I + r·σ)` with `r = r (sinθ cosφ, sinθ sinφ, cosθ)`.
///
/// `r < 1` is enforced so that every `BlochQubit` is full rank.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochQubit {
    r: f64,
    theta: f64,
    phi: f64,
}

impl BlochQubit {
    pub fn new(r: f64, theta: f64, phi: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::InvalidBloch(format!("r = {r} is outside [0, 1)")));
        }
        if !(0.0..=PI).contains(&theta) {
            return Err(Error::InvalidBloch(format!(
                "theta = {theta} is outside [0, pi]"
            )));
        }
        if !(0.0..TAU).contains(&phi) {
            return Err(Error::InvalidBloch(format!(
                "phi = {phi} is outside [0, 2pi)"
            )));
        }
        Ok(Self { r, theta, phi })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }

    pub fn unit_vector(&self) -> [f64; 3] {
        let (st, ct) = self.theta.sin_cos();
        let (sp, cp) = self.phi.sin_cos();
        [st * cp, st * sp, ct]
    }

    pub fn vector(&self) -> [f64; 3] {
        self.unit_vector().map(|x| self.r * x)
    }

    /// `((1 − r)/2, (1 + r)/2)`.
    pub fn kappa_min_max(&self) -> (f64, f64) {
        ((1.0 - self.r) / 2.0, (1.0 + self.r) / 2.0)
    }
}

/// Spherical coordinates of an arbitrary Bloch vector (`r ≤ 1`), together
/// with the Cartesian vector itself.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochCoordinates {
    pub r: f64,
    pub theta: f64,
    pub phi: f64,
    pub vector: [f64; 3],
}

impl BlochCoordinates {
    /// `θ = φ = 0` when `r = 0`.
    pub fn from_vector(vector: [f64; 3]) -> Self {
        let r = norm3(vector);
        if r == 0.0 {
            return Self {
                r,
                theta: 0.0,
                phi: 0.0,
                vector,
            };
        }
        let theta = vector[0].hypot(vector[1]).atan2(vector[2]);
        let mut phi = vector[1].atan2(vector[0]);
        if phi < 0.0 {
            phi += TAU;
        }
        if phi >= TAU {
            phi = 0.0;
        }
        Self {
            r,
            theta,
            phi,
            vector,
        }
    }

    /// Fails for pure states, which a [`BlochQubit`] cannot represent.
    pub fn qubit(&self) -> Result<BlochQubit> {
        BlochQubit::new(self.r, self.theta, self.phi)
    }
}

/// Validated density matrix with its spectrum cached.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
    eig: EigenDecomposition,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity; nothing is
    /// renormalized.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let eig = hermitian_eig(&matrix)?;
        let matrix = matrix.hermitian_part();
        Self::from_parts(matrix, eig)
    }

    fn from_parts(matrix: ComplexMatrix, eig: EigenDecomposition) -> Result<Self> {
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > TRACE_TOL || trace.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!(
                "trace is {:.12}{:+.3e}i, expected 1",
                trace.re, trace.im
            )));
        }
        if eig.min() < -PSD_TOL {
            return Err(Error::InvalidState(format!(
                "eigenvalue {:.3e} is negative",
                eig.min()
            )));
        }
        Ok(Self { matrix, eig })
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        let matrix = ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64);
        let eig = EigenDecomposition {
            eigenvalues: vec![1.0 / dim as f64; dim],
            eigenvectors: ComplexMatrix::identity(dim),
        };
        Self { matrix, eig }
    }

    pub fn from_bloch(q: &BlochQubit) -> Self {
        Self::from_bloch_vector(q.vector()).expect("BlochQubit radius is below 1")
    }

    /// Qubit state for any vector with `|v| ≤ 1`. The spectrum
    /// `(1 ∓ |v|)/2` and its eigenvectors are written down in closed form
    /// instead of running the eigensolver.
    pub fn from_bloch_vector(v: [f64; 3]) -> Result<Self> {
        let coords = BlochCoordinates::from_vector(v);
        if !coords.r.is_finite() || coords.r > 1.0 + PSD_TOL {
            return Err(Error::InvalidBloch(format!(
                "Bloch vector norm {} exceeds 1",
                coords.r
            )));
        }
        let r = coords.r.min(1.0);
        let half = C64::new(0.5, 0.0);
        let mut matrix = ComplexMatrix::pauli_combination(v).scale(half);
        matrix[(0, 0)] += half;
        matrix[(1, 1)] += half;

        let (s, c) = (coords.theta / 2.0).sin_cos();
        let phase = C64::from_polar(1.0, coords.phi);
        // Columns: the −r̂ eigenvector, then the +r̂ eigenvector.
        let mut vecs = ComplexMatrix::zeros(2);
        vecs[(0, 0)] = -phase.conj() * s;
        vecs[(1, 0)] = C64::new(c, 0.0);
        vecs[(0, 1)] = C64::new(c, 0.0);
        vecs[(1, 1)] = phase * s;
        let eig = EigenDecomposition {
            eigenvalues: vec![(1.0 - r) / 2.0, (1.0 + r) / 2.0],
            eigenvectors: vecs,
        };
        Ok(Self { matrix, eig })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn eigen(&self) -> &EigenDecomposition {
        &self.eig
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eig.eigenvalues
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    /// (smallest, largest) eigenvalue.
    pub fn kappa_min_max(&self) -> (f64, f64) {
        (self.eig.min(), self.eig.max())
    }

    /// `r_k = Tr(ρ σ_k)`.
    pub fn bloch_vector(&self) -> Result<[f64; 3]> {
        if self.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: self.dim(),
            });
        }
        let m = &self.matrix;
        Ok([
            2.0 * m[(0, 1)].re,
            -2.0 * m[(0, 1)].im,
            (m[(0, 0)] - m[(1, 1)]).re,
        ])
    }

    pub fn to_bloch(&self) -> Result<BlochCoordinates> {
        Ok(BlochCoordinates::from_vector(self.bloch_vector()?))
    }

    /// `w·a + (1 − w)·b`.
    pub fn mix(a: &Self, b: &Self, w: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::InvalidParameter(format!(
                "mixing weight {w} is outside [0, 1]"
            )));
        }
        if a.dim() != b.dim() {
            return Err(Error::DimensionMismatch {
                expected: a.dim(),
                found: b.dim(),
            });
        }
        if a.dim() == 2 {
            let va = a.bloch_vector()?;
            let vb = b.bloch_vector()?;
            return Self::from_bloch_vector([0, 1, 2].map(|k| w * va[k] + (1.0 - w) * vb[k]));
        }
        let m = a
            .matrix
            .scale_real(w)
            .checked_add(&b.matrix.scale_real(1.0 - w))?;
        Self::new(m)
    }

    /// `U ρ U†`.
    pub fn conjugate(&self, u: &ComplexMatrix) -> Result<Self> {
        let m = u.checked_mul(&self.matrix)?.checked_mul(&u.adjoint())?;
        Self::new(m)
    }

    /// Maximum entrywise distance to another state.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.matrix.max_abs_diff(&other.matrix)
    }
}

/// Recomputes the spectrum with the eigensolver, bypassing any closed-form
/// fast path. Used to cross-check qubit states built from Bloch vectors.
pub fn jacobi_spectrum(rho: &DensityMatrix) -> Result<EigenDecomposition> {
    hermitian_eig(rho.matrix())
}

pub(crate) fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

pub(crate) fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}
