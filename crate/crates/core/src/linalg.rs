//! Small dense complex-matrix kernel.
//!
//! Everything here targets the tiny dimensions that show up in qubit and
//! qutrit numerics (d up to a few dozen). Hermitian spectra come from a
//! cyclic complex Jacobi solver, which is slow asymptotically but accurate
//! to roughly machine precision in absolute terms, including for the
//! smallest eigenvalues that the logarithm-based measures depend on.

use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Tolerance on `max |A_ij - conj(A_ji)|` for a matrix to count as Hermitian.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Eigenvalues at or below this value make `ln ρ` undefined for our purposes.
pub const EIGENVALUE_FLOOR: f64 = 1e-12;

/// Jacobi stops once the off-diagonal Frobenius norm drops below this
/// fraction of the full Frobenius norm.
pub const JACOBI_OFF_DIAGONAL_TOL: f64 = 1e-13;

pub const JACOBI_MAX_SWEEPS: usize = 100;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);

/// Square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                data.push(f(i, j));
            }
        }
        Self { dim, data }
    }

    /// Builds a matrix from rows; every row must have as many entries as
    /// there are rows.
    pub fn from_rows(rows: &[Vec<C64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(Error::Shape("matrix must have at least one row".into()));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::Shape(format!(
                    "row {i} has {} entries, expected {dim}",
                    row.len()
                )));
            }
            data.extend_from_slice(row);
        }
        Ok(Self { dim, data })
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &x) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(x, 0.0);
        }
        m
    }

    pub fn pauli_x() -> Self {
        Self::from_fn(2, |i, j| if i != j { ONE } else { ZERO })
    }

    pub fn pauli_y() -> Self {
        let mut m = Self::zeros(2);
        m[(0, 1)] = C64::new(0.0, -1.0);
        m[(1, 0)] = C64::new(0.0, 1.0);
        m
    }

    pub fn pauli_z() -> Self {
        Self::from_real_diagonal(&[1.0, -1.0])
    }

    /// `v·σ` for a real 3-vector.
    pub fn pauli_combination(v: [f64; 3]) -> Self {
        let mut m = Self::zeros(2);
        m[(0, 0)] = C64::new(v[2], 0.0);
        m[(1, 1)] = C64::new(-v[2], 0.0);
        m[(0, 1)] = C64::new(v[0], -v[1]);
        m[(1, 0)] = C64::new(v[0], v[1]);
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * factor).collect(),
        }
    }

    pub fn scale_real(&self, factor: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&z| z * factor).collect(),
        }
    }

    pub fn trace(&self) -> C64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    /// `Tr(self · other)` without forming the product.
    pub fn trace_product(&self, other: &Self) -> Result<C64> {
        self.check_same_dim(other)?;
        let d = self.dim;
        let mut acc = ZERO;
        for i in 0..d {
            for k in 0..d {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        Ok(acc)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        debug_assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `max_ij |A_ij - conj(A_ji)|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let d = self.dim;
        let mut worst = 0.0_f64;
        for i in 0..d {
            for j in i..d {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_deviation() <= HERMITIAN_TOL * self.max_abs().max(1.0)
    }

    /// `(A + A†)/2`.
    pub fn hermitian_part(&self) -> Self {
        Self::from_fn(self.dim, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(self.zip_with(other, |a, b| a + b))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        Ok(self.zip_with(other, |a, b| a - b))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.check_same_dim(other)?;
        let d = self.dim;
        let mut out = Self::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self[(i, k)];
                if a == ZERO {
                    continue;
                }
                for j in 0..d {
                    out.data[i * d + j] += a * other.data[k * d + j];
                }
            }
        }
        Ok(out)
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Result<Self> {
        let d = self.dim;
        let mut a = self.clone();
        let mut inv = Self::identity(d);
        let scale = self.max_abs().max(f64::MIN_POSITIVE);
        for col in 0..d {
            let pivot_row = (col..d)
                .max_by(|&x, &y| a[(x, col)].norm().total_cmp(&a[(y, col)].norm()))
                .expect("non-empty pivot range");
            let pivot = a[(pivot_row, col)];
            if pivot.norm() <= scale * 1e-15 {
                return Err(Error::SingularState {
                    min_eigenvalue: pivot.norm(),
                });
            }
            if pivot_row != col {
                a.swap_rows(pivot_row, col);
                inv.swap_rows(pivot_row, col);
            }
            let pivot_inv = ONE / a[(col, col)];
            for j in 0..d {
                a[(col, j)] *= pivot_inv;
                inv[(col, j)] *= pivot_inv;
            }
            for row in 0..d {
                if row == col {
                    continue;
                }
                let factor = a[(row, col)];
                if factor == ZERO {
                    continue;
                }
                for j in 0..d {
                    let a_cj = a[(col, j)];
                    let inv_cj = inv[(col, j)];
                    a[(row, j)] -= factor * a_cj;
                    inv[(row, j)] -= factor * inv_cj;
                }
            }
        }
        Ok(inv)
    }

    /// Cholesky test for `self - shift·I > 0` (strictly). Uses no
    /// eigendecomposition, so it can validate inputs for the eigen-free
    /// routines.
    pub fn is_positive_definite_above(&self, shift: f64) -> bool {
        let d = self.dim;
        let mut l = vec![ZERO; d * d];
        for j in 0..d {
            let mut diag = self[(j, j)].re - shift;
            for k in 0..j {
                diag -= l[j * d + k].norm_sqr();
            }
            if diag <= 0.0 || !diag.is_finite() {
                return false;
            }
            let ljj = diag.sqrt();
            l[j * d + j] = C64::new(ljj, 0.0);
            for i in (j + 1)..d {
                let mut s = self[(i, j)];
                for k in 0..j {
                    s -= l[i * d + k] * l[j * d + k].conj();
                }
                l[i * d + j] = s / ljj;
            }
        }
        true
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        let d = self.dim;
        for j in 0..d {
            self.data.swap(a * d + j, b * d + j);
        }
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Self {
        Self {
            dim: self.dim,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        }
    }

    fn check_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.dim + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{}) [", self.dim, self.dim)?;
        for i in 0..self.dim {
            write!(f, "  ")?;
            for j in 0..self.dim {
                let z = self[(i, j)];
                write!(f, "{:+.6e}{:+.6e}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

// Operator impls panic on dimension mismatch; use the `checked_*` methods
// when shapes come from outside.
impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.checked_add(rhs).expect("matrix dimensions must match")
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.checked_sub(rhs).expect("matrix dimensions must match")
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        self.checked_mul(rhs).expect("matrix dimensions must match")
    }
}

/// `ab - ba`.
pub fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    let ab = a.checked_mul(b)?;
    let ba = b.checked_mul(a)?;
    ab.checked_sub(&ba)
}

/// Spectrum of a Hermitian matrix: ascending eigenvalues and the unitary
/// whose columns are the matching eigenvectors.
#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues[self.eigenvalues.len() - 1]
    }

    /// `V diag(f(λ)) V†`.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let d = self.dim();
        let v = &self.eigenvectors;
        let fx: Vec<f64> = self.eigenvalues.iter().map(|&x| f(x)).collect();
        ComplexMatrix::from_fn(d, |i, j| {
            (0..d).map(|k| v[(i, k)] * v[(j, k)].conj() * fx[k]).sum()
        })
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        self.map(|x| x)
    }

    /// `⟨v_k|A|v_k⟩` for every eigenvector `v_k`, i.e. the diagonal of
    /// `A` in this eigenbasis.
    pub fn diagonal_in_basis(&self, a: &ComplexMatrix) -> Vec<f64> {
        let d = self.dim();
        let v = &self.eigenvectors;
        (0..d)
            .map(|k| {
                let mut acc = ZERO;
                for i in 0..d {
                    for j in 0..d {
                        acc += v[(i, k)].conj() * a[(i, j)] * v[(j, k)];
                    }
                }
                acc.re
            })
            .collect()
    }
}

/// Cyclic Jacobi eigensolver for Hermitian matrices.
pub fn hermitian_eig(a: &ComplexMatrix) -> Result<EigenDecomposition> {
    let deviation = a.hermitian_deviation();
    if deviation > HERMITIAN_TOL * a.max_abs().max(1.0) {
        return Err(Error::NotHermitian { deviation });
    }
    let d = a.dim();
    let mut m = a.hermitian_part();
    let mut v = ComplexMatrix::identity(d);
    let scale = m.frobenius_norm();

    let mut converged = d < 2 || scale == 0.0;
    let mut sweeps = 0;
    while !converged {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                off_norm: off_diagonal_norm(&m),
            });
        }
        for p in 0..d - 1 {
            for q in (p + 1)..d {
                rotate(&mut m, &mut v, p, q);
            }
        }
        sweeps += 1;
        converged = off_diagonal_norm(&m) <= JACOBI_OFF_DIAGONAL_TOL * scale;
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&x, &y| m[(x, x)].re.total_cmp(&m[(y, y)].re));
    let eigenvalues = order.iter().map(|&k| m[(k, k)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(d, |i, j| v[(i, order[j])]);
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

fn off_diagonal_norm(m: &ComplexMatrix) -> f64 {
    let d = m.dim();
    let mut acc = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                acc += m[(i, j)].norm_sqr();
            }
        }
    }
    acc.sqrt()
}

/// One complex Jacobi rotation zeroing `m[p][q]`. The unitary is
/// `diag(1, e^{-iφ})` (which makes the pivot real) followed by the usual
/// real rotation; `m ← U† m U`, `v ← v U`.
fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let apq = m[(p, q)];
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let phase_conj = (apq / g).conj();
    let app = m[(p, p)].re;
    let aqq = m[(q, q)].re;
    let theta = (aqq - app) / (2.0 * g);
    let t = if theta.abs() > 1e150 {
        0.5 / theta
    } else {
        theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
    };
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    let u00 = C64::new(c, 0.0);
    let u01 = C64::new(s, 0.0);
    let u10 = phase_conj * (-s);
    let u11 = phase_conj * c;

    let d = m.dim();
    for k in 0..d {
        let mkp = m[(k, p)];
        let mkq = m[(k, q)];
        m[(k, p)] = mkp * u00 + mkq * u10;
        m[(k, q)] = mkp * u01 + mkq * u11;
    }
    for k in 0..d {
        let mpk = m[(p, k)];
        let mqk = m[(q, k)];
        m[(p, k)] = u00.conj() * mpk + u10.conj() * mqk;
        m[(q, k)] = u01.conj() * mpk + u11.conj() * mqk;
    }
    m[(p, q)] = ZERO;
    m[(q, p)] = ZERO;
    m[(p, p)] = C64::new(m[(p, p)].re, 0.0);
    m[(q, q)] = C64::new(m[(q, q)].re, 0.0);
    for k in 0..d {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = vkp * u00 + vkq * u10;
        v[(k, q)] = vkp * u01 + vkq * u11;
    }
}

/// Schatten p-norm exponents supported by [`schatten_norm`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SchattenP {
    One,
    Two,
    Inf,
}

/// Singular values in descending order.
///
/// Hermitian input reuses its spectrum. Anything else goes through the
/// Hermitian dilation `[[0, A], [A†, 0]]`, whose eigenvalues are `±σ_i`;
/// this keeps small singular values accurate, unlike `sqrt(eig(A†A))`.
pub fn singular_values(a: &ComplexMatrix) -> Result<Vec<f64>> {
    let d = a.dim();
    let mut sv = if a.is_hermitian() {
        hermitian_eig(a)?
            .eigenvalues
            .iter()
            .map(|x| x.abs())
            .collect::<Vec<_>>()
    } else {
        let dilation = ComplexMatrix::from_fn(2 * d, |i, j| match (i < d, j < d) {
            (true, false) => a[(i, j - d)],
            (false, true) => a[(j, i - d)].conj(),
            _ => ZERO,
        });
        let eig = hermitian_eig(&dilation)?;
        eig.eigenvalues[d..].iter().map(|x| x.max(0.0)).collect()
    };
    sv.sort_by(|x, y| y.total_cmp(x));
    Ok(sv)
}

pub fn schatten_norm(a: &ComplexMatrix, p: SchattenP) -> Result<f64> {
    match p {
        SchattenP::Two => Ok(a.frobenius_norm()),
        SchattenP::One if a.dim() == 2 => Ok(trace_norm_2x2(a)),
        SchattenP::One => Ok(singular_values(a)?.iter().sum()),
        SchattenP::Inf => Ok(singular_values(a)?.first().copied().unwrap_or(0.0)),
    }
}

/// `σ1 + σ2 = sqrt(‖A‖_F² + 2|det A|)` for 2×2 matrices.
fn trace_norm_2x2(a: &ComplexMatrix) -> f64 {
    let det = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)];
    let f2 = a.as_slice().iter().map(|z| z.norm_sqr()).sum::<f64>();
    (f2 + 2.0 * det.norm()).sqrt()
}

/// `ln ρ` from the spectral decomposition.
pub fn matrix_log_spectral(rho: &ComplexMatrix) -> Result<ComplexMatrix> {
    let eig = hermitian_eig(rho)?;
    log_from_eig(&eig)
}

pub(crate) fn log_from_eig(eig: &EigenDecomposition) -> Result<ComplexMatrix> {
    if eig.min() <= EIGENVALUE_FLOOR {
        return Err(Error::SingularState {
            min_eigenvalue: eig.min(),
        });
    }
    Ok(eig.map(f64::ln))
}

/// `exp(A)` for Hermitian `A`.
pub fn matrix_exp_hermitian(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    Ok(hermitian_eig(a)?.map(f64::exp))
}

/// Settings for the integral form of the matrix logarithm.
#[derive(Clone, Copy, Debug)]
pub struct LogQuadrature {
    /// Composite Simpson panels on the fine grid; must be even.
    pub panels: usize,
    /// Largest accepted entrywise gap between the fine and half-resolution
    /// estimates.
    pub tolerance: f64,
    /// Integration window in `x = ln u`.
    pub x_min: f64,
    pub x_max: f64,
}

impl Default for LogQuadrature {
    fn default() -> Self {
        Self {
            panels: 4096,
            tolerance: 1e-8,
            x_min: -60.0,
            x_max: 40.0,
        }
    }
}

/// `ln ρ = ∫₀^∞ du [(1+u)⁻¹ I − (ρ+uI)⁻¹]`, evaluated by quadrature with
/// only matrix inverses (no eigendecomposition), so it can serve as an
/// independent check on [`matrix_log_spectral`].
///
/// The integrand is rewritten without cancellation as
/// `(ρ − I)(ρ + uI)⁻¹ / (1 + u)` and integrated over `x = ln u`, where it
/// decays exponentially at both ends and has an O(1)-wide bump near
/// `x = ln p` for each eigenvalue `p`.
pub fn matrix_log_integral(rho: &ComplexMatrix, quad: &LogQuadrature) -> Result<ComplexMatrix> {
    let deviation = rho.hermitian_deviation();
    if deviation > HERMITIAN_TOL * rho.max_abs().max(1.0) {
        return Err(Error::NotHermitian { deviation });
    }
    if quad.panels < 4 || !quad.panels.is_multiple_of(4) {
        return Err(Error::InvalidParameter(format!(
            "log quadrature panels must be a positive multiple of 4, got {}",
            quad.panels
        )));
    }
    if !rho.is_positive_definite_above(EIGENVALUE_FLOOR) {
        return Err(Error::SingularState {
            min_eigenvalue: f64::NAN,
        });
    }
    let d = rho.dim();
    let shifted = rho - &ComplexMatrix::identity(d);
    let integrand = |x: f64| -> Result<ComplexMatrix> {
        let u = x.exp();
        let mut m = rho.clone();
        for i in 0..d {
            m[(i, i)] += u;
        }
        let resolvent = m.inverse()?;
        Ok(shifted.checked_mul(&resolvent)?.scale_real(u / (1.0 + u)))
    };

    let n = quad.panels;
    let h = (quad.x_max - quad.x_min) / n as f64;
    let mut fine = ComplexMatrix::zeros(d);
    let mut coarse = ComplexMatrix::zeros(d);
    for k in 0..=n {
        let f = integrand(quad.x_min + k as f64 * h)?;
        let w_fine = crate::quadrature::simpson_weight(k, n);
        accumulate(&mut fine, &f, w_fine * h / 3.0);
        if k % 2 == 0 {
            let w_coarse = crate::quadrature::simpson_weight(k / 2, n / 2);
            accumulate(&mut coarse, &f, w_coarse * 2.0 * h / 3.0);
        }
    }
    let estimate = fine.max_abs_diff(&coarse);
    if estimate > quad.tolerance {
        return Err(Error::QuadratureFailure {
            estimate,
            tolerance: quad.tolerance,
        });
    }
    Ok(fine.hermitian_part())
}

fn accumulate(acc: &mut ComplexMatrix, f: &ComplexMatrix, w: f64) {
    for (a, b) in acc.data.iter_mut().zip(&f.data) {
        *a += *b * w;
    }
}
