//! Qubit dynamics: a constant Hamiltonian `H = n·σ` and three Markovian
//! noise channels written in Kraus form.
//!
//! Every channel depends on time only through `λ_t = 1 − e^{−Γt}`. States
//! are propagated through the channel's affine action on the Bloch vector
//! (`r_t = η_t ∘ r + κ_t`), while the Kraus sum is kept as an independent
//! matrix route.

use std::fmt;

use crate::error::{Error, Result};
use crate::linalg::{schatten_norm, ComplexMatrix, SchattenP, C64};
use crate::states::{cross3, dot3, norm3, BlochQubit, DensityMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChannelKind {
    Depolarizing,
    PhaseDamping,
    GeneralizedAmplitudeDamping,
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChannelKind::Depolarizing => "depolarizing",
            ChannelKind::PhaseDamping => "phase-damping",
            ChannelKind::GeneralizedAmplitudeDamping => "gad",
        })
    }
}

/// One term `sqrt(weight) · basis` of a Kraus operator. Storing the squared
/// amplitude and its rate keeps `K ρ dK†` finite at `t = 0`, where
/// `d sqrt(λ_t)/dt` diverges.
#[derive(Clone, Debug)]
pub struct KrausComponent {
    pub weight: f64,
    pub weight_rate: f64,
    pub basis: ComplexMatrix,
}

/// `K = Σ_k sqrt(q_k) M_k`.
#[derive(Clone, Debug)]
pub struct KrausOperator {
    pub components: Vec<KrausComponent>,
}

impl KrausOperator {
    pub fn matrix(&self) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.components[0].basis.dim());
        for c in &self.components {
            out = &out + &c.basis.scale_real(c.weight.max(0.0).sqrt());
        }
        out
    }

    /// `dK/dt`, or `None` where some amplitude vanishes while its weight
    /// still changes (the derivative is unbounded there).
    pub fn derivative(&self) -> Option<ComplexMatrix> {
        let mut out = ComplexMatrix::zeros(self.components[0].basis.dim());
        for c in &self.components {
            let rate = amplitude_rate(c)?;
            out = &out + &c.basis.scale_real(rate);
        }
        Some(out)
    }

    /// `K ρ dK†`, finite even where `dK/dt` itself is not.
    pub fn speed_term(&self, rho: &ComplexMatrix) -> Result<ComplexMatrix> {
        let d = rho.dim();
        let mut out = ComplexMatrix::zeros(d);
        for (k, ck) in self.components.iter().enumerate() {
            let left = ck.basis.checked_mul(rho)?;
            for (l, cl) in self.components.iter().enumerate() {
                let coeff = speed_coefficient(
                    k == l,
                    (ck.weight, ck.weight_rate),
                    (cl.weight, cl.weight_rate),
                )?;
                if coeff != 0.0 {
                    out = &out + &left.checked_mul(&cl.basis.adjoint())?.scale_real(coeff);
                }
            }
        }
        Ok(out)
    }
}

fn amplitude_rate(c: &KrausComponent) -> Option<f64> {
    weight_amplitude_rate(c.weight, c.weight_rate)
}

/// `d sqrt(q)/dt`, or `None` where it diverges.
fn weight_amplitude_rate(weight: f64, rate: f64) -> Option<f64> {
    if weight > 0.0 {
        Some(rate / (2.0 * weight.sqrt()))
    } else if rate == 0.0 {
        Some(0.0)
    } else {
        None
    }
}

/// Coefficient of `M_k ρ M_l†` in `K ρ dK†`: `q_l'/2` on the diagonal and
/// `sqrt(q_k) d sqrt(q_l)/dt` off it.
fn speed_coefficient(same: bool, (wk, _): (f64, f64), (wl, rl): (f64, f64)) -> Result<f64> {
    if same {
        Ok(rl / 2.0)
    } else if wk <= 0.0 {
        Ok(0.0)
    } else {
        let rate = weight_amplitude_rate(wl, rl)
            .ok_or_else(|| Error::InvalidParameter("Kraus derivative is unbounded here".into()))?;
        Ok(wk.sqrt() * rate)
    }
}

/// Precomputed `M_k ρ M_l†` products for repeated evaluation of
/// `Σ_j ‖K_j ρ dK_j†/dt‖₁` along one qubit trajectory.
#[derive(Clone, Debug)]
pub struct KrausSpeedTable {
    channel: KrausChannel,
    /// `products[j][k][l]`, row-major 2×2.
    products: Vec<Vec<Vec<[C64; 4]>>>,
}

impl KrausSpeedTable {
    pub fn new(channel: &KrausChannel, rho: &ComplexMatrix) -> Result<Self> {
        if rho.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: rho.dim(),
            });
        }
        let mut products = Vec::new();
        for bases in channel.kraus_bases() {
            let mut rows = Vec::new();
            for mk in &bases {
                let left = mk.checked_mul(rho)?;
                let mut row = Vec::new();
                for ml in &bases {
                    let p = left.checked_mul(&ml.adjoint())?;
                    row.push([p[(0, 0)], p[(0, 1)], p[(1, 0)], p[(1, 1)]]);
                }
                rows.push(row);
            }
            products.push(rows);
        }
        Ok(Self {
            channel: *channel,
            products,
        })
    }

    pub fn evaluate(&self, t: f64) -> Result<f64> {
        let weights = self.channel.kraus_weights(t)?;
        let mut total = 0.0;
        for (rows, w) in self.products.iter().zip(weights) {
            let mut acc = [C64::new(0.0, 0.0); 4];
            for (k, row) in rows.iter().enumerate() {
                for (l, p) in row.iter().enumerate() {
                    let coeff = speed_coefficient(k == l, w[k], w[l])?;
                    if coeff != 0.0 {
                        for (a, b) in acc.iter_mut().zip(p) {
                            *a += b * coeff;
                        }
                    }
                }
            }
            let det = acc[0] * acc[3] - acc[1] * acc[2];
            let f2: f64 = acc.iter().map(|z| z.norm_sqr()).sum();
            total += (f2 + 2.0 * det.norm()).sqrt();
        }
        Ok(total)
    }
}

/// `Σ_j ‖K_j ρ dK_j†/dt‖₁` for an arbitrary initial state `ρ`.
pub fn kraus_speed_sum_for(ch: &KrausChannel, rho: &ComplexMatrix, t: f64) -> Result<f64> {
    let mut total = 0.0;
    for k in ch.kraus_operators(t)? {
        total += schatten_norm(&k.speed_term(rho)?, SchattenP::One)?;
    }
    Ok(total)
}

/// Bloch-vector action `r ↦ η ∘ r + κ` (η diagonal).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineBlochMap {
    pub eta: [f64; 3],
    pub kappa: [f64; 3],
}

impl AffineBlochMap {
    pub fn apply(&self, r: [f64; 3]) -> [f64; 3] {
        [0, 1, 2].map(|k| self.eta[k] * r[k] + self.kappa[k])
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KrausChannel {
    kind: ChannelKind,
    gamma: f64,
    alpha: f64,
}

impl KrausChannel {
    /// `alpha` is only meaningful for the generalized amplitude damping
    /// channel and must lie in `[0, 1]` regardless.
    pub fn new(kind: ChannelKind, gamma: f64, alpha: f64) -> Result<Self> {
        if !(gamma.is_finite() && gamma > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "decoherence rate must be positive and finite, got {gamma}"
            )));
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in [0, 1], got {alpha}"
            )));
        }
        Ok(Self { kind, gamma, alpha })
    }

    pub fn depolarizing(gamma: f64) -> Result<Self> {
        Self::new(ChannelKind::Depolarizing, gamma, 0.5)
    }

    pub fn phase_damping(gamma: f64) -> Result<Self> {
        Self::new(ChannelKind::PhaseDamping, gamma, 0.5)
    }

    pub fn generalized_amplitude_damping(gamma: f64, alpha: f64) -> Result<Self> {
        Self::new(ChannelKind::GeneralizedAmplitudeDamping, gamma, alpha)
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `λ_t = 1 − e^{−Γt}`.
    pub fn lambda(&self, t: f64) -> Result<f64> {
        check_time(t)?;
        Ok(-(-self.gamma * t).exp_m1())
    }

    /// `1 − λ_t = e^{−Γt}`, exact for large `Γt`.
    fn survival(&self, t: f64) -> f64 {
        (-self.gamma * t).exp()
    }

    /// Time-independent bases `M_k` of each Kraus operator.
    fn kraus_bases(&self) -> Vec<Vec<ComplexMatrix>> {
        let p0 = projector(0, 0);
        let p1 = projector(1, 1);
        match self.kind {
            ChannelKind::Depolarizing => vec![
                vec![ComplexMatrix::identity(2)],
                vec![ComplexMatrix::pauli_x()],
                vec![ComplexMatrix::pauli_y()],
                vec![ComplexMatrix::pauli_z()],
            ],
            ChannelKind::PhaseDamping => vec![vec![p0, p1.clone()], vec![p1]],
            ChannelKind::GeneralizedAmplitudeDamping => vec![
                vec![p0.clone(), p1.clone()],
                vec![projector(0, 1)],
                vec![p0, p1],
                vec![projector(1, 0)],
            ],
        }
    }

    /// `(q, dq/dt)` per component, laid out like [`Self::kraus_bases`];
    /// unused slots are zero.
    fn kraus_weights(&self, t: f64) -> Result<[[(f64, f64); 2]; 4]> {
        let lambda = self.lambda(t)?;
        let keep = self.survival(t);
        let rate = self.gamma * keep;
        let z = (0.0, 0.0);
        Ok(match self.kind {
            ChannelKind::Depolarizing => [
                [(1.0 - 0.75 * lambda, -0.75 * rate), z],
                [(lambda / 4.0, rate / 4.0), z],
                [(lambda / 4.0, rate / 4.0), z],
                [(lambda / 4.0, rate / 4.0), z],
            ],
            ChannelKind::PhaseDamping => [
                [(1.0, 0.0), (keep, -rate)],
                [(lambda, rate), z],
                [z, z],
                [z, z],
            ],
            ChannelKind::GeneralizedAmplitudeDamping => {
                let a = self.alpha;
                let b = 1.0 - a;
                [
                    [(a, 0.0), (a * keep, -a * rate)],
                    [(a * lambda, a * rate), z],
                    [(b * keep, -b * rate), (b, 0.0)],
                    [(b * lambda, b * rate), z],
                ]
            }
        })
    }

    pub fn kraus_operators(&self, t: f64) -> Result<Vec<KrausOperator>> {
        let weights = self.kraus_weights(t)?;
        Ok(self
            .kraus_bases()
            .into_iter()
            .zip(weights)
            .map(|(bases, w)| KrausOperator {
                components: bases
                    .into_iter()
                    .zip(w)
                    .map(|(basis, (weight, weight_rate))| KrausComponent {
                        weight,
                        weight_rate,
                        basis,
                    })
                    .collect(),
            })
            .collect())
    }

    /// `max |Σ K†K − I|` at time `t`.
    pub fn completeness_error(&self, t: f64) -> Result<f64> {
        let mut sum = ComplexMatrix::zeros(2);
        for k in self.kraus_operators(t)? {
            let m = k.matrix();
            sum = &sum + &(&m.adjoint() * &m);
        }
        Ok(sum.max_abs_diff(&ComplexMatrix::identity(2)))
    }

    /// `Σ K ρ K†`.
    pub fn apply(&self, rho: &DensityMatrix, t: f64) -> Result<DensityMatrix> {
        if rho.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                found: rho.dim(),
            });
        }
        let mut out = ComplexMatrix::zeros(2);
        for k in self.kraus_operators(t)? {
            let m = k.matrix();
            out = &out + &(&(&m * rho.matrix()) * &m.adjoint());
        }
        DensityMatrix::new(out)
    }

    pub fn bloch_map(&self, t: f64) -> Result<AffineBlochMap> {
        let lambda = self.lambda(t)?;
        let keep = self.survival(t);
        let root = (-0.5 * self.gamma * t).exp();
        Ok(match self.kind {
            ChannelKind::Depolarizing => AffineBlochMap {
                eta: [keep; 3],
                kappa: [0.0; 3],
            },
            ChannelKind::PhaseDamping => AffineBlochMap {
                eta: [root, root, 1.0],
                kappa: [0.0; 3],
            },
            ChannelKind::GeneralizedAmplitudeDamping => AffineBlochMap {
                eta: [root, root, keep],
                kappa: [0.0, 0.0, (2.0 * self.alpha - 1.0) * lambda],
            },
        })
    }

    /// Time derivative of [`Self::bloch_map`].
    pub fn bloch_map_rate(&self, t: f64) -> Result<AffineBlochMap> {
        check_time(t)?;
        let g = self.gamma;
        let keep = self.survival(t);
        let root = (-0.5 * g * t).exp();
        Ok(match self.kind {
            ChannelKind::Depolarizing => AffineBlochMap {
                eta: [-g * keep; 3],
                kappa: [0.0; 3],
            },
            ChannelKind::PhaseDamping => AffineBlochMap {
                eta: [-0.5 * g * root, -0.5 * g * root, 0.0],
                kappa: [0.0; 3],
            },
            ChannelKind::GeneralizedAmplitudeDamping => AffineBlochMap {
                eta: [-0.5 * g * root, -0.5 * g * root, -g * keep],
                kappa: [0.0, 0.0, (2.0 * self.alpha - 1.0) * g * keep],
            },
        })
    }
}

fn projector(i: usize, j: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(2);
    m[(i, j)] = C64::new(1.0, 0.0);
    m
}

fn check_time(t: f64) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "time must be finite and nonnegative, got {t}"
        )));
    }
    Ok(())
}

/// Constant Hamiltonian `H = n·σ` (ħ = 1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct UnitaryDrive {
    n: [f64; 3],
}

impl UnitaryDrive {
    pub fn new(n: [f64; 3]) -> Result<Self> {
        if n.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "Hamiltonian vector must be finite, got {n:?}"
            )));
        }
        Ok(Self { n })
    }

    pub fn n(&self) -> [f64; 3] {
        self.n
    }

    pub fn norm(&self) -> f64 {
        norm3(self.n)
    }

    pub fn hamiltonian(&self) -> ComplexMatrix {
        ComplexMatrix::pauli_combination(self.n)
    }

    /// `U_t = cos(‖n‖t) I − i sin(‖n‖t) n̂·σ`.
    pub fn unitary(&self, t: f64) -> ComplexMatrix {
        let norm = self.norm();
        if norm == 0.0 {
            return ComplexMatrix::identity(2);
        }
        let (s, c) = (norm * t).sin_cos();
        let axis = ComplexMatrix::pauli_combination(self.n.map(|x| x / norm));
        &ComplexMatrix::identity(2).scale_real(c) + &axis.scale(C64::new(0.0, -s))
    }

    /// Rotates `v` by `2‖n‖t` about `n̂`.
    pub fn rotate(&self, v: [f64; 3], t: f64) -> [f64; 3] {
        let norm = self.norm();
        if norm == 0.0 {
            return v;
        }
        let axis = self.n.map(|x| x / norm);
        let (s, c) = (2.0 * norm * t).sin_cos();
        let cross = cross3(axis, v);
        let along = dot3(axis, v) * (1.0 - c);
        [0, 1, 2].map(|k| v[k] * c + cross[k] * s + axis[k] * along)
    }
}

/// `‖−i[H, ρ₀]‖₁ = 2 r ‖n‖ ‖n̂ × r̂‖`.
pub fn unitary_commutator_norm(drive: &UnitaryDrive, q: &BlochQubit) -> f64 {
    2.0 * norm3(cross3(drive.n(), q.vector()))
}

/// `ΔH² = Tr(ρH²) − Tr(ρH)²`.
pub fn energy_variance(drive: &UnitaryDrive, q: &BlochQubit) -> f64 {
    let n = drive.n();
    (dot3(n, n) - dot3(n, q.vector()).powi(2)).max(0.0)
}

/// `I_H(ρ) = −¼ Tr([ρ, H]²)`, evaluated on matrices.
pub fn coherence(drive: &UnitaryDrive, q: &BlochQubit) -> Result<f64> {
    let rho = DensityMatrix::from_bloch(q);
    let c = crate::linalg::commutator(rho.matrix(), &drive.hamiltonian())?;
    Ok(-0.25 * (&c * &c).trace().re)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Drive {
    Channel(KrausChannel),
    Unitary(UnitaryDrive),
}

/// How [`Trajectory::schatten_speed`] obtains `dρ_t/dt`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpeedMethod {
    /// Derivative of the Bloch map (or `−i[H, ρ_t]`).
    Analytic,
    /// Central difference of the Kraus (or `UρU†`) route, step `1e-5/Γ`.
    FiniteDifference,
}

/// `Σ_j ‖K_j ρ₀ dK_j†/dt‖₁` from its closed form and from the operators.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct KrausSpeedSum {
    pub analytic: f64,
    pub numeric: f64,
}

/// A qubit state moving under one drive.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Trajectory {
    initial: BlochQubit,
    drive: Drive,
}

impl Trajectory {
    pub fn new(initial: BlochQubit, drive: Drive) -> Self {
        Self { initial, drive }
    }

    pub fn channel(initial: BlochQubit, channel: KrausChannel) -> Self {
        Self::new(initial, Drive::Channel(channel))
    }

    pub fn unitary(initial: BlochQubit, drive: UnitaryDrive) -> Self {
        Self::new(initial, Drive::Unitary(drive))
    }

    pub fn initial(&self) -> &BlochQubit {
        &self.initial
    }

    pub fn drive(&self) -> &Drive {
        &self.drive
    }

    pub fn initial_state(&self) -> DensityMatrix {
        DensityMatrix::from_bloch(&self.initial)
    }

    pub fn bloch_vector(&self, t: f64) -> Result<[f64; 3]> {
        check_time(t)?;
        let r0 = self.initial.vector();
        match &self.drive {
            Drive::Channel(ch) => Ok(ch.bloch_map(t)?.apply(r0)),
            Drive::Unitary(u) => Ok(u.rotate(r0, t)),
        }
    }

    pub fn bloch_velocity(&self, t: f64) -> Result<[f64; 3]> {
        match &self.drive {
            Drive::Channel(ch) => {
                let rate = ch.bloch_map_rate(t)?;
                let r0 = self.initial.vector();
                Ok([0, 1, 2].map(|k| rate.eta[k] * r0[k] + rate.kappa[k]))
            }
            Drive::Unitary(u) => {
                let rt = self.bloch_vector(t)?;
                Ok(cross3(u.n(), rt).map(|x| 2.0 * x))
            }
        }
    }

    /// `ρ_t` from the Bloch-vector map.
    pub fn state(&self, t: f64) -> Result<DensityMatrix> {
        DensityMatrix::from_bloch_vector(self.bloch_vector(t)?)
    }

    /// `ρ_t` from the Kraus sum (or `U_t ρ₀ U_t†`), diagonalized by the
    /// general eigensolver.
    pub fn evolve(&self, t: f64) -> Result<DensityMatrix> {
        check_time(t)?;
        let rho0 = self.initial_state();
        match &self.drive {
            Drive::Channel(ch) => ch.apply(&rho0, t),
            Drive::Unitary(u) => rho0.conjugate(&u.unitary(t)),
        }
    }

    /// `dρ_t/dt = ½ (dr_t/dt)·σ`.
    pub fn state_derivative(&self, t: f64) -> Result<ComplexMatrix> {
        let v = self.bloch_velocity(t)?;
        Ok(ComplexMatrix::pauli_combination(v).scale_real(0.5))
    }

    /// Bloch radius `r_t` from its closed form.
    pub fn analytic_radius(&self, t: f64) -> Result<f64> {
        let r = self.initial.r();
        let (s2, c) = self.angles();
        match &self.drive {
            Drive::Unitary(_) => {
                check_time(t)?;
                Ok(r)
            }
            Drive::Channel(ch) => {
                let lambda = ch.lambda(t)?;
                let keep = ch.survival(t);
                Ok(match ch.kind() {
                    ChannelKind::Depolarizing => keep * r,
                    ChannelKind::PhaseDamping => r * (1.0 - lambda * s2).sqrt(),
                    ChannelKind::GeneralizedAmplitudeDamping => {
                        let z = (2.0 * ch.alpha() - 1.0) * lambda + keep * r * c;
                        (z * z + keep * r * r * s2).sqrt()
                    }
                })
            }
        }
    }

    /// Radius `ν_t` of the midpoint `(ρ₀ + ρ_t)/2` from its closed form.
    pub fn analytic_nu(&self, t: f64) -> Result<f64> {
        let r = self.initial.r();
        let (s2, c) = self.angles();
        match &self.drive {
            Drive::Unitary(u) => {
                check_time(t)?;
                let cross = self.unit_cross(u);
                let sin = (u.norm() * t).sin();
                Ok(r * (1.0 - cross * cross * sin * sin).max(0.0).sqrt())
            }
            Drive::Channel(ch) => {
                let lambda = ch.lambda(t)?;
                let root = (-0.5 * ch.gamma() * t).exp();
                Ok(match ch.kind() {
                    ChannelKind::Depolarizing => (1.0 - lambda / 2.0) * r,
                    ChannelKind::PhaseDamping => {
                        r * (1.0 - 0.25 * (lambda + 2.0 * (1.0 - root)) * s2).sqrt()
                    }
                    ChannelKind::GeneralizedAmplitudeDamping => {
                        let a = 2.0 * ch.alpha() - 1.0;
                        let two_minus = 2.0 - lambda;
                        let inner = lambda * a * (2.0 * two_minus * r * c + lambda * a)
                            + r * r
                                * (two_minus * two_minus + (2.0 - two_minus * root) * root * s2);
                        0.5 * inner.max(0.0).sqrt()
                    }
                })
            }
        }
    }

    /// `(sin²θ, cosθ)` of the initial state.
    fn angles(&self) -> (f64, f64) {
        let (s, c) = self.initial.theta().sin_cos();
        (s * s, c)
    }

    fn unit_cross(&self, u: &UnitaryDrive) -> f64 {
        let norm = u.norm();
        if norm == 0.0 {
            return 0.0;
        }
        norm3(cross3(u.n().map(|x| x / norm), self.initial.unit_vector()))
    }

    /// `Σ_j ‖K_j ρ₀ dK_j†/dt‖₁` from the Kraus operators.
    pub fn kraus_speed_sum_numeric(&self, t: f64) -> Result<f64> {
        let Drive::Channel(ch) = &self.drive else {
            return Err(Error::UnsupportedForDrive(
                "a unitary drive has no Kraus-derivative sum".into(),
            ));
        };
        kraus_speed_sum_for(ch, self.initial_state().matrix(), t)
    }

    /// Closed form of the Kraus-derivative sum.
    pub fn kraus_speed_sum_analytic(&self, t: f64) -> Result<f64> {
        let Drive::Channel(ch) = &self.drive else {
            return Err(Error::UnsupportedForDrive(
                "a unitary drive has no Kraus-derivative sum".into(),
            ));
        };
        check_time(t)?;
        let keep = ch.survival(t);
        let g = ch.gamma();
        let r = self.initial.r();
        let (s2, c) = self.angles();
        // (1 − λ)(a + sqrt(a² + r² sin²θ/(1 − λ))), kept finite as λ → 1.
        let branch = |a: f64| keep * a + (keep * keep * a * a + keep * r * r * s2).sqrt();
        Ok(match ch.kind() {
            ChannelKind::Depolarizing => 0.75 * g * keep,
            ChannelKind::PhaseDamping => 0.25 * g * branch(1.0 - r * c),
            ChannelKind::GeneralizedAmplitudeDamping => {
                let alpha = ch.alpha();
                0.25 * g * (alpha * branch(1.0 - r * c) + (1.0 - alpha) * branch(1.0 + r * c))
            }
        })
    }

    pub fn kraus_speed_sum(&self, t: f64) -> Result<KrausSpeedSum> {
        Ok(KrausSpeedSum {
            analytic: self.kraus_speed_sum_analytic(t)?,
            numeric: self.kraus_speed_sum_numeric(t)?,
        })
    }

    /// Central-difference step used by [`SpeedMethod::FiniteDifference`].
    pub fn fd_step(&self) -> f64 {
        let scale = match &self.drive {
            Drive::Channel(ch) => ch.gamma(),
            Drive::Unitary(u) => u.norm(),
        };
        if scale > 0.0 {
            1e-5 / scale
        } else {
            1e-5
        }
    }

    /// Schatten speed `‖dρ_t/dt‖₁`.
    pub fn schatten_speed(&self, t: f64, method: SpeedMethod) -> Result<f64> {
        match method {
            SpeedMethod::Analytic => schatten_norm(&self.state_derivative(t)?, SchattenP::One),
            SpeedMethod::FiniteDifference => {
                let h = self.fd_step();
                if t < h {
                    return Err(Error::InvalidParameter(format!(
                        "finite-difference speed needs t >= {h:e}, got {t}"
                    )));
                }
                let plus = self.evolve(t + h)?;
                let minus = self.evolve(t - h)?;
                let d = plus
                    .matrix()
                    .checked_sub(minus.matrix())?
                    .scale_real(1.0 / (2.0 * h));
                schatten_norm(&d, SchattenP::One)
            }
        }
    }
}
