//! Entropic distinguishability measures and the bounds relating them to
//! Schatten distances.
//!
//! All logarithms are natural, so entropies and divergences are in nats.

use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, schatten_norm, SchattenP, EIGENVALUE_FLOOR};
use crate::states::{dot3, norm3, DensityMatrix};

/// Values in `(−NEGATIVE_TOL, 0)` are rounding noise and clamp to zero.
pub const NEGATIVE_TOL: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum DivergenceKind {
    /// Umegaki relative entropy `S(ρ‖σ)`.
    RelativeEntropy,
    /// `S_J = (S(ρ‖σ) + S(σ‖ρ))/2`.
    Jeffreys,
    /// `D_J = sqrt(S_J)`.
    JeffreysDistance,
    /// `S_JS = S((ρ+σ)/2) − (S(ρ) + S(σ))/2`.
    JensenShannon,
    /// `D_JS = sqrt(S_JS)`.
    JensenShannonDistance,
    VonNeumann,
    MinRelativeEntropy,
    MaxRelativeEntropy,
}

/// A divergence value tagged with what it measures.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Divergence {
    pub kind: DivergenceKind,
    pub value: f64,
}

impl Divergence {
    /// Evaluates `kind` on `(rho, sigma)`; the entropy ignores `sigma`.
    pub fn evaluate(
        kind: DivergenceKind,
        rho: &DensityMatrix,
        sigma: &DensityMatrix,
    ) -> Result<Self> {
        let value = match kind {
            DivergenceKind::RelativeEntropy => relative_entropy(rho, sigma)?,
            DivergenceKind::Jeffreys => jeffreys(rho, sigma)?,
            DivergenceKind::JeffreysDistance => qjpd(rho, sigma)?,
            DivergenceKind::JensenShannon => jensen_shannon(rho, sigma)?,
            DivergenceKind::JensenShannonDistance => qjsd(rho, sigma)?,
            DivergenceKind::VonNeumann => von_neumann_entropy(rho),
            DivergenceKind::MinRelativeEntropy => qre_bounds(rho, sigma)?.s_min,
            DivergenceKind::MaxRelativeEntropy => qre_bounds(rho, sigma)?.s_max,
        };
        Ok(Self { kind, value })
    }
}

/// `x ln x + (1 − x) ln(1 − x)` with `0 ln 0 = 0`.
pub fn h(x: f64) -> f64 {
    xlnx(x) + xlnx(1.0 - x)
}

pub(crate) fn xlnx(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.ln()
    }
}

/// `ln((1 + x)/(1 − x))`.
pub fn log_ratio(x: f64) -> f64 {
    2.0 * x.atanh()
}

/// `ln((1 + x)/(1 − x)) / x`, continued to its limit 2 at `x = 0`.
pub fn log_ratio_over(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        2.0 * (1.0 + x2 / 3.0 + x2 * x2 / 5.0)
    } else {
        log_ratio(x) / x
    }
}

pub(crate) fn clamp_nonnegative(value: f64) -> Result<f64> {
    if value >= 0.0 {
        Ok(value)
    } else if value > -NEGATIVE_TOL {
        Ok(0.0)
    } else {
        Err(Error::NegativeDivergence { value })
    }
}

fn require_full_rank(rho: &DensityMatrix) -> Result<()> {
    let min = rho.kappa_min_max().0;
    if min <= EIGENVALUE_FLOOR {
        return Err(Error::SingularState {
            min_eigenvalue: min,
        });
    }
    Ok(())
}

fn require_same_dim(a: &DensityMatrix, b: &DensityMatrix) -> Result<()> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(())
}

/// `S(ρ) = −Σ p ln p`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> f64 {
    -rho.eigenvalues().iter().map(|&p| xlnx(p)).sum::<f64>()
}

/// `S(ρ‖σ) = Tr ρ(ln ρ − ln σ)` for full-rank states. `Tr(ρ ln σ)` is
/// evaluated in the eigenbasis of σ, so no matrix logarithm is formed.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    require_same_dim(rho, sigma)?;
    require_full_rank(rho)?;
    require_full_rank(sigma)?;
    let neg_entropy: f64 = rho.eigenvalues().iter().map(|&p| p * p.ln()).sum();
    let populations = sigma.eigen().diagonal_in_basis(rho.matrix());
    let cross: f64 = populations
        .iter()
        .zip(sigma.eigenvalues())
        .map(|(&w, &q)| w * q.ln())
        .sum();
    clamp_nonnegative(neg_entropy - cross)
}

/// Quantum Jeffreys divergence `S_J`.
pub fn jeffreys(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    let forward = relative_entropy(rho, sigma)?;
    let backward = relative_entropy(sigma, rho)?;
    Ok(0.5 * (forward + backward))
}

/// Quantum Jeffreys pseudo-distance `D_J = sqrt(S_J)`.
pub fn qjpd(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    Ok(jeffreys(rho, sigma)?.sqrt())
}

/// Quantum Jensen-Shannon divergence in its entropy form; needs no full
/// rank.
pub fn jensen_shannon(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    require_same_dim(rho, sigma)?;
    let mid = DensityMatrix::mix(rho, sigma, 0.5)?;
    let value =
        von_neumann_entropy(&mid) - 0.5 * (von_neumann_entropy(rho) + von_neumann_entropy(sigma));
    clamp_nonnegative(value)
}

/// Quantum Jensen-Shannon distance `D_JS = sqrt(S_JS)`.
pub fn qjsd(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    Ok(jensen_shannon(rho, sigma)?.sqrt())
}

/// Reference values that sandwich `S(ρ‖σ)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QreBounds {
    /// `‖ρ − σ‖₁² / 2`.
    pub pinsker_lower: f64,
    /// `‖ρ − σ‖₂² / κ_min(σ)`.
    pub two_norm_upper: f64,
    /// `−ln Tr(Π_ρ σ)`, zero for full-rank ρ.
    pub s_min: f64,
    /// `ln min{λ : λσ ≥ ρ}`.
    pub s_max: f64,
}

const S_MAX_TOL: f64 = 1e-10;

pub fn qre_bounds(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<QreBounds> {
    require_same_dim(rho, sigma)?;
    require_full_rank(rho)?;
    require_full_rank(sigma)?;
    let diff = rho.matrix().checked_sub(sigma.matrix())?;
    let trace_distance = schatten_norm(&diff, SchattenP::One)?;
    let hs = schatten_norm(&diff, SchattenP::Two)?;
    let pinsker_lower = 0.5 * trace_distance * trace_distance;
    let two_norm_upper = hs * hs / sigma.kappa_min_max().0;
    Ok(QreBounds {
        pinsker_lower,
        two_norm_upper,
        s_min: 0.0,
        s_max: max_relative_entropy(rho, sigma)?,
    })
}

/// Bisection for the smallest `λ` with `λσ − ρ ≥ 0`. `λ = 1` is feasible
/// only when ρ = σ, and `κ_max(ρ)/κ_min(σ)` is always feasible.
fn max_relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    let feasible = |lambda: f64| -> Result<bool> {
        let m = sigma
            .matrix()
            .scale_real(lambda)
            .checked_sub(rho.matrix())?;
        Ok(hermitian_eig(&m)?.min() >= -1e-13)
    };
    let mut lo = 1.0;
    if feasible(lo)? {
        return Ok(0.0);
    }
    let mut hi = rho.kappa_min_max().1 / sigma.kappa_min_max().0;
    while hi - lo > S_MAX_TOL {
        let mid = 0.5 * (lo + hi);
        if feasible(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi.ln())
}

/// `G(u, v) = g(u + v, u) − g(u, u + v)` with `u` the smaller of the two
/// minimal eigenvalues and `v` the trace distance `‖ρ − σ‖₁/2`; bounds
/// `|S(ρ‖σ) − S(σ‖ρ)|`.
pub fn asymmetry_bound(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    require_same_dim(rho, sigma)?;
    require_full_rank(rho)?;
    require_full_rank(sigma)?;
    let u = rho.kappa_min_max().0.min(sigma.kappa_min_max().0);
    let diff = rho.matrix().checked_sub(sigma.matrix())?;
    let v = 0.5 * schatten_norm(&diff, SchattenP::One)?;
    asymmetry_function(u, v)
}

/// `G(u, v)` on its domain `max(0, −v) ≤ u ≤ min(1, 1 − v)`.
pub fn asymmetry_function(u: f64, v: f64) -> Result<f64> {
    let slack = 1e-14;
    if !(u.is_finite() && v.is_finite())
        || u < (-v).max(0.0) - slack
        || u > (1.0 - v).min(1.0) + slack
    {
        return Err(Error::Domain(format!(
            "(u, v) = ({u}, {v}) is outside max(0, -v) <= u <= min(1, 1 - v)"
        )));
    }
    let p = (u + v).clamp(0.0, 1.0);
    Ok(binary_relative_entropy(p, u) - binary_relative_entropy(u, p))
}

/// `p ln(p/q) + (1 − p) ln((1 − p)/(1 − q))`.
fn binary_relative_entropy(p: f64, q: f64) -> f64 {
    let term = |a: f64, b: f64| {
        if a <= 0.0 {
            0.0
        } else if b <= 0.0 {
            f64::INFINITY
        } else {
            a * (a / b).ln()
        }
    };
    term(p, q) + term(1.0 - p, 1.0 - q)
}

/// Closed-form `S(ρ₁‖ρ₂)` for qubits from their Bloch vectors:
///
/// `½ ln((1 − r₁²)/(1 − r₂²)) + (r₁/2) L(r₁) − ½ (r₁·r₂) L(r₂)/r₂`,
/// with `L(x) = ln((1 + x)/(1 − x))`.
pub fn qubit_relative_entropy_closed_form(r1: [f64; 3], r2: [f64; 3]) -> Result<f64> {
    let n1 = norm3(r1);
    let n2 = norm3(r2);
    qubit_relative_entropy_from_geometry(n1, n2, projected_cosine(r1, r2, n1, n2))
}

fn projected_cosine(r1: [f64; 3], r2: [f64; 3], n1: f64, n2: f64) -> f64 {
    if n1 == 0.0 || n2 == 0.0 {
        0.0
    } else {
        (dot3(r1, r2) / (n1 * n2)).clamp(-1.0, 1.0)
    }
}

/// Same as [`qubit_relative_entropy_closed_form`] from the two radii and
/// the cosine of the angle between the vectors.
pub fn qubit_relative_entropy_from_geometry(r1: f64, r2: f64, cos_angle: f64) -> Result<f64> {
    for (name, r) in [("r1", r1), ("r2", r2)] {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::InvalidBloch(format!(
                "{name} = {r} is outside [0, 1)"
            )));
        }
    }
    if !(-1.0..=1.0).contains(&cos_angle) {
        return Err(Error::InvalidBloch(format!(
            "cosine {cos_angle} is outside [-1, 1]"
        )));
    }
    let value = 0.5 * ((1.0 - r1 * r1).ln() - (1.0 - r2 * r2).ln()) + 0.5 * r1 * log_ratio(r1)
        - 0.5 * r1 * r2 * cos_angle * log_ratio_over(r2);
    clamp_nonnegative(value)
}

/// Outcome of comparing `dS/dt` with `−Tr(ln ρ_t dρ_t/dt)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EntropyRateCheck {
    /// Central difference of the von Neumann entropy.
    pub lhs: f64,
    /// `−Tr(ln ρ_t · FD(ρ_t))`.
    pub rhs: f64,
    pub gap: f64,
}

/// Checks the entropy-rate identity at `t` with central differences of
/// step `h` (requires `t ≥ h`).
pub fn entropy_rate_identity_check(
    trajectory: impl Fn(f64) -> Result<DensityMatrix>,
    t: f64,
    h: f64,
) -> Result<EntropyRateCheck> {
    if !(h > 0.0 && t >= h) {
        return Err(Error::InvalidParameter(format!(
            "central difference needs 0 < h <= t, got h = {h}, t = {t}"
        )));
    }
    let plus = trajectory(t + h)?;
    let minus = trajectory(t - h)?;
    let here = trajectory(t)?;
    require_full_rank(&here)?;
    let lhs = (von_neumann_entropy(&plus) - von_neumann_entropy(&minus)) / (2.0 * h);
    let derivative = plus
        .matrix()
        .checked_sub(minus.matrix())?
        .scale_real(1.0 / (2.0 * h));
    let eig = here.eigen();
    let weights = eig.diagonal_in_basis(&derivative);
    let rhs = -weights
        .iter()
        .zip(&eig.eigenvalues)
        .map(|(&w, &p)| w * p.ln())
        .sum::<f64>();
    Ok(EntropyRateCheck {
        lhs,
        rhs,
        gap: (lhs - rhs).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::ComplexMatrix;
    use crate::states::BlochQubit;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, LN_2, PI, TAU};

    fn diag(p: &[f64]) -> DensityMatrix {
        DensityMatrix::new(ComplexMatrix::from_real_diagonal(p)).unwrap()
    }

    fn qubit(r: f64, theta: f64, phi: f64) -> DensityMatrix {
        DensityMatrix::from_bloch(&BlochQubit::new(r, theta, phi).unwrap())
    }

    #[test]
    fn entropies() {
        assert_abs_diff_eq!(
            von_neumann_entropy(&DensityMatrix::maximally_mixed(2)),
            LN_2,
            epsilon = 1e-15
        );
        assert_eq!(von_neumann_entropy(&diag(&[1.0, 0.0])), 0.0);
        let expected = -(0.25f64 * 0.25f64.ln() + 0.75 * 0.75f64.ln());
        assert_abs_diff_eq!(
            von_neumann_entropy(&qubit(0.5, 1.0, 1.0)),
            expected,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(-h(0.25), expected, epsilon = 1e-15);
    }

    #[test]
    fn commuting_relative_entropy_is_kl() {
        let a = diag(&[0.5, 0.5]);
        let b = diag(&[0.8, 0.2]);
        let kl = 0.5 * (0.5f64 / 0.8).ln() + 0.5 * (0.5f64 / 0.2).ln();
        let reverse = 0.8 * (0.8f64 / 0.5).ln() + 0.2 * (0.2f64 / 0.5).ln();
        assert_abs_diff_eq!(relative_entropy(&a, &b).unwrap(), kl, epsilon = 1e-15);
        assert_abs_diff_eq!(relative_entropy(&a, &a).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            jeffreys(&a, &b).unwrap(),
            0.5 * (kl + reverse),
            epsilon = 1e-15
        );
        assert_eq!(jeffreys(&a, &b).unwrap(), jeffreys(&b, &a).unwrap());
        assert_eq!(qjpd(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn orthogonal_equal_radius_qubits() {
        // r̂₁·r̂₂ = 0 leaves only (r/2) L(r) = 0.3 ln 4.
        let a = qubit(0.6, 0.0, 0.0);
        let b = qubit(0.6, FRAC_PI_2, 0.0);
        let expected = 0.3 * 4f64.ln();
        assert_abs_diff_eq!(relative_entropy(&a, &b).unwrap(), expected, epsilon = 1e-14);
        assert_abs_diff_eq!(
            qubit_relative_entropy_from_geometry(0.6, 0.6, 0.0).unwrap(),
            expected,
            epsilon = 1e-15
        );
    }

    #[test]
    fn antiparallel_equal_radius_qubits() {
        let expected = 0.5 * 3f64.ln();
        assert_abs_diff_eq!(
            qubit_relative_entropy_from_geometry(0.5, 0.5, -1.0).unwrap(),
            expected,
            epsilon = 1e-15
        );
        let m = relative_entropy(&qubit(0.5, 0.0, 0.0), &qubit(0.5, PI, 0.0)).unwrap();
        assert_abs_diff_eq!(m, expected, epsilon = 1e-14);
    }

    #[test]
    fn closed_form_rejects_bad_input() {
        assert!(qubit_relative_entropy_from_geometry(1.0, 0.5, 0.0).is_err());
        assert!(qubit_relative_entropy_closed_form([0.9, 0.9, 0.0], [0.0; 3]).is_err());
    }

    #[test]
    fn singular_states_rejected() {
        let pure = diag(&[1.0, 0.0]);
        let mixed = DensityMatrix::maximally_mixed(2);
        assert!(matches!(
            relative_entropy(&mixed, &pure),
            Err(Error::SingularState { .. })
        ));
        assert!(matches!(
            jeffreys(&pure, &mixed),
            Err(Error::SingularState { .. })
        ));
    }

    #[test]
    fn orthogonal_pure_states_jensen_shannon() {
        let up = diag(&[1.0, 0.0]);
        let down = diag(&[0.0, 1.0]);
        assert_abs_diff_eq!(jensen_shannon(&up, &down).unwrap(), LN_2, epsilon = 1e-15);
        assert_abs_diff_eq!(qjsd(&up, &down).unwrap(), LN_2.sqrt(), epsilon = 1e-15);
        assert_eq!(qjsd(&up, &up).unwrap(), 0.0);
    }

    #[test]
    fn bounds_for_identical_states() {
        let rho = qubit(0.3, 1.0, 2.0);
        let b = qre_bounds(&rho, &rho).unwrap();
        assert_eq!(b.pinsker_lower, 0.0);
        assert_eq!(b.s_min, 0.0);
        assert_eq!(b.s_max, 0.0);
        assert!(asymmetry_bound(&rho, &rho).unwrap().abs() < 1e-15);
    }

    #[test]
    fn s_max_for_commuting_pair() {
        let p = [0.7, 0.2, 0.1];
        let q = [0.3, 0.3, 0.4];
        let expected = p
            .iter()
            .zip(&q)
            .map(|(a, b)| a / b)
            .fold(f64::MIN, f64::max)
            .ln();
        let b = qre_bounds(&diag(&p), &diag(&q)).unwrap();
        assert_abs_diff_eq!(b.s_max, expected, epsilon = 1e-9);
        let s = relative_entropy(&diag(&p), &diag(&q)).unwrap();
        assert!(b.pinsker_lower <= s && s <= b.two_norm_upper && s <= b.s_max);
    }

    #[test]
    fn asymmetry_domain() {
        assert!(matches!(
            asymmetry_function(0.8, 0.5),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            asymmetry_function(-0.1, 0.1),
            Err(Error::Domain(_))
        ));
        let by_hand = (0.5 * (0.5f64 / 0.2).ln() + 0.5 * (0.5f64 / 0.8).ln())
            - (0.2 * (0.2f64 / 0.5).ln() + 0.8 * (0.8f64 / 0.5).ln());
        assert_abs_diff_eq!(
            asymmetry_function(0.2, 0.3).unwrap(),
            by_hand,
            epsilon = 1e-15
        );
    }

    #[test]
    fn commuting_asymmetry() {
        let a = diag(&[0.5, 0.5]);
        let b = diag(&[0.8, 0.2]);
        let lhs = (relative_entropy(&a, &b).unwrap() - relative_entropy(&b, &a).unwrap()).abs();
        // This pair saturates the bound.
        assert!(lhs <= asymmetry_bound(&a, &b).unwrap() + 1e-14);
    }

    #[test]
    fn static_trajectory_has_zero_entropy_rate() {
        let rho = qubit(0.5, 0.4, 0.2);
        let check = entropy_rate_identity_check(|_| Ok(rho.clone()), 1.0, 1e-5).unwrap();
        assert_eq!(check.lhs, 0.0);
        assert_eq!(check.rhs.abs(), 0.0);
    }

    #[test]
    fn log_ratio_helpers() {
        assert_eq!(log_ratio_over(0.0), 2.0);
        for x in [1e-6f64, 1e-4, 2e-4, 0.3, 0.9] {
            let direct = ((1.0 + x) / (1.0 - x)).ln() / x;
            assert_abs_diff_eq!(log_ratio_over(x), direct, epsilon = 1e-10);
        }
        assert_eq!(h(0.0), 0.0);
        assert_eq!(h(1.0), 0.0);
    }

    proptest! {
        #[test]
        fn symmetric_measures(r1 in 0.0..0.99f64, t1 in 0.0..=PI, r2 in 0.0..0.99f64, t2 in 0.0..=PI, p2 in 0.0..TAU) {
            let a = qubit(r1, t1, 0.0);
            let b = qubit(r2, t2, p2);
            prop_assert!((jeffreys(&a, &b).unwrap() - jeffreys(&b, &a).unwrap()).abs() < 1e-12);
            prop_assert!((jensen_shannon(&a, &b).unwrap() - jensen_shannon(&b, &a).unwrap()).abs() < 1e-12);
            prop_assert!(jensen_shannon(&a, &b).unwrap() <= LN_2 + 1e-12);
        }

        #[test]
        fn closed_form_matches_matrix(r1 in 0.0..0.99f64, t1 in 0.0..=PI, r2 in 0.0..0.99f64, t2 in 0.0..=PI, p2 in 0.0..TAU) {
            let q1 = BlochQubit::new(r1, t1, 0.0).unwrap();
            let q2 = BlochQubit::new(r2, t2, p2).unwrap();
            let closed = qubit_relative_entropy_closed_form(q1.vector(), q2.vector()).unwrap();
            let matrix = relative_entropy(&DensityMatrix::from_bloch(&q1), &DensityMatrix::from_bloch(&q2)).unwrap();
            prop_assert!((closed - matrix).abs() < 1e-9);
        }

        #[test]
        fn sandwich_bounds(r1 in 0.0..0.95f64, t1 in 0.0..=PI, r2 in 0.0..0.95f64, t2 in 0.0..=PI, p2 in 0.0..TAU) {
            let a = qubit(r1, t1, 0.0);
            let b = qubit(r2, t2, p2);
            let s = relative_entropy(&a, &b).unwrap();
            let bounds = qre_bounds(&a, &b).unwrap();
            prop_assert!(bounds.pinsker_lower <= s + 1e-12);
            prop_assert!(s <= bounds.two_norm_upper + 1e-12);
            prop_assert!(bounds.s_min <= s + 1e-12);
            prop_assert!(s <= bounds.s_max + 1e-9);
            let asym = (s - relative_entropy(&b, &a).unwrap()).abs();
            prop_assert!(asym <= asymmetry_bound(&a, &b).unwrap() + 1e-12);
        }
    }
}
