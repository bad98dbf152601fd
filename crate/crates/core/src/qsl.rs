//! Quantum speed limits from the Jeffreys and Jensen-Shannon measures.
//!
//! For a trajectory `ρ_t` on `[0, τ]` the speed-limit time is
//! `τ^QSL = D²(ρ₀, ρ_τ) / ⟨⟨f(ρ₀, ρ_t) · v_t⟩⟩_τ`, where `f` is the
//! measure's cost function, `v_t` a speed and `⟨⟨·⟩⟩_τ` the time average
//! over `[0, τ]`. Two speeds are supported: the exact Schatten speed
//! `‖dρ_t/dt‖₁` and the Kraus bound `2 Σ_j ‖K_j ρ₀ dK_j†/dt‖₁`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::channels::{ChannelKind, Drive, KrausSpeedTable, SpeedMethod, Trajectory, UnitaryDrive};
use crate::divergences::{h, jeffreys, jensen_shannon, log_ratio, log_ratio_over};
use crate::error::{Error, Result};
use crate::linalg::{schatten_norm, SchattenP, EIGENVALUE_FLOOR};
use crate::quadrature::{integrate_refined, Refinement};
use crate::states::{cross3, norm3, BlochQubit, DensityMatrix};

/// Time averages below this mark the dynamics as frozen.
pub const FROZEN_THRESHOLD: f64 = 1e-14;

/// Slack allowed on `τ^QSL ≤ τ` before the run is aborted.
pub const VALIDITY_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Measure {
    #[serde(rename = "J")]
    Jeffreys,
    #[serde(rename = "JS")]
    JensenShannon,
}

impl Measure {
    pub fn tag(&self) -> &'static str {
        match self {
            Measure::Jeffreys => "J",
            Measure::JensenShannon => "JS",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpeedMode {
    /// `‖dρ_t/dt‖₁`.
    #[default]
    Exact,
    /// `2 Σ_j ‖K_j ρ₀ dK_j†/dt‖₁`; a unitary drive falls back to the
    /// exact speed.
    KrausBound,
}

impl fmt::Display for SpeedMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SpeedMode::Exact => "exact",
            SpeedMode::KrausBound => "kraus-bound",
        })
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct QslSettings {
    pub refinement: Refinement,
    pub speed_mode: SpeedMode,
}

fn require_full_rank(kappa_min: f64) -> Result<()> {
    if kappa_min <= EIGENVALUE_FLOOR {
        return Err(Error::SingularState {
            min_eigenvalue: kappa_min,
        });
    }
    Ok(())
}

/// `f_J = ½ (|ln(κ_min(ρ₀) κ_min(ρ_t))| + κ_max(ρ₀)/κ_min(ρ_t))`.
pub fn cost_j(rho0: &DensityMatrix, rho_t: &DensityMatrix) -> Result<f64> {
    let (min0, max0) = rho0.kappa_min_max();
    let min_t = rho_t.kappa_min_max().0;
    cost_j_from_spectra(min0, max0, min_t)
}

fn cost_j_from_spectra(min0: f64, max0: f64, min_t: f64) -> Result<f64> {
    require_full_rank(min0)?;
    require_full_rank(min_t)?;
    Ok(0.5 * ((min0.ln() + min_t.ln()).abs() + max0 / min_t))
}

/// `f_JS = ½ |ln(κ_min(ρ_t) κ_min((ρ₀ + ρ_t)/2))|`.
pub fn cost_js(rho0: &DensityMatrix, rho_t: &DensityMatrix) -> Result<f64> {
    let mid = DensityMatrix::mix(rho0, rho_t, 0.5)?;
    cost_js_from_spectra(rho_t.kappa_min_max().0, mid.kappa_min_max().0)
}

fn cost_js_from_spectra(min_t: f64, min_mid: f64) -> Result<f64> {
    require_full_rank(min_t)?;
    require_full_rank(min_mid)?;
    Ok(0.5 * (min_t.ln() + min_mid.ln()).abs())
}

/// Speed entering the QSL denominators.
pub fn speed(traj: &Trajectory, t: f64, mode: SpeedMode) -> Result<f64> {
    match (mode, traj.drive()) {
        (SpeedMode::KrausBound, Drive::Channel(_)) => Ok(2.0 * traj.kraus_speed_sum_numeric(t)?),
        _ => traj.schatten_speed(t, SpeedMethod::Analytic),
    }
}

/// Time averages `⟨⟨f · v⟩⟩_τ` for both measures and both speeds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightedSpeedAverages {
    pub exact_j: f64,
    pub exact_js: f64,
    pub kraus_j: f64,
    pub kraus_js: f64,
    pub converged: bool,
}

impl WeightedSpeedAverages {
    pub fn get(&self, measure: Measure, mode: SpeedMode) -> f64 {
        match (measure, mode) {
            (Measure::Jeffreys, SpeedMode::Exact) => self.exact_j,
            (Measure::JensenShannon, SpeedMode::Exact) => self.exact_js,
            (Measure::Jeffreys, SpeedMode::KrausBound) => self.kraus_j,
            (Measure::JensenShannon, SpeedMode::KrausBound) => self.kraus_js,
        }
    }
}

/// Integrates the weighted speeds over `[0, τ]` on one shared grid.
pub fn weighted_speed_averages(
    traj: &Trajectory,
    tau: f64,
    refinement: &Refinement,
) -> Result<WeightedSpeedAverages> {
    check_tau(tau)?;
    if tau == 0.0 {
        return Ok(WeightedSpeedAverages {
            exact_j: 0.0,
            exact_js: 0.0,
            kraus_j: 0.0,
            kraus_js: 0.0,
            converged: true,
        });
    }
    // Qubit spectra and trace norms follow from Bloch vectors:
    // κ_min = (1 − |v|)/2 and ‖½ v·σ‖₁ = |v|.
    let rho0 = traj.initial_state();
    let r0 = traj.initial().vector();
    let (min0, max0) = rho0.kappa_min_max();
    let table = match traj.drive() {
        Drive::Channel(ch) => Some(KrausSpeedTable::new(ch, rho0.matrix())?),
        Drive::Unitary(_) => None,
    };
    let refined = integrate_refined(
        |t| {
            let rt = traj.bloch_vector(t)?;
            let mid = [0, 1, 2].map(|k| 0.5 * (r0[k] + rt[k]));
            let min_t = 0.5 * (1.0 - norm3(rt));
            let fj = cost_j_from_spectra(min0, max0, min_t)?;
            let fjs = cost_js_from_spectra(min_t, 0.5 * (1.0 - norm3(mid)))?;
            let exact = norm3(traj.bloch_velocity(t)?);
            let kraus = match &table {
                Some(table) => 2.0 * table.evaluate(t)?,
                None => exact,
            };
            Ok([fj * exact, fjs * exact, fj * kraus, fjs * kraus])
        },
        0.0,
        tau,
        refinement,
    )?;
    let [exact_j, exact_js, kraus_j, kraus_js] = refined.values.map(|v| v / tau);
    Ok(WeightedSpeedAverages {
        exact_j,
        exact_js,
        kraus_j,
        kraus_js,
        converged: refined.converged,
    })
}

/// `sqrt(∫₀^τ f(ρ₀, ρ_t) ‖dρ_t/dt‖₁ dt)`, an upper bound on `D(ρ₀, ρ_τ)`.
pub fn integral_upper_bound(
    traj: &Trajectory,
    tau: f64,
    measure: Measure,
    refinement: &Refinement,
) -> Result<f64> {
    let avg = weighted_speed_averages(traj, tau, refinement)?;
    Ok((tau * avg.get(measure, SpeedMode::Exact)).max(0.0).sqrt())
}

fn check_tau(tau: f64) -> Result<()> {
    if !(tau.is_finite() && tau >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "duration must be finite and nonnegative, got {tau}"
        )));
    }
    Ok(())
}

/// Per-measure part of a [`QslReport`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeasureReport {
    pub measure: Measure,
    /// Squared distance `D²(ρ₀, ρ_τ)`, i.e. `S_J` or `S_JS`.
    pub divergence: f64,
    /// `⟨⟨f · v⟩⟩_τ` with the report's speed mode.
    pub speed_avg: f64,
    /// Speed-limit time with the report's speed mode.
    pub tau_qsl: f64,
    pub tau_qsl_exact: f64,
    pub tau_qsl_kraus_bound: f64,
    /// `1 − τ^QSL/τ`.
    pub delta: f64,
    /// Min-max normalized `delta`, filled in by grid sweeps.
    pub delta_normalized: Option<f64>,
    /// `sqrt(∫ f ‖dρ_t/dt‖₁ dt)`.
    pub upper_bound: f64,
    /// The speed average fell below [`FROZEN_THRESHOLD`].
    pub frozen: bool,
}

/// Everything computed for one `(trajectory, τ)` pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QslReport {
    pub tau: f64,
    pub speed_mode: SpeedMode,
    pub jeffreys: Option<MeasureReport>,
    pub jensen_shannon: Option<MeasureReport>,
    /// `½‖ρ₀ − ρ_τ‖₁² / ⟨⟨f_J v⟩⟩_τ`.
    pub tau_j_below: Option<f64>,
    /// `(κ₀ + κ_τ)‖ρ₀ − ρ_τ‖₂² / (2 ⟨⟨f_J v⟩⟩_τ κ₀ κ_τ)` with κ the minimal
    /// eigenvalues.
    pub tau_j_above: Option<f64>,
    /// Every quadrature reached its tolerance.
    pub converged: bool,
}

impl QslReport {
    pub fn measure(&self, measure: Measure) -> Option<&MeasureReport> {
        match measure {
            Measure::Jeffreys => self.jeffreys.as_ref(),
            Measure::JensenShannon => self.jensen_shannon.as_ref(),
        }
    }

    pub fn measure_mut(&mut self, measure: Measure) -> Option<&mut MeasureReport> {
        match measure {
            Measure::Jeffreys => self.jeffreys.as_mut(),
            Measure::JensenShannon => self.jensen_shannon.as_mut(),
        }
    }
}

/// `D² / avg`, or `(0, frozen)` when the average vanishes.
fn ratio(divergence: f64, avg: f64) -> (f64, bool) {
    if avg < FROZEN_THRESHOLD {
        (0.0, true)
    } else {
        (divergence / avg, false)
    }
}

/// Evaluates the requested measures at duration `tau`.
///
/// At `τ = 0` every time is zero and `δ = 1` by continuity. A speed-limit
/// time exceeding `τ` by more than [`VALIDITY_SLACK`] in either speed mode
/// is reported as [`Error::NumericalContract`].
pub fn evaluate(
    traj: &Trajectory,
    tau: f64,
    measures: &[Measure],
    settings: &QslSettings,
) -> Result<QslReport> {
    check_tau(tau)?;
    if measures.is_empty() {
        return Err(Error::InvalidParameter("no measure requested".into()));
    }
    let rho0 = traj.initial_state();
    let rho_tau = traj.state(tau)?;
    let avg = weighted_speed_averages(traj, tau, &settings.refinement)?;
    let mode = settings.speed_mode;

    let mut report = QslReport {
        tau,
        speed_mode: mode,
        jeffreys: None,
        jensen_shannon: None,
        tau_j_below: None,
        tau_j_above: None,
        converged: avg.converged,
    };

    for &measure in measures {
        let divergence = match measure {
            Measure::Jeffreys => jeffreys(&rho0, &rho_tau)?,
            Measure::JensenShannon => jensen_shannon(&rho0, &rho_tau)?,
        };
        let (tau_qsl_exact, frozen_exact) = ratio(divergence, avg.get(measure, SpeedMode::Exact));
        let (tau_qsl_kraus_bound, frozen_kraus) =
            ratio(divergence, avg.get(measure, SpeedMode::KrausBound));
        let (tau_qsl, frozen) = match mode {
            SpeedMode::Exact => (tau_qsl_exact, frozen_exact),
            SpeedMode::KrausBound => (tau_qsl_kraus_bound, frozen_kraus),
        };
        for (value, label) in [
            (tau_qsl_exact, "exact"),
            (tau_qsl_kraus_bound, "kraus-bound"),
        ] {
            if value > tau + VALIDITY_SLACK {
                return Err(Error::NumericalContract(format!(
                    "tau_qsl_{measure} ({label}) = {value:.12e} exceeds tau = {tau:.12e}"
                )));
            }
        }
        let delta = if tau == 0.0 { 1.0 } else { 1.0 - tau_qsl / tau };
        let upper_bound = (tau * avg.get(measure, SpeedMode::Exact)).max(0.0).sqrt();
        let entry = MeasureReport {
            measure,
            divergence,
            speed_avg: avg.get(measure, mode),
            tau_qsl,
            tau_qsl_exact,
            tau_qsl_kraus_bound,
            delta,
            delta_normalized: None,
            upper_bound,
            frozen,
        };
        match measure {
            Measure::Jeffreys => report.jeffreys = Some(entry),
            Measure::JensenShannon => report.jensen_shannon = Some(entry),
        }
    }

    if report.jeffreys.is_some() {
        let (below, above) = hierarchy(&rho0, &rho_tau, avg.get(Measure::Jeffreys, mode))?;
        report.tau_j_below = Some(below);
        report.tau_j_above = Some(above);
    }
    Ok(report)
}

fn hierarchy(rho0: &DensityMatrix, rho_tau: &DensityMatrix, avg_j: f64) -> Result<(f64, f64)> {
    if avg_j < FROZEN_THRESHOLD {
        return Ok((0.0, 0.0));
    }
    let diff = rho0.matrix().checked_sub(rho_tau.matrix())?;
    let one = schatten_norm(&diff, SchattenP::One)?;
    let two = schatten_norm(&diff, SchattenP::Two)?;
    let k0 = rho0.kappa_min_max().0;
    let kt = rho_tau.kappa_min_max().0;
    require_full_rank(k0)?;
    require_full_rank(kt)?;
    let below = 0.5 * one * one / avg_j;
    let above = (k0 + kt) * two * two / (2.0 * avg_j * k0 * kt);
    Ok((below, above))
}

/// Single-measure shortcut for [`evaluate`].
pub fn tau_qsl(
    traj: &Trajectory,
    tau: f64,
    measure: Measure,
    settings: &QslSettings,
) -> Result<MeasureReport> {
    let report = evaluate(traj, tau, &[measure], settings)?;
    Ok(*report
        .measure(measure)
        .expect("requested measure is present"))
}

/// `(τ_J,below, τ_J,above)`.
pub fn tau_qsl_bounds_j(traj: &Trajectory, tau: f64, settings: &QslSettings) -> Result<(f64, f64)> {
    let report = evaluate(traj, tau, &[Measure::Jeffreys], settings)?;
    Ok((
        report.tau_j_below.expect("Jeffreys requested"),
        report.tau_j_above.expect("Jeffreys requested"),
    ))
}

/// Closed-form speed-limit times for a qubit under `H = n·σ`.
///
/// Jeffreys:
/// `‖n̂×r̂‖ L(r) sin²(‖n‖τ) / (‖n‖ (2|ln((1−r)/2)| + (1+r)/(1−r)))`.
/// Jensen-Shannon: `(h((1−r)/2) − h((1−ν_τ)/2)) /
/// (r ‖n‖ ‖n̂×r̂‖ ⟨⟨|ln((1−r)(1−ν_t)/4)|⟩⟩_τ)`, the average by quadrature.
pub fn tau_qsl_unitary(
    drive: &UnitaryDrive,
    q: &BlochQubit,
    tau: f64,
    measure: Measure,
    refinement: &Refinement,
) -> Result<f64> {
    check_tau(tau)?;
    let r = q.r();
    let norm = drive.norm();
    let cross = unit_cross(drive, q);
    if r == 0.0 || norm == 0.0 || cross == 0.0 || tau == 0.0 {
        return Ok(0.0);
    }
    let sin2 = (norm * tau).sin().powi(2);
    match measure {
        Measure::Jeffreys => {
            let eta = (1.0 + r) / (1.0 - r);
            Ok(cross * log_ratio(r) * sin2 / (norm * (2.0 * ((1.0 - r) / 2.0).ln().abs() + eta)))
        }
        Measure::JensenShannon => {
            let traj = Trajectory::unitary(*q, *drive);
            let nu_tau = traj.analytic_nu(tau)?;
            let numerator = h((1.0 - r) / 2.0) - h((1.0 - nu_tau) / 2.0);
            let avg = integrate_refined(
                |t| {
                    let nu = traj.analytic_nu(t)?;
                    Ok([((1.0 - r) * (1.0 - nu) / 4.0).ln().abs()])
                },
                0.0,
                tau,
                refinement,
            )?
            .values[0]
                / tau;
            Ok(numerator / (r * norm * cross * avg))
        }
    }
}

/// Mandelstam-Tamm style floor: the unitary speed-limit time with the
/// commutator norm `‖−i[H, ρ₀]‖₁` replaced by its upper bound `2ΔH`.
pub fn mt_variance_floor(
    drive: &UnitaryDrive,
    q: &BlochQubit,
    tau: f64,
    measure: Measure,
    refinement: &Refinement,
) -> Result<f64> {
    check_tau(tau)?;
    let delta_h = crate::channels::energy_variance(drive, q).sqrt();
    if delta_h == 0.0 || tau == 0.0 {
        return Ok(0.0);
    }
    let traj = Trajectory::unitary(*q, *drive);
    let rho0 = traj.initial_state();
    let rho_tau = traj.state(tau)?;
    let (min0, max0) = rho0.kappa_min_max();
    require_full_rank(min0)?;
    match measure {
        Measure::Jeffreys => {
            let d2 = jeffreys(&rho0, &rho_tau)?;
            Ok(d2 / ((2.0 * min0.ln().abs() + max0 / min0) * delta_h))
        }
        Measure::JensenShannon => {
            let d2 = jensen_shannon(&rho0, &rho_tau)?;
            let avg = integrate_refined(
                |t| {
                    let rho_t = traj.state(t)?;
                    let mid = DensityMatrix::mix(&rho0, &rho_t, 0.5)?;
                    Ok([cost_js_from_spectra(
                        rho_t.kappa_min_max().0,
                        mid.kappa_min_max().0,
                    )?])
                },
                0.0,
                tau,
                refinement,
            )?
            .values[0]
                / tau;
            Ok(d2 / (avg * 2.0 * delta_h))
        }
    }
}

fn unit_cross(drive: &UnitaryDrive, q: &BlochQubit) -> f64 {
    let norm = drive.norm();
    if norm == 0.0 {
        return 0.0;
    }
    norm3(cross3(drive.n().map(|x| x / norm), q.unit_vector()))
}

/// Closed-form distances and speed-limit ratios for the three channels.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClosedForm {
    /// `D_J(ρ₀, ρ_τ)` under depolarizing noise.
    DepolarizingJeffreys,
    /// `τ_J^QSL/τ` under depolarizing noise, Kraus-bound speed.
    DepolarizingQslRatioJ,
    /// `D_JS(ρ₀, ρ_τ)` under depolarizing noise.
    DepolarizingJensenShannon,
    /// `τ_JS^QSL/τ` under depolarizing noise, Kraus-bound speed.
    DepolarizingQslRatioJs,
    /// `D_J(ρ₀, ρ_τ)` under phase damping.
    PhaseDampingJeffreys,
    /// `D_JS(ρ₀, ρ_τ)` under phase damping.
    PhaseDampingJensenShannon,
    /// `D_J(ρ₀, ρ_τ)` under generalized amplitude damping.
    GadJeffreys,
    /// `D_JS(ρ₀, ρ_τ)` under generalized amplitude damping.
    GadJensenShannon,
}

impl ClosedForm {
    pub const ALL: [ClosedForm; 8] = [
        ClosedForm::DepolarizingJeffreys,
        ClosedForm::DepolarizingQslRatioJ,
        ClosedForm::DepolarizingJensenShannon,
        ClosedForm::DepolarizingQslRatioJs,
        ClosedForm::PhaseDampingJeffreys,
        ClosedForm::PhaseDampingJensenShannon,
        ClosedForm::GadJeffreys,
        ClosedForm::GadJensenShannon,
    ];

    pub fn channel(&self) -> ChannelKind {
        match self {
            ClosedForm::DepolarizingJeffreys
            | ClosedForm::DepolarizingQslRatioJ
            | ClosedForm::DepolarizingJensenShannon
            | ClosedForm::DepolarizingQslRatioJs => ChannelKind::Depolarizing,
            ClosedForm::PhaseDampingJeffreys | ClosedForm::PhaseDampingJensenShannon => {
                ChannelKind::PhaseDamping
            }
            ClosedForm::GadJeffreys | ClosedForm::GadJensenShannon => {
                ChannelKind::GeneralizedAmplitudeDamping
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ClosedForm::DepolarizingJeffreys => "depolarizing-jeffreys-distance",
            ClosedForm::DepolarizingQslRatioJ => "depolarizing-qsl-ratio-j",
            ClosedForm::DepolarizingJensenShannon => "depolarizing-jensen-shannon-distance",
            ClosedForm::DepolarizingQslRatioJs => "depolarizing-qsl-ratio-js",
            ClosedForm::PhaseDampingJeffreys => "phase-damping-jeffreys-distance",
            ClosedForm::PhaseDampingJensenShannon => "phase-damping-jensen-shannon-distance",
            ClosedForm::GadJeffreys => "gad-jeffreys-distance",
            ClosedForm::GadJensenShannon => "gad-jensen-shannon-distance",
        }
    }

    /// Evaluates the closed form for `traj` at duration `tau`.
    pub fn evaluate(&self, traj: &Trajectory, tau: f64) -> Result<f64> {
        check_tau(tau)?;
        let Drive::Channel(ch) = traj.drive() else {
            return Err(Error::ChannelMismatch(format!(
                "{} needs a {} channel, got a unitary drive",
                self.name(),
                self.channel()
            )));
        };
        if ch.kind() != self.channel() {
            return Err(Error::ChannelMismatch(format!(
                "{} needs a {} channel, got {}",
                self.name(),
                self.channel(),
                ch.kind()
            )));
        }
        let q = traj.initial();
        let r = q.r();
        let r_tau = traj.analytic_radius(tau)?;
        let nu_tau = traj.analytic_nu(tau)?;
        let lambda = ch.lambda(tau)?;
        let keep = (-ch.gamma() * tau).exp();
        let root = (-0.5 * ch.gamma() * tau).exp();
        let js_distance = || {
            let s = h((1.0 - r) / 2.0) + h((1.0 - r_tau) / 2.0) - 2.0 * h((1.0 - nu_tau) / 2.0);
            (s.max(0.0) / 2.0).sqrt()
        };
        Ok(match self {
            ClosedForm::DepolarizingJeffreys => {
                0.5 * ((r - r_tau) * (log_ratio(r) - log_ratio(r_tau)))
                    .max(0.0)
                    .sqrt()
            }
            ClosedForm::DepolarizingQslRatioJ => {
                if tau == 0.0 || r == 0.0 {
                    return Ok(0.0);
                }
                let numerator = r / 3.0 * lambda * (log_ratio(r) - log_ratio(r_tau));
                let denominator = (1.0 + keep) * (-r * keep).ln_1p() - (3.0 - keep) * (-r).ln_1p()
                    + lambda * (2.0 * std::f64::consts::LN_2 + 1.0);
                numerator / denominator
            }
            ClosedForm::DepolarizingJensenShannon
            | ClosedForm::PhaseDampingJensenShannon
            | ClosedForm::GadJensenShannon => js_distance(),
            ClosedForm::DepolarizingQslRatioJs => {
                if tau == 0.0 || r == 0.0 {
                    return Ok(0.0);
                }
                let s = h((1.0 - r) / 2.0) + h((1.0 - r_tau) / 2.0) - 2.0 * h((1.0 - nu_tau) / 2.0);
                let denominator = (2.0 + std::f64::consts::LN_2) * (r - r_tau)
                    - (1.0 - r_tau) * ((1.0 - r_tau) / 4.0).ln()
                    - (2.0 - r - r_tau) * (2.0 - r - r_tau).ln()
                    + 3.0 * (1.0 - r) * (-r).ln_1p();
                2.0 * r / 3.0 * s / denominator
            }
            ClosedForm::PhaseDampingJeffreys => {
                let sin = q.theta().sin();
                let bracket = log_ratio(r) - r * root * log_ratio_over(r_tau);
                0.5 * sin * (r * (1.0 - root) * bracket).max(0.0).sqrt()
            }
            ClosedForm::GadJeffreys => {
                let xi = gad_xi(r, q.theta(), ch.alpha(), lambda);
                let inner = xi * log_ratio(r)
                    + r_tau * log_ratio(r_tau)
                    + r * (xi - r) * log_ratio_over(r_tau);
                0.5 * inner.max(0.0).sqrt()
            }
        })
    }
}

/// `ξ = r (1 − sqrt(1−λ)) (1 + sqrt(1−λ) cos²θ) − (2α − 1) λ cosθ`.
pub fn gad_xi(r: f64, theta: f64, alpha: f64, lambda: f64) -> f64 {
    let root = (1.0 - lambda).max(0.0).sqrt();
    let c = theta.cos();
    r * (1.0 - root) * (1.0 + root * c * c) - (2.0 * alpha - 1.0) * lambda * c
}

/// `δ = 1 − τ^QSL/τ`.
pub fn relative_error(tau_qsl: f64, tau: f64) -> Result<f64> {
    if !(tau.is_finite() && tau > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "relative error needs a positive duration, got {tau}"
        )));
    }
    Ok(1.0 - tau_qsl / tau)
}

/// Min-max normalized values; `degenerate` marks a constant input, for
/// which every value is reported as zero.
#[derive(Clone, Debug, PartialEq)]
pub struct Normalized {
    pub values: Vec<f64>,
    pub degenerate: bool,
}

/// Spreads below this count as a constant grid.
pub const DEGENERATE_SPREAD: f64 = 1e-12;

pub fn normalize_over_grid(values: &[f64]) -> Normalized {
    let min = values.iter().copied().fold(f64::INFINITY, f64::min);
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let spread = max - min;
    if values.is_empty() || spread.is_nan() || spread <= DEGENERATE_SPREAD {
        return Normalized {
            values: vec![0.0; values.len()],
            degenerate: true,
        };
    }
    Normalized {
        values: values.iter().map(|v| (v - min) / (max - min)).collect(),
        degenerate: false,
    }
}
