//! Self-checks: invariants and closed-form-versus-numeric comparisons,
//! grouped into suites by module. Failures are data, never panics.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::channels::{ChannelKind, KrausChannel, Trajectory, UnitaryDrive};
use crate::divergences::{
    jeffreys, jensen_shannon, qjpd, qjsd, qre_bounds, qubit_relative_entropy_closed_form,
    relative_entropy, von_neumann_entropy,
};
use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eig, matrix_log_integral, matrix_log_spectral, schatten_norm, LogQuadrature,
    SchattenP,
};
use crate::qsl::{
    evaluate, mt_variance_floor, tau_qsl_unitary, ClosedForm, Measure, QslSettings, SpeedMode,
};
use crate::quadrature::Refinement;
use crate::sampling::Sampler;
use crate::scenario::{run_scenario, Axis, DriveKind, ScenarioConfig};
use crate::states::{BlochQubit, DensityMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Linalg,
    States,
    Divergences,
    Channels,
    Qsl,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Linalg,
        Suite::States,
        Suite::Divergences,
        Suite::Channels,
        Suite::Qsl,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Linalg => "linalg",
            Suite::States => "states",
            Suite::Divergences => "divergences",
            Suite::Channels => "channels",
            Suite::Qsl => "qsl",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown suite `{s}`")))
    }
}

/// One named check: how many samples were examined, how many broke the
/// tolerance, and the worst gap seen. Informational checks report
/// findings without ever failing.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub samples: usize,
    pub failures: usize,
    pub max_gap: f64,
    pub tolerance: f64,
    pub informational: bool,
    pub detail: String,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.informational || self.failures == 0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }

    pub fn failures(&self) -> usize {
        self.checks.iter().filter(|c| !c.passed()).count()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    /// Points per axis of the standard QSL grids.
    pub grid_resolution: usize,
    pub seed: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            grid_resolution: 50,
            seed: 20240601,
        }
    }
}

/// Accumulates gaps against a tolerance. A sample whose evaluation errors
/// counts as a failure with an infinite gap.
struct Tally {
    name: String,
    tolerance: f64,
    samples: usize,
    failures: usize,
    max_gap: f64,
    first_error: Option<String>,
}

impl Tally {
    fn new(name: &str, tolerance: f64) -> Self {
        Self {
            name: name.into(),
            tolerance,
            samples: 0,
            failures: 0,
            max_gap: 0.0,
            first_error: None,
        }
    }

    /// Records `gap`, where anything above the tolerance fails.
    fn gap(&mut self, gap: Result<f64>) {
        self.samples += 1;
        match gap {
            Ok(g) if g.is_finite() => {
                self.max_gap = self.max_gap.max(g);
                if g > self.tolerance {
                    self.failures += 1;
                }
            }
            Ok(g) => {
                self.max_gap = f64::INFINITY;
                self.failures += 1;
                self.first_error
                    .get_or_insert(format!("non-finite gap {g}"));
            }
            Err(e) => {
                self.max_gap = f64::INFINITY;
                self.failures += 1;
                self.first_error.get_or_insert(e.to_string());
            }
        }
    }

    /// Records the violation `lhs − rhs` of `lhs ≤ rhs`.
    fn le(&mut self, pair: Result<(f64, f64)>) {
        self.gap(pair.map(|(lhs, rhs)| (lhs - rhs).max(0.0)));
    }

    fn finish(self, detail: &str) -> Check {
        let detail = match self.first_error {
            Some(e) => format!("{detail}; first error: {e}"),
            None => detail.to_string(),
        };
        Check {
            name: self.name,
            samples: self.samples,
            failures: self.failures,
            max_gap: self.max_gap,
            tolerance: self.tolerance,
            informational: false,
            detail,
        }
    }
}

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> SuiteReport {
    let checks = match suite {
        Suite::Linalg => linalg_checks(opts),
        Suite::States => states_checks(opts),
        Suite::Divergences => divergences_checks(opts),
        Suite::Channels => channels_checks(opts),
        Suite::Qsl => qsl_checks(opts),
    };
    SuiteReport { suite, checks }
}

pub fn run_all(opts: &VerifyOptions) -> Vec<SuiteReport> {
    Suite::ALL.iter().map(|&s| run_suite(s, opts)).collect()
}

fn linalg_checks(opts: &VerifyOptions) -> Vec<Check> {
    let mut s = Sampler::new(opts.seed);
    let quad = LogQuadrature::default();
    let mut logs = Tally::new("integral log vs spectral log", 1e-7);
    for i in 0..100 {
        let d = 2 + i % 3;
        logs.gap((|| {
            let rho = s.density_matrix(d, 1e-3)?;
            let a = matrix_log_integral(rho.matrix(), &quad)?;
            let b = matrix_log_spectral(rho.matrix())?;
            Ok(a.max_abs_diff(&b))
        })());
    }

    let mut ordering = Tally::new("Schatten norm ordering p=1 >= 2 >= inf", 1e-12);
    let mut invariance = Tally::new("Schatten norms under unitary conjugation", 1e-10);
    let mut trace = Tally::new("density-matrix spectrum sums to one", 1e-10);
    for i in 0..200 {
        let d = 2 + i % 4;
        let rho = s.density_matrix(d, 0.0);
        let sigma = s.density_matrix(d, 0.0);
        let u = s.unitary(d);
        let pair = rho.and_then(|rho| Ok((rho, sigma?)));
        let Ok((rho, sigma)) = pair else {
            ordering.gap(Err(pair.expect_err("error branch")));
            continue;
        };
        trace.gap(
            hermitian_eig(rho.matrix()).map(|e| (e.eigenvalues.iter().sum::<f64>() - 1.0).abs()),
        );
        let a = rho.matrix() - sigma.matrix();
        ordering.gap((|| {
            let n1 = schatten_norm(&a, SchattenP::One)?;
            let n2 = schatten_norm(&a, SchattenP::Two)?;
            let ni = schatten_norm(&a, SchattenP::Inf)?;
            Ok((n2 - n1).max(ni - n2).max(0.0))
        })());
        invariance.gap((|| {
            let b = u.checked_mul(&a)?.checked_mul(&u.adjoint())?;
            let mut worst: f64 = 0.0;
            for p in [SchattenP::One, SchattenP::Two, SchattenP::Inf] {
                worst = worst.max((schatten_norm(&a, p)? - schatten_norm(&b, p)?).abs());
            }
            Ok(worst)
        })());
    }
    vec![
        logs.finish("100 random full-rank states, d in {2,3,4}, kappa_min >= 1e-3"),
        ordering.finish("200 differences of random states, d in 2..=5"),
        invariance.finish("200 random unitaries, d in 2..=5"),
        trace.finish("200 random states"),
    ]
}

fn states_checks(opts: &VerifyOptions) -> Vec<Check> {
    let mut roundtrip = Tally::new("Bloch parametrization round trip", 1e-12);
    let n = 20;
    for i in 0..n {
        for j in 0..=n {
            for k in 0..n {
                let r = 0.95 * i as f64 / n as f64;
                let theta = PI * j as f64 / n as f64;
                let phi = std::f64::consts::TAU * k as f64 / n as f64;
                roundtrip.gap((|| {
                    let q = BlochQubit::new(r, theta, phi)?;
                    let rho = DensityMatrix::from_bloch(&q);
                    let back = DensityMatrix::from_bloch_vector(rho.bloch_vector()?)?;
                    let eig_gap = (rho.eigenvalues()[0] - (1.0 - r) / 2.0).abs();
                    Ok(back.max_abs_diff(&rho).max(eig_gap))
                })());
            }
        }
    }

    let mut s = Sampler::new(opts.seed ^ 1);
    let mut spectrum = Tally::new("spectrum invariant under unitary conjugation", 1e-10);
    for i in 0..200 {
        let d = 2 + i % 3;
        spectrum.gap((|| {
            let rho = s.density_matrix(d, 0.0)?;
            let conj = rho.conjugate(&s.unitary(d))?;
            Ok(rho
                .eigenvalues()
                .iter()
                .zip(conj.eigenvalues())
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max))
        })());
    }
    vec![
        roundtrip.finish("20 x 21 x 20 grid in (r, theta, phi)"),
        spectrum.finish("200 random states and unitaries, d in {2,3,4}"),
    ]
}

fn random_qubit_state(s: &mut Sampler) -> DensityMatrix {
    DensityMatrix::from_bloch(&s.bloch_qubit(0.0, 0.99))
}

fn divergences_checks(opts: &VerifyOptions) -> Vec<Check> {
    let mut closed = Tally::new("qubit relative entropy closed form vs matrix", 1e-9);
    let n = 15;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let r1 = 0.02 + 0.93 * i as f64 / (n - 1) as f64;
                let r2 = 0.02 + 0.93 * j as f64 / (n - 1) as f64;
                let angle = PI * k as f64 / (n - 1) as f64;
                closed.gap((|| {
                    let v1 = [0.0, 0.0, r1];
                    let v2 = [r2 * angle.sin(), 0.0, r2 * angle.cos()];
                    let matrix = relative_entropy(
                        &DensityMatrix::from_bloch_vector(v1)?,
                        &DensityMatrix::from_bloch_vector(v2)?,
                    )?;
                    Ok((matrix - qubit_relative_entropy_closed_form(v1, v2)?).abs())
                })());
            }
        }
    }

    let mut s = Sampler::new(opts.seed ^ 2);
    let mut unitary_symmetry = Tally::new("S(rho||V rho V+) = S(V rho V+||rho)", 1e-10);
    for _ in 0..200 {
        unitary_symmetry.gap((|| {
            let rho = random_qubit_state(&mut s);
            let v = rho.conjugate(&s.unitary(2))?;
            Ok((relative_entropy(&rho, &v)? - relative_entropy(&v, &rho)?).abs())
        })());
    }

    let mut triangle = Tally::new("QJSD triangle inequality", 1e-10);
    for _ in 0..1000 {
        let a = random_qubit_state(&mut s);
        let b = random_qubit_state(&mut s);
        let c = random_qubit_state(&mut s);
        triangle.le((|| Ok((qjsd(&a, &c)?, qjsd(&a, &b)? + qjsd(&b, &c)?)))());
    }

    let mut symmetric = Tally::new("J, QJPD, JS, QJSD symmetric under swap", 1e-12);
    let mut sandwich = Tally::new("Pinsker <= S <= min(two-norm bound, S_max)", 1e-9);
    for _ in 0..300 {
        let a = random_qubit_state(&mut s);
        let b = random_qubit_state(&mut s);
        symmetric.gap((|| {
            let mut worst: f64 = 0.0;
            for f in [jeffreys, qjpd, jensen_shannon, qjsd] {
                worst = worst.max((f(&a, &b)? - f(&b, &a)?).abs());
            }
            Ok(worst)
        })());
        sandwich.gap((|| {
            let s_ab = relative_entropy(&a, &b)?;
            let bounds = qre_bounds(&a, &b)?;
            Ok((bounds.pinsker_lower - s_ab)
                .max(s_ab - bounds.two_norm_upper)
                .max(s_ab - bounds.s_max)
                .max(0.0))
        })());
    }

    let mut contractive = Tally::new("relative entropy contracts under the channels", 1e-10);
    for _ in 0..300 {
        let a = random_qubit_state(&mut s);
        let b = random_qubit_state(&mut s);
        let t = s.uniform(0.0, 5.0);
        for kind in [
            ChannelKind::Depolarizing,
            ChannelKind::PhaseDamping,
            ChannelKind::GeneralizedAmplitudeDamping,
        ] {
            let alpha = s.uniform(0.0, 1.0);
            contractive.le((|| {
                let ch = KrausChannel::new(kind, 1.0, alpha)?;
                Ok((
                    relative_entropy(&ch.apply(&a, t)?, &ch.apply(&b, t)?)?,
                    relative_entropy(&a, &b)?,
                ))
            })());
        }
    }

    // The Jeffreys pseudo-distance is not known to be a metric; count
    // violations without judging them.
    let mut jpd_samples = 0;
    let mut jpd_violations = 0;
    let mut jpd_worst: f64 = 0.0;
    for _ in 0..1000 {
        let a = random_qubit_state(&mut s);
        let b = random_qubit_state(&mut s);
        let c = random_qubit_state(&mut s);
        if let (Ok(ac), Ok(ab), Ok(bc)) = (qjpd(&a, &c), qjpd(&a, &b), qjpd(&b, &c)) {
            jpd_samples += 1;
            let excess = ac - ab - bc;
            if excess > 1e-12 {
                jpd_violations += 1;
                jpd_worst = jpd_worst.max(excess);
            }
        }
    }

    let mut entropy = Tally::new("von Neumann entropy within [0, ln d]", 1e-12);
    for i in 0..200 {
        let d = 2 + i % 3;
        entropy.gap(s.density_matrix(d, 0.0).map(|rho| {
            let h = von_neumann_entropy(&rho);
            (-h).max(h - (d as f64).ln()).max(0.0)
        }));
    }

    vec![
        closed.finish("15^3 grid in (r1, r2, angle)"),
        unitary_symmetry.finish("200 random qubit states and unitaries"),
        triangle.finish("1000 random qubit triples"),
        symmetric.finish("300 random qubit pairs"),
        sandwich.finish("300 random qubit pairs"),
        contractive.finish("300 random pairs x 3 channels at random times"),
        entropy.finish("200 random states, d in {2,3,4}"),
        Check {
            name: "QJPD triangle inequality (reported only)".into(),
            samples: jpd_samples,
            failures: jpd_violations,
            max_gap: jpd_worst,
            tolerance: 1e-12,
            informational: true,
            detail: format!("{jpd_violations} violations in {jpd_samples} random qubit triples"),
        },
    ]
}

/// Grid used for the per-row channel comparisons.
fn channel_grid() -> Vec<(KrausChannel, BlochQubit)> {
    let mut out = Vec::new();
    for alpha in [0.0, 0.1, 0.5, 1.0] {
        for kind in [
            ChannelKind::Depolarizing,
            ChannelKind::PhaseDamping,
            ChannelKind::GeneralizedAmplitudeDamping,
        ] {
            if kind != ChannelKind::GeneralizedAmplitudeDamping && alpha != 0.5 {
                continue;
            }
            let ch = KrausChannel::new(kind, 1.0, alpha).expect("valid channel");
            for r in [0.05, 0.5, 0.95] {
                for theta in [0.0, FRAC_PI_4, FRAC_PI_2, 3.0 * FRAC_PI_4, PI] {
                    for phi in [0.0, 1.0] {
                        out.push((ch, BlochQubit::new(r, theta, phi).expect("valid qubit")));
                    }
                }
            }
        }
    }
    out
}

const CHANNEL_TIMES: [f64; 7] = [0.0, 1e-3, 0.1, 0.5, 1.0, 3.0, 6.0];

fn channels_checks(_opts: &VerifyOptions) -> Vec<Check> {
    let mut checks = Vec::new();
    for kind in [
        ChannelKind::Depolarizing,
        ChannelKind::PhaseDamping,
        ChannelKind::GeneralizedAmplitudeDamping,
    ] {
        let mut radius = Tally::new(&format!("{kind}: r_t closed form vs Kraus sum"), 1e-9);
        let mut nu = Tally::new(&format!("{kind}: nu_t closed form vs Kraus sum"), 1e-9);
        let mut sum = Tally::new(
            &format!("{kind}: Kraus-derivative sum closed form vs numeric"),
            1e-9,
        );
        let mut complete = Tally::new(&format!("{kind}: Kraus completeness"), 1e-12);
        for (ch, q) in channel_grid()
            .into_iter()
            .filter(|(ch, _)| ch.kind() == kind)
        {
            let traj = Trajectory::channel(q, ch);
            let rho0 = traj.initial_state();
            for t in CHANNEL_TIMES {
                let rho_t = traj.evolve(t);
                radius.gap((|| {
                    let numeric = rho_t.as_ref().map_err(clone_err)?.to_bloch()?.r;
                    Ok((traj.analytic_radius(t)? - numeric).abs())
                })());
                nu.gap((|| {
                    let mid = DensityMatrix::mix(&rho0, rho_t.as_ref().map_err(clone_err)?, 0.5)?;
                    Ok((traj.analytic_nu(t)? - mid.to_bloch()?.r).abs())
                })());
                sum.gap(
                    traj.kraus_speed_sum(t)
                        .map(|k| (k.analytic - k.numeric).abs()),
                );
                complete.gap(ch.completeness_error(t));
            }
        }
        let detail = "r in {0.05,0.5,0.95} x 5 polar angles x 2 azimuths x 7 times";
        checks.push(radius.finish(detail));
        checks.push(nu.finish(detail));
        checks.push(sum.finish(detail));
        checks.push(complete.finish(detail));
    }

    let mut kraus_vs_bloch = Tally::new("Kraus-sum state vs Bloch-map state", 1e-12);
    let mut rate = Tally::new("entropy-rate identity by finite differences", 1e-6);
    for (ch, q) in channel_grid() {
        let traj = Trajectory::channel(q, ch);
        for t in CHANNEL_TIMES {
            kraus_vs_bloch.gap((|| Ok(traj.evolve(t)?.max_abs_diff(&traj.state(t)?)))());
        }
        for k in 1..=20 {
            let t = 0.25 * k as f64;
            rate.gap(
                crate::divergences::entropy_rate_identity_check(|s| traj.evolve(s), t, 1e-4)
                    .map(|c| c.gap),
            );
        }
    }
    checks.push(kraus_vs_bloch.finish("standard channel grid x 7 times"));
    checks.push(rate.finish("standard channel grid x 20 times, step 1e-4"));
    checks
}

fn clone_err(e: &Error) -> Error {
    Error::InvalidParameter(e.to_string())
}

/// Scenario configs behind the standard density plots: depolarizing and
/// phase damping over `(Γτ, r)`, the nine GAD panels over
/// `α ∈ {0, 0.1, 1}`, `θ ∈ {0, π/4, π/2}`, and a unitary `(τ, r)` sweep.
pub fn standard_grids(resolution: usize) -> Vec<ScenarioConfig> {
    let r = Axis::Range {
        start: 0.02,
        stop: 0.95,
        count: resolution,
    };
    let gamma_tau = Axis::Range {
        start: 0.0,
        stop: 6.0,
        count: resolution,
    };
    let base = |name: &str, kind: DriveKind, theta: Axis| ScenarioConfig {
        name: name.into(),
        measures: vec![Measure::Jeffreys, Measure::JensenShannon],
        speed_mode: SpeedMode::KrausBound,
        panels: Refinement::default().panels,
        drive: crate::scenario::config::DriveConfig {
            kind,
            gamma: Some(1.0),
            alpha: None,
            n: None,
        },
        state: crate::scenario::config::StateConfig {
            r: r.clone(),
            theta,
            phi: Axis::Scalar(0.0),
        },
        tau: crate::scenario::config::TauConfig {
            gamma_tau: Some(gamma_tau.clone()),
            tau: None,
        },
        output: Default::default(),
    };
    let depolarizing = base(
        "depolarizing",
        DriveKind::Depolarizing,
        Axis::Scalar(FRAC_PI_2),
    );
    let phase = base(
        "phase-damping",
        DriveKind::PhaseDamping,
        Axis::Scalar(FRAC_PI_2),
    );
    let mut gad = base(
        "gad",
        DriveKind::Gad,
        Axis::List(vec![0.0, FRAC_PI_4, FRAC_PI_2]),
    );
    gad.drive.alpha = Some(Axis::List(vec![0.0, 0.1, 1.0]));
    let mut unitary = base("unitary", DriveKind::Unitary, Axis::Scalar(FRAC_PI_2));
    unitary.drive.gamma = None;
    unitary.drive.n = Some([0.0, 0.0, 1.0]);
    unitary.tau = crate::scenario::config::TauConfig {
        gamma_tau: None,
        tau: Some(Axis::Range {
            start: 0.0,
            stop: 2.0 * PI,
            count: resolution,
        }),
    };
    vec![depolarizing, phase, gad, unitary]
}

fn qsl_checks(opts: &VerifyOptions) -> Vec<Check> {
    let mut checks = Vec::new();
    for cfg in standard_grids(opts.grid_resolution) {
        let mut validity = Tally::new(&format!("{}: tau_qsl <= tau, both speeds", cfg.name), 1e-9);
        let mut hierarchy = Tally::new(
            &format!("{}: tau_below <= tau_J <= tau_above", cfg.name),
            1e-9,
        );
        match run_scenario(&cfg) {
            Ok(grid) => {
                for cell in &grid.cells {
                    let rep = &cell.report;
                    for m in [rep.jeffreys, rep.jensen_shannon].into_iter().flatten() {
                        validity.le(Ok((m.tau_qsl_exact.max(m.tau_qsl_kraus_bound), cell.tau)));
                    }
                    if let (Some(j), Some(below), Some(above)) =
                        (rep.jeffreys, rep.tau_j_below, rep.tau_j_above)
                    {
                        hierarchy.le(Ok((below, j.tau_qsl)));
                        hierarchy.le(Ok((j.tau_qsl, above)));
                    }
                }
            }
            Err(e) => validity.gap(Err(e)),
        }
        let detail = format!("{0} x {0} grid", opts.grid_resolution);
        checks.push(validity.finish(&detail));
        checks.push(hierarchy.finish(&detail));
    }

    let settings = QslSettings {
        speed_mode: SpeedMode::KrausBound,
        ..Default::default()
    };
    let mut closed = Tally::new("channel closed forms vs numeric pipeline (relative)", 1e-7);
    for (ch, q) in channel_grid() {
        let traj = Trajectory::channel(q, ch);
        for tau in [0.1, 1.0, 3.0, 6.0] {
            closed.gap((|| {
                let rep = evaluate(
                    &traj,
                    tau,
                    &[Measure::Jeffreys, Measure::JensenShannon],
                    &settings,
                )?;
                let j = rep.jeffreys.expect("requested");
                let js = rep.jensen_shannon.expect("requested");
                let mut worst: f64 = 0.0;
                // Distances are compared squared: near a stationary state the
                // square root turns roundoff in the divergence into large
                // relative noise.
                for form in ClosedForm::ALL.iter().filter(|f| f.channel() == ch.kind()) {
                    let value = form.evaluate(&traj, tau)?;
                    let (closed, numeric) = match form {
                        ClosedForm::DepolarizingQslRatioJ => (value, j.tau_qsl / tau),
                        ClosedForm::DepolarizingQslRatioJs => (value, js.tau_qsl / tau),
                        ClosedForm::DepolarizingJeffreys
                        | ClosedForm::PhaseDampingJeffreys
                        | ClosedForm::GadJeffreys => (value * value, j.divergence),
                        _ => (value * value, js.divergence),
                    };
                    worst = worst.max(relative_gap(closed, numeric));
                }
                Ok(worst)
            })());
        }
    }
    checks.push(closed.finish("standard channel grid x 4 durations"));

    let mut s = Sampler::new(opts.seed ^ 3);
    let mut unitary = Tally::new("unitary closed forms vs numeric pipeline (relative)", 1e-7);
    let mut floor = Tally::new("variance floor <= unitary tau_qsl", 1e-12);
    for _ in 0..100 {
        let drive = s.unitary_drive(0.2, 2.0);
        let q = s.bloch_qubit(0.05, 0.95);
        let tau = s.uniform(0.05, 3.0);
        unitary.gap((|| {
            let traj = Trajectory::unitary(q, drive);
            let rep = evaluate(
                &traj,
                tau,
                &[Measure::Jeffreys, Measure::JensenShannon],
                &QslSettings::default(),
            )?;
            let r = Refinement::default();
            Ok(relative_gap(
                rep.jeffreys.expect("requested").tau_qsl,
                tau_qsl_unitary(&drive, &q, tau, Measure::Jeffreys, &r)?,
            )
            .max(relative_gap(
                rep.jensen_shannon.expect("requested").tau_qsl,
                tau_qsl_unitary(&drive, &q, tau, Measure::JensenShannon, &r)?,
            )))
        })());
        floor.le((|| {
            let r = Refinement::default();
            Ok((
                mt_variance_floor(&drive, &q, tau, Measure::Jeffreys, &r)?,
                tau_qsl_unitary(&drive, &q, tau, Measure::Jeffreys, &r)?,
            ))
        })());
    }
    checks.push(unitary.finish("100 random drives, states and durations"));
    checks.push(floor.finish("100 random drives, states and durations"));

    let mut chain = Tally::new("trace distance <= D_J <= integral bound", 1e-9);
    for _ in 0..200 {
        let q = s.bloch_qubit(0.0, 0.95);
        let ch = s.channel(1.0);
        let tau = s.uniform(0.0, 6.0);
        chain.gap((|| {
            let traj = Trajectory::channel(q, ch);
            let rep = evaluate(&traj, tau, &[Measure::Jeffreys], &QslSettings::default())?;
            let j = rep.jeffreys.expect("requested");
            let diff = traj.initial_state().matrix() - traj.state(tau)?.matrix();
            let lower = schatten_norm(&diff, SchattenP::One)? / 2f64.sqrt();
            let d = j.divergence.sqrt();
            Ok((lower - d).max(d - j.upper_bound).max(0.0))
        })());
    }
    checks.push(chain.finish("200 random channels, states and durations"));

    // A unitary drive with n parallel to the Bloch vector never moves.
    let mut parallel = Tally::new("tau_qsl vanishes for a parallel drive", 1e-12);
    for _ in 0..20 {
        let q = s.bloch_qubit(0.05, 0.95);
        let drive = UnitaryDrive::new(q.unit_vector().map(|x| 1.3 * x)).expect("finite");
        parallel.gap(tau_qsl_unitary(
            &drive,
            &q,
            1.0,
            Measure::Jeffreys,
            &Refinement::default(),
        ));
    }
    checks.push(parallel.finish("20 random states"));
    checks
}

/// Relative gap; magnitudes below `1e-7` are compared absolutely so that
/// roundoff around an exact zero does not count as a relative error.
fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-7)
}
