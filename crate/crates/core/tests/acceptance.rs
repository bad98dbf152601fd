//! Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any
//! fails. Expected values come from the oracle in `common`, from limits
//! derived by hand, or from exact identities.

mod common;

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::io::Write;

use common::{Mat2, Noise, Stream};
use entropic_qsl::channels::{ChannelKind, KrausChannel, Trajectory, UnitaryDrive};
use entropic_qsl::divergences::{
    entropy_rate_identity_check, qjsd, qubit_relative_entropy_closed_form, relative_entropy,
};
use entropic_qsl::linalg::{matrix_log_integral, matrix_log_spectral, LogQuadrature};
use entropic_qsl::qsl::{
    evaluate, integral_upper_bound, mt_variance_floor, tau_qsl_unitary, ClosedForm, Measure,
    QslSettings, SpeedMode,
};
use entropic_qsl::quadrature::Refinement;
use entropic_qsl::sampling::Sampler;
use entropic_qsl::scenario::{
    parse_config, parse_csv, run_scenario, to_csv_string, ParsedCsv, SweepGrid,
};
use entropic_qsl::{BlochQubit, DensityMatrix};

type Outcome = Result<String, String>;

/// Worst gap and violation count against a tolerance.
#[derive(Default)]
struct Gaps {
    worst: f64,
    violations: usize,
    samples: usize,
}

impl Gaps {
    fn add(&mut self, gap: f64, tol: f64) {
        self.samples += 1;
        if !gap.is_finite() || gap > tol {
            self.violations += 1;
        }
        self.worst = self
            .worst
            .max(if gap.is_finite() { gap } else { f64::INFINITY });
    }

    fn outcome(&self, what: &str) -> Outcome {
        let line = format!(
            "{what}: {} samples, {} violations, worst {:.3e}",
            self.samples, self.violations, self.worst
        );
        if self.violations == 0 && self.samples > 0 {
            Ok(line)
        } else {
            Err(line)
        }
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn lib_state(r: f64, theta: f64, phi: f64) -> Result<DensityMatrix, String> {
    Ok(DensityMatrix::from_bloch(
        &BlochQubit::new(r, theta, phi.rem_euclid(TAU)).map_err(err)?,
    ))
}

fn noise_of(kind: ChannelKind, alpha: f64) -> Noise {
    match kind {
        ChannelKind::Depolarizing => Noise::Depolarizing,
        ChannelKind::PhaseDamping => Noise::PhaseDamping,
        ChannelKind::GeneralizedAmplitudeDamping => Noise::Gad(alpha),
    }
}

const KINDS: [ChannelKind; 3] = [
    ChannelKind::Depolarizing,
    ChannelKind::PhaseDamping,
    ChannelKind::GeneralizedAmplitudeDamping,
];

fn log_oracle() -> Outcome {
    let mut s = Sampler::new(11);
    let quad = LogQuadrature::default();
    let mut gaps = Gaps::default();
    for i in 0..100 {
        let rho = s.density_matrix(2 + i % 3, 1e-3).map_err(err)?;
        let a = matrix_log_integral(rho.matrix(), &quad).map_err(err)?;
        let b = matrix_log_spectral(rho.matrix()).map_err(err)?;
        gaps.add(a.max_abs_diff(&b), 1e-7);
    }
    gaps.outcome("integral vs spectral log, d in {2,3,4}")
}

fn qubit_relative_entropy() -> Outcome {
    let mut gaps = Gaps::default();
    let n = 15;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let r1 = 0.02 + 0.93 * i as f64 / (n - 1) as f64;
                let r2 = 0.02 + 0.93 * j as f64 / (n - 1) as f64;
                let angle = PI * k as f64 / (n - 1) as f64;
                let v1 = [0.0, 0.0, r1];
                let v2 = [r2 * angle.sin(), 0.0, r2 * angle.cos()];
                let closed = qubit_relative_entropy_closed_form(v1, v2).map_err(err)?;
                let oracle = common::relative_entropy(&Mat2::state(v1), &Mat2::state(v2));
                let library = relative_entropy(
                    &DensityMatrix::from_bloch_vector(v1).map_err(err)?,
                    &DensityMatrix::from_bloch_vector(v2).map_err(err)?,
                )
                .map_err(err)?;
                gaps.add((closed - oracle).abs().max((closed - library).abs()), 1e-9);
            }
        }
    }
    let grid = gaps.outcome("closed form vs matrix on 15^3 grid")?;

    // S(ρ‖VρV†) = S(VρV†‖ρ) for any unitary V.
    let mut sym = Gaps::default();
    let mut s = Sampler::new(12);
    for _ in 0..200 {
        let rho = DensityMatrix::from_bloch(&s.bloch_qubit(0.0, 0.98));
        let v = rho.conjugate(&s.unitary(2)).map_err(err)?;
        let gap =
            relative_entropy(&rho, &v).map_err(err)? - relative_entropy(&v, &rho).map_err(err)?;
        sym.add(gap.abs(), 1e-10);
    }
    let sym = sym.outcome("unitary symmetry")?;
    Ok(format!("{grid}; {sym}"))
}

fn entropy_rate() -> Outcome {
    let mut gaps = Gaps::default();
    let (r, theta, phi) = (0.7, 1.1, 0.4);
    let rho0 = Mat2::state_spherical(r, theta, phi);
    for kind in KINDS {
        let alpha = 0.3;
        let noise = noise_of(kind, alpha);
        let gamma = 1.0;
        let ch = KrausChannel::new(kind, gamma, alpha).map_err(err)?;
        let traj = Trajectory::channel(BlochQubit::new(r, theta, phi).map_err(err)?, ch);
        for k in 1..=20 {
            let t = 0.2 * k as f64;
            let h = 1e-4;
            // Oracle: central differences of the entropy against −Tr(ln ρ_t dρ_t/dt).
            let at = |s: f64| common::apply(noise, gamma, s, &rho0);
            let lhs = (common::entropy(&at(t + h)) - common::entropy(&at(t - h))) / (2.0 * h);
            let drho = at(t + h).sub(&at(t - h)).scale(1.0 / (2.0 * h));
            let rhs = -at(t).log().mul(&drho).trace().re;
            gaps.add((lhs - rhs).abs(), 1e-6);
            let lib = entropy_rate_identity_check(|s| traj.evolve(s), t, h).map_err(err)?;
            gaps.add(lib.gap, 1e-6);
            gaps.add((lib.lhs - lhs).abs(), 1e-6);
        }
    }
    gaps.outcome("three channels x 20 times")
}

fn bound_chain() -> Outcome {
    let mut stream = Stream::new(4);
    let mut gaps = Gaps::default();
    let refinement = Refinement::default();
    for i in 0..500 {
        let kind = KINDS[i % 3];
        let alpha = stream.next();
        let gamma = stream.range(0.2, 3.0);
        let (r, theta, phi) = stream.qubit(0.0, 0.95);
        let tau = stream.range(0.0, 8.0) / gamma;
        let ch = KrausChannel::new(kind, gamma, alpha).map_err(err)?;
        let traj = Trajectory::channel(BlochQubit::new(r, theta, phi).map_err(err)?, ch);

        let rho0 = Mat2::state_spherical(r, theta, phi);
        let rho_tau = common::apply(noise_of(kind, alpha), gamma, tau, &rho0);
        let lower = rho0.sub(&rho_tau).trace_norm() / 2f64.sqrt();
        let d_j = common::jeffreys(&rho0, &rho_tau).max(0.0).sqrt();
        let upper =
            integral_upper_bound(&traj, tau, Measure::Jeffreys, &refinement).map_err(err)?;
        gaps.add((lower - d_j).max(d_j - upper).max(0.0), 1e-9);
    }
    gaps.outcome("trace distance / sqrt 2 <= D_J <= integral bound")
}

fn panel_config(kind: &str, theta: f64) -> String {
    format!(
        r#"
name = "{kind}-panel"
speed_mode = "kraus-bound"
[drive]
kind = "{kind}"
gamma = 1.0
[state]
r = {{ start = 0.02, stop = 0.95, count = 50 }}
theta = {theta}
[tau]
gamma_tau = {{ start = 0.0, stop = 6.0, count = 50 }}
"#
    )
}

fn validity_and_hierarchy(grids: &[&SweepGrid]) -> Outcome {
    let mut gaps = Gaps::default();
    for grid in grids {
        for cell in &grid.cells {
            let rep = &cell.report;
            for m in [rep.jeffreys, rep.jensen_shannon].into_iter().flatten() {
                gaps.add(
                    (m.tau_qsl_exact.max(m.tau_qsl_kraus_bound) - cell.tau).max(0.0),
                    1e-9,
                );
            }
            let j = rep.jeffreys.ok_or("missing J")?;
            gaps.add(
                (rep.tau_j_below.ok_or("missing below")? - j.tau_qsl).max(0.0),
                1e-9,
            );
            gaps.add(
                (j.tau_qsl - rep.tau_j_above.ok_or("missing above")?).max(0.0),
                1e-9,
            );
        }
    }
    gaps.outcome("two 50x50 grids, both speeds")
}

fn log_ratio(x: f64) -> f64 {
    ((1.0 + x) / (1.0 - x)).ln()
}

fn depolarizing_closed_forms() -> Outcome {
    let settings = QslSettings {
        speed_mode: SpeedMode::KrausBound,
        ..Default::default()
    };
    let mut gaps = Gaps::default();
    let rel = |a: f64, b: f64| (a - b).abs() / a.abs().max(b.abs()).max(1e-300);
    for i in 0..10 {
        let r = 0.05 + 0.9 * i as f64 / 9.0;
        let traj = Trajectory::channel(
            BlochQubit::new(r, 1.0, 0.5).map_err(err)?,
            KrausChannel::depolarizing(1.0).map_err(err)?,
        );
        for k in 1..=10 {
            let tau = 0.6 * k as f64;
            let rep = evaluate(
                &traj,
                tau,
                &[Measure::Jeffreys, Measure::JensenShannon],
                &settings,
            )
            .map_err(err)?;
            let j = rep.jeffreys.ok_or("missing J")?;
            let js = rep.jensen_shannon.ok_or("missing JS")?;
            let d_j = ClosedForm::DepolarizingJeffreys
                .evaluate(&traj, tau)
                .map_err(err)?;
            let d_js = ClosedForm::DepolarizingJensenShannon
                .evaluate(&traj, tau)
                .map_err(err)?;
            let ratio_j = ClosedForm::DepolarizingQslRatioJ
                .evaluate(&traj, tau)
                .map_err(err)?;
            let ratio_js = ClosedForm::DepolarizingQslRatioJs
                .evaluate(&traj, tau)
                .map_err(err)?;
            gaps.add(rel(d_j * d_j, j.divergence), 1e-7);
            gaps.add(rel(d_js * d_js, js.divergence), 1e-7);
            gaps.add(rel(ratio_j, j.tau_qsl / tau), 1e-7);
            gaps.add(rel(ratio_js, js.tau_qsl / tau), 1e-7);
        }
        // Long-time limit: the state is fully mixed, so D_J² → (r/4) L(r).
        let d = ClosedForm::DepolarizingJeffreys
            .evaluate(&traj, 20.0)
            .map_err(err)?;
        gaps.add((d * d - r / 4.0 * log_ratio(r)).abs(), 1e-6);
    }
    gaps.outcome("10 radii x 10 durations, plus the long-time limit")
}

fn channel_closed_forms() -> Outcome {
    let mut gaps = Gaps::default();
    let thetas = [0.0, PI / 6.0, PI / 4.0, PI / 3.0, FRAC_PI_2, 2.0, 2.7, PI];
    for kind in KINDS {
        let alphas: &[f64] = match kind {
            ChannelKind::GeneralizedAmplitudeDamping => &[0.0, 0.1, 0.3, 0.5, 0.8, 1.0],
            _ => &[0.5],
        };
        for &alpha in alphas {
            let gamma = 1.0;
            let noise = noise_of(kind, alpha);
            let ch = KrausChannel::new(kind, gamma, alpha).map_err(err)?;
            for r in [0.05, 0.35, 0.65, 0.95] {
                for theta in thetas {
                    for phi in [0.0, 2.0] {
                        let traj =
                            Trajectory::channel(BlochQubit::new(r, theta, phi).map_err(err)?, ch);
                        let rho0 = Mat2::state_spherical(r, theta, phi);
                        for t in [0.0, 0.01, 0.1, 0.5, 1.0, 2.0, 4.0, 8.0] {
                            let rho_t = common::apply(noise, gamma, t, &rho0);
                            let mid = rho0.add(&rho_t).scale(0.5);
                            gaps.add(
                                (traj.analytic_radius(t).map_err(err)? - rho_t.radius()).abs(),
                                1e-9,
                            );
                            gaps.add(
                                (traj.analytic_nu(t).map_err(err)? - mid.radius()).abs(),
                                1e-9,
                            );
                            let sum = common::kraus_speed_sum(noise, gamma, t, &rho0);
                            gaps.add(
                                (traj.kraus_speed_sum_analytic(t).map_err(err)? - sum).abs(),
                                1e-9,
                            );
                        }
                    }
                }
            }
        }
    }
    gaps.outcome("r_t, nu_t and Kraus-derivative sums vs oracle Kraus evaluation")
}

fn unitary_case() -> Outcome {
    let refinement = Refinement::default();
    let drive = UnitaryDrive::new([0.3, -0.4, 1.2]).map_err(err)?;
    let norm = drive.norm();
    let q = BlochQubit::new(0.6, 1.0, 0.3).map_err(err)?;
    let mut zeros = Gaps::default();
    for k in [1.0, 2.0] {
        zeros.add(
            tau_qsl_unitary(&drive, &q, k * PI / norm, Measure::Jeffreys, &refinement)
                .map_err(err)?,
            1e-12,
        );
    }
    let zeros = zeros.outcome("zeros at k pi")?;

    let mut parallel = Gaps::default();
    let mut stream = Stream::new(8);
    for _ in 0..20 {
        let (r, theta, phi) = stream.qubit(0.05, 0.95);
        let pq = BlochQubit::new(r, theta, phi).map_err(err)?;
        let pd = UnitaryDrive::new(pq.unit_vector().map(|x| 0.7 * x)).map_err(err)?;
        let tau = stream.range(0.1, 5.0);
        parallel.add(
            tau_qsl_unitary(&pd, &pq, tau, Measure::Jeffreys, &refinement).map_err(err)?,
            1e-12,
        );
        let traj = Trajectory::unitary(pq, pd);
        let rep =
            evaluate(&traj, tau, &[Measure::Jeffreys], &QslSettings::default()).map_err(err)?;
        parallel.add(rep.jeffreys.ok_or("missing J")?.tau_qsl, 1e-12);
    }
    let parallel = parallel.outcome("parallel drive")?;

    // ‖n‖τ = 1e-3: sin²(‖n‖τ)/‖n‖ ≈ ‖n‖τ², leaving the quadratic law.
    let tau = 1e-3 / norm;
    let r: f64 = q.r();
    let cross = {
        let n = drive.n().map(|x| x / norm);
        let u = q.unit_vector();
        let c = [
            n[1] * u[2] - n[2] * u[1],
            n[2] * u[0] - n[0] * u[2],
            n[0] * u[1] - n[1] * u[0],
        ];
        (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt()
    };
    let quadratic = cross * norm * tau * tau * log_ratio(r)
        / (2.0 * ((1.0 - r) / 2.0).ln().abs() + (1.0 + r) / (1.0 - r));
    let exact = tau_qsl_unitary(&drive, &q, tau, Measure::Jeffreys, &refinement).map_err(err)?;
    let small = (exact - quadratic).abs() / quadratic;
    if small > 0.01 {
        return Err(format!("small-time law off by {small:.3e}"));
    }

    let mut floor = Gaps::default();
    let mut s = Sampler::new(9);
    for i in 0..500 {
        let d = s.unitary_drive(0.1, 3.0);
        let q = s.bloch_qubit(0.02, 0.95);
        let tau = s.uniform(0.01, 4.0);
        let m = if i % 2 == 0 {
            Measure::Jeffreys
        } else {
            Measure::JensenShannon
        };
        let f = mt_variance_floor(&d, &q, tau, m, &refinement).map_err(err)?;
        let bound = tau_qsl_unitary(&d, &q, tau, m, &refinement).map_err(err)?;
        floor.add((f - bound).max(0.0), 1e-12);
    }
    let floor = floor.outcome("variance floor over 500 draws")?;
    Ok(format!(
        "{zeros}; {parallel}; small-time gap {small:.2e}; {floor}"
    ))
}

fn gad_symmetry() -> Outcome {
    let mut gaps = Gaps::default();
    for mode in [SpeedMode::Exact, SpeedMode::KrausBound] {
        let settings = QslSettings {
            speed_mode: mode,
            ..Default::default()
        };
        for i in 0..10 {
            for k in 0..10 {
                let theta = PI * i as f64 / 9.0;
                let alpha = k as f64 / 9.0;
                let r = 0.2 + 0.07 * ((i + k) % 10) as f64;
                let phi = 0.3;
                let tau = 0.4 + 0.5 * (k % 5) as f64;
                let run = |theta: f64, phi: f64, alpha: f64| -> Result<[f64; 4], String> {
                    let traj = Trajectory::channel(
                        BlochQubit::new(r, theta, phi.rem_euclid(TAU)).map_err(err)?,
                        KrausChannel::generalized_amplitude_damping(1.0, alpha).map_err(err)?,
                    );
                    let rep = evaluate(
                        &traj,
                        tau,
                        &[Measure::Jeffreys, Measure::JensenShannon],
                        &settings,
                    )
                    .map_err(err)?;
                    let j = rep.jeffreys.ok_or("missing J")?;
                    let js = rep.jensen_shannon.ok_or("missing JS")?;
                    Ok([j.tau_qsl, js.tau_qsl, j.delta, js.delta])
                };
                let base = run(theta, phi, alpha)?;
                // π − θ at the same azimuth, and π + θ written as (π − θ, φ + π).
                for mirrored in [
                    run(PI - theta, phi, 1.0 - alpha)?,
                    run(PI - theta, phi + PI, 1.0 - alpha)?,
                ] {
                    for (a, b) in base.iter().zip(&mirrored) {
                        gaps.add((a - b).abs(), 1e-9);
                    }
                }
            }
        }
    }
    gaps.outcome("10 x 10 (theta, alpha) grid, both speeds")
}

fn csv_of(grid: &SweepGrid) -> Result<ParsedCsv, String> {
    parse_csv(&to_csv_string(grid).map_err(err)?).map_err(err)
}

/// Groups rows by the value in `key`, keeping file order inside groups.
fn groups(csv: &ParsedCsv, key: &str, value: &str) -> Result<Vec<Vec<f64>>, String> {
    let keys = csv.column(key).map_err(err)?;
    let values = csv.column(value).map_err(err)?;
    let mut distinct: Vec<f64> = Vec::new();
    for k in &keys {
        if !distinct.contains(k) {
            distinct.push(*k);
        }
    }
    Ok(distinct
        .iter()
        .map(|d| {
            keys.iter()
                .zip(&values)
                .filter(|(k, _)| *k == d)
                .map(|(_, v)| *v)
                .collect()
        })
        .collect())
}

fn panel_orderings(depolarizing: &SweepGrid, dephasing: &SweepGrid) -> Outcome {
    let mut gaps = Gaps::default();
    // Rows run over r then gamma_tau, so grouping by gamma_tau keeps r ascending.
    let dep = csv_of(depolarizing)?;
    for series in groups(&dep, "gamma_tau", "delta_J_normalized")? {
        for w in series.windows(2) {
            gaps.add((w[1] - w[0]).max(0.0), 1e-9);
        }
    }
    let pd = csv_of(dephasing)?;
    for column in ["tau_qsl_J", "tau_qsl_JS"] {
        for series in groups(&pd, "r", column)? {
            for w in series.windows(2) {
                gaps.add((w[0] - w[1]).max(0.0), 1e-9);
            }
        }
    }
    gaps.outcome("normalized delta_J falls with r; tau_qsl rises with gamma_tau")
}

fn metric_properties() -> Outcome {
    let mut stream = Stream::new(21);
    let mut triangle = Gaps::default();
    let state = |s: &mut Stream| -> Result<(Mat2, DensityMatrix), String> {
        let (r, theta, phi) = s.qubit(0.0, 0.99);
        Ok((
            Mat2::state_spherical(r, theta, phi),
            lib_state(r, theta, phi)?,
        ))
    };
    for _ in 0..1000 {
        let (a, la) = state(&mut stream)?;
        let (b, lb) = state(&mut stream)?;
        let (c, lc) = state(&mut stream)?;
        let d = |x: &Mat2, y: &Mat2| common::jensen_shannon(x, y).max(0.0).sqrt();
        triangle.add((d(&a, &c) - d(&a, &b) - d(&b, &c)).max(0.0), 1e-10);
        let lib = qjsd(&la, &lc).map_err(err)?
            - qjsd(&la, &lb).map_err(err)?
            - qjsd(&lb, &lc).map_err(err)?;
        triangle.add(lib.max(0.0), 1e-10);
    }
    let triangle = triangle.outcome("QJSD triangle on 1000 triples")?;

    let mut contract = Gaps::default();
    for _ in 0..300 {
        let (a, la) = state(&mut stream)?;
        let (b, lb) = state(&mut stream)?;
        let t = stream.range(0.0, 5.0);
        let alpha = stream.next();
        let before = common::relative_entropy(&a, &b);
        for kind in KINDS {
            let noise = noise_of(kind, alpha);
            let after = common::relative_entropy(
                &common::apply(noise, 1.0, t, &a),
                &common::apply(noise, 1.0, t, &b),
            );
            contract.add((after - before).max(0.0), 1e-10);
            let ch = KrausChannel::new(kind, 1.0, alpha).map_err(err)?;
            let lib_after = relative_entropy(
                &ch.apply(&la, t).map_err(err)?,
                &ch.apply(&lb, t).map_err(err)?,
            )
            .map_err(err)?;
            contract.add(
                (lib_after - relative_entropy(&la, &lb).map_err(err)?).max(0.0),
                1e-10,
            );
        }
    }
    let contract = contract.outcome("QRE contraction on 300 pairs x 3 channels")?;
    Ok(format!("{triangle}; {contract}"))
}

fn main() {
    let started = std::time::Instant::now();
    let grid = |text: String| -> Result<SweepGrid, String> {
        run_scenario(&parse_config(&text).map_err(err)?).map_err(err)
    };
    let depolarizing = grid(panel_config("depolarizing", FRAC_PI_2));
    let dephasing = grid(panel_config("phase-damping", FRAC_PI_2));
    let both = |f: &dyn Fn(&SweepGrid, &SweepGrid) -> Outcome| match (&depolarizing, &dephasing) {
        (Ok(a), Ok(b)) => f(a, b),
        (Err(e), _) | (_, Err(e)) => Err(e.clone()),
    };

    let results: Vec<(&str, Outcome)> = vec![
        ("1 matrix logarithm oracle", log_oracle()),
        (
            "2 qubit relative entropy closed form",
            qubit_relative_entropy(),
        ),
        ("3 entropy-rate identity", entropy_rate()),
        (
            "4 trace-distance / Jeffreys / integral bound chain",
            bound_chain(),
        ),
        (
            "5 QSL validity and hierarchy",
            both(&|a, b| validity_and_hierarchy(&[a, b])),
        ),
        ("6 depolarizing closed forms", depolarizing_closed_forms()),
        (
            "7 channel radius, midpoint and Kraus-sum rows",
            channel_closed_forms(),
        ),
        ("8 unitary speed limits", unitary_case()),
        ("9 GAD mirror symmetry", gad_symmetry()),
        ("10 panel orderings from CSV", both(&panel_orderings)),
        ("11 metric properties", metric_properties()),
    ];

    let mut out = std::io::stdout().lock();
    let mut failed = 0;
    for (name, outcome) in &results {
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => {
                failed += 1;
                ("FAIL", d)
            }
        };
        writeln!(out, "{tag} criterion {name}: {detail}").expect("stdout");
    }
    writeln!(
        out,
        "{} of {} criteria passed in {:.1?}",
        results.len() - failed,
        results.len(),
        started.elapsed()
    )
    .expect("stdout");
    if failed > 0 {
        std::process::exit(1);
    }
}
