//! `eqsl`: runs scenario configs, self-verification suites, and prints the
//! formula index.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use entropic_qsl::scenario::{export_csv, parse_config, run_scenario, ScenarioConfig};
use entropic_qsl::verify::{run_suite, Suite, SuiteReport, VerifyOptions};
use entropic_qsl::Error;

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_CONFIG: u8 = 2;
const EXIT_NUMERICAL: u8 = 3;

#[derive(Parser)]
#[command(
    name = "eqsl",
    version,
    about = "Entropic quantum speed limits for qubits"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a scenario config and write its CSV grid.
    Run {
        config: PathBuf,
        /// CSV destination; overrides the config's `output.path`.
        #[arg(long, short)]
        output: Option<PathBuf>,
        /// Directory for relative or defaulted output paths.
        #[arg(long, env = "ENTROPIC_QSL_OUTPUT_DIR")]
        output_dir: Option<PathBuf>,
    },
    /// Run self-checks; exits with 1 if any check fails.
    Verify {
        /// One of linalg, states, divergences, channels, qsl; all when omitted.
        suite: Option<String>,
        /// Print a JSON summary instead of a table.
        #[arg(long)]
        json: bool,
        /// Points per axis of the standard QSL grids.
        #[arg(long, default_value_t = VerifyOptions::default().grid_resolution)]
        resolution: usize,
    },
    /// Print which operation evaluates each formula.
    ShowFormulas,
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run {
            config,
            output,
            output_dir,
        } => run(&config, output, output_dir),
        Command::Verify {
            suite,
            json,
            resolution,
        } => verify(suite.as_deref(), json, resolution),
        Command::ShowFormulas => {
            print!("{FORMULAS}");
            ExitCode::SUCCESS
        }
    }
}

fn output_path(cfg: &ScenarioConfig, output: Option<PathBuf>, dir: Option<PathBuf>) -> PathBuf {
    let path = output
        .or_else(|| cfg.output.path.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from(format!("{}.csv", cfg.name)));
    match dir {
        Some(dir) if path.is_relative() => dir.join(path),
        _ => path,
    }
}

fn run(config: &Path, output: Option<PathBuf>, dir: Option<PathBuf>) -> ExitCode {
    let text = match std::fs::read_to_string(config) {
        Ok(text) => text,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", config.display());
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let cfg = match parse_config(&text) {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("error: {}: {e}", config.display());
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let path = output_path(&cfg, output, dir);
    let grid = match run_scenario(&cfg) {
        Ok(grid) => grid,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(match e.root() {
                Error::Config(_) => EXIT_CONFIG,
                _ => EXIT_NUMERICAL,
            });
        }
    };
    if let Err(e) = export_csv(&grid, &path) {
        eprintln!("error: cannot write {}: {e}", path.display());
        return ExitCode::FAILURE;
    }
    let unconverged = grid.cells.iter().filter(|c| !c.report.converged).count();
    println!(
        "{}: {} cells written to {}",
        cfg.name,
        grid.cells.len(),
        path.display()
    );
    if unconverged > 0 {
        eprintln!("warning: {unconverged} cells did not reach the quadrature tolerance");
    }
    ExitCode::SUCCESS
}

fn verify(suite: Option<&str>, json: bool, resolution: usize) -> ExitCode {
    let suites = match suite {
        None | Some("all") => Suite::ALL.to_vec(),
        Some(name) => match name.parse::<Suite>() {
            Ok(s) => vec![s],
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_CONFIG);
            }
        },
    };
    if resolution < 2 {
        eprintln!("error: --resolution must be at least 2");
        return ExitCode::from(EXIT_CONFIG);
    }
    let opts = VerifyOptions {
        grid_resolution: resolution,
        ..Default::default()
    };
    let reports: Vec<SuiteReport> = suites.iter().map(|&s| run_suite(s, &opts)).collect();
    if json {
        let summary = serde_json::json!({
            "passed": reports.iter().all(SuiteReport::passed),
            "suites": reports,
        });
        println!(
            "{}",
            serde_json::to_string_pretty(&summary).expect("report serializes")
        );
    } else {
        print_table(&reports);
    }
    if reports.iter().all(SuiteReport::passed) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_VERIFY_FAILED)
    }
}

fn print_table(reports: &[SuiteReport]) {
    let width = reports
        .iter()
        .flat_map(|r| r.checks.iter().map(|c| c.name.len()))
        .max()
        .unwrap_or(0);
    for report in reports {
        let total = report.checks.len();
        println!(
            "[{}] {}/{} checks passed",
            report.suite,
            total - report.failures(),
            total
        );
        for c in &report.checks {
            let status = match (c.passed(), c.informational) {
                (_, true) => "INFO",
                (true, _) => "PASS",
                (false, _) => "FAIL",
            };
            println!(
                "  {status} {:<width$} n={:<6} fail={:<4} max_gap={:.3e} tol={:.0e}",
                c.name, c.samples, c.failures, c.max_gap, c.tolerance
            );
            if !c.passed() || c.informational {
                println!("       {}", c.detail);
            }
        }
    }
}

const FORMULAS: &str = "\
Formula                                                    Operation
---------------------------------------------------------  ---------------------------------------------
ln rho by spectral decomposition                           linalg::matrix_log_spectral
ln rho = int_0^inf [(1+u)^-1 I - (rho+u I)^-1] du          linalg::matrix_log_integral
||A||_p Schatten norms                                     linalg::schatten_norm
rho = (I + r.sigma)/2, eigenvalues (1 -+ r)/2              states::DensityMatrix::from_bloch
S(rho) = -Tr rho ln rho                                    divergences::von_neumann_entropy
S(rho||sigma) = Tr rho (ln rho - ln sigma)                 divergences::relative_entropy
S_J = S(rho||sigma) + S(sigma||rho), D_J = sqrt(S_J)       divergences::jeffreys, divergences::qjpd
S_JS = [S(rho||m) + S(sigma||m)]/2, m = (rho+sigma)/2      divergences::jensen_shannon, divergences::qjsd
Pinsker, two-norm, S_max bounds on S(rho||sigma)           divergences::qre_bounds
|S(rho||sigma) - S(sigma||rho)| <= G(u, v)                 divergences::asymmetry_bound
qubit S(rho1||rho2) from Bloch vectors                     divergences::qubit_relative_entropy_closed_form
dS/dt = -Tr(ln rho_t drho_t/dt)                            divergences::entropy_rate_identity_check
h(x) = x ln x + (1-x) ln(1-x)                              divergences::h
Kraus operators and Bloch maps of the three channels       channels::KrausChannel
r_t, nu_t, sum_j ||K_j rho dK_j+/dt||_1 closed forms       channels::Trajectory::{analytic_radius, analytic_nu, kraus_speed_sum_analytic}
U_t = exp(-i t n.sigma)                                    channels::UnitaryDrive
f_J = [|ln k_min(rho0) k_min(rho_t)| + k_max(rho0)/k_min(rho_t)]/2   qsl::cost_j
f_JS = |ln k_min(rho_t) k_min((rho0+rho_t)/2)|/2           qsl::cost_js
D(rho0, rho_tau) <= sqrt(int_0^tau f ||drho_t/dt||_1 dt)   qsl::integral_upper_bound
tau_QSL = D^2 / <<f v>>_tau                                qsl::evaluate, qsl::tau_qsl
tau_J below (trace norm) / above (two norm)                qsl::tau_qsl_bounds_j
unitary tau_QSL closed forms (J, JS)                       qsl::tau_qsl_unitary
variance-based floor with 2 Delta H                        qsl::mt_variance_floor
depolarizing D_J, D_JS and tau_QSL/tau closed forms        qsl::ClosedForm::Depolarizing*
phase damping D_J, D_JS closed forms                       qsl::ClosedForm::PhaseDamping*
generalized amplitude damping D_J, D_JS closed forms       qsl::ClosedForm::Gad*
delta = 1 - tau_QSL/tau, min-max normalization             qsl::relative_error, qsl::normalize_over_grid
";
