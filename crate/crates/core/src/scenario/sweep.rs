//! Grid evaluation of scenario configs.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use sha2::{Digest, Sha256};

use super::config::{ScenarioConfig, TauAxis};
use crate::channels::Trajectory;
use crate::error::{Error, Result};
use crate::qsl::{evaluate, normalize_over_grid, Measure, QslReport, QslSettings};
use crate::states::BlochQubit;

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq)]
pub struct AxisDef {
    pub name: String,
    pub values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridMetadata {
    pub scenario: String,
    pub tool_version: String,
    pub config_sha256: String,
    pub normalization_scope: String,
    pub canonical_config: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GridCell {
    /// One coordinate per axis, in axis order.
    pub coords: Vec<f64>,
    /// Absolute duration.
    pub tau: f64,
    pub report: QslReport,
    /// The cell's panel had a constant `δ` for the indexed measure
    /// (`[J, JS]`), so its normalized values are all zero.
    pub normalization_degenerate: [bool; 2],
}

impl GridCell {
    pub fn degenerate(&self, measure: Measure) -> bool {
        self.normalization_degenerate[measure_index(measure)]
    }
}

fn measure_index(measure: Measure) -> usize {
    match measure {
        Measure::Jeffreys => 0,
        Measure::JensenShannon => 1,
    }
}

/// Fully evaluated scenario. Cells are ordered with the last axis varying
/// fastest; the axes are `[alpha], theta, phi, r, gamma_tau | tau`.
#[derive(Clone, Debug, PartialEq)]
pub struct SweepGrid {
    pub config: ScenarioConfig,
    pub axes: Vec<AxisDef>,
    pub cells: Vec<GridCell>,
    pub metadata: GridMetadata,
}

impl SweepGrid {
    pub fn axis_index(&self, name: &str) -> Option<usize> {
        self.axes.iter().position(|a| a.name == name)
    }

    /// Cells per normalization panel: the `r × duration` block.
    pub fn panel_size(&self) -> usize {
        self.axes[self.axes.len() - 2..]
            .iter()
            .map(|a| a.values.len())
            .product()
    }
}

fn axes_for(cfg: &ScenarioConfig) -> Vec<AxisDef> {
    let mut axes = Vec::new();
    if let Some(alpha) = cfg.alpha_values() {
        axes.push(AxisDef {
            name: "alpha".into(),
            values: alpha,
        });
    }
    for (name, axis) in [
        ("theta", &cfg.state.theta),
        ("phi", &cfg.state.phi),
        ("r", &cfg.state.r),
    ] {
        axes.push(AxisDef {
            name: name.into(),
            values: axis.values(),
        });
    }
    axes.push(AxisDef {
        name: cfg.tau_axis().name().into(),
        values: cfg.tau_values(),
    });
    axes
}

fn coords_of(axes: &[AxisDef], mut index: usize) -> Vec<f64> {
    let mut coords = vec![0.0; axes.len()];
    for (k, axis) in axes.iter().enumerate().rev() {
        let n = axis.values.len();
        coords[k] = axis.values[index % n];
        index /= n;
    }
    coords
}

fn format_coords(axes: &[AxisDef], coords: &[f64]) -> String {
    axes.iter()
        .zip(coords)
        .map(|(a, v)| format!("{}={v}", a.name))
        .collect::<Vec<_>>()
        .join(", ")
}

fn evaluate_cell(cfg: &ScenarioConfig, axes: &[AxisDef], coords: &[f64]) -> Result<GridCell> {
    let get = |name: &str| axes.iter().position(|a| a.name == name).map(|i| coords[i]);
    let alpha = get("alpha").unwrap_or(0.5);
    let q = BlochQubit::new(
        get("r").expect("r axis"),
        get("theta").expect("theta axis"),
        get("phi").expect("phi axis"),
    )?;
    let duration = coords[coords.len() - 1];
    let tau = match cfg.tau_axis() {
        TauAxis::GammaTau => duration * cfg.tau_scale(),
        TauAxis::Tau => duration,
    };
    let traj = Trajectory::new(q, cfg.build_drive(alpha)?);
    let settings = QslSettings {
        refinement: cfg.refinement(),
        speed_mode: cfg.speed_mode,
    };
    let report = evaluate(&traj, tau, &cfg.measures, &settings)?;
    Ok(GridCell {
        coords: coords.to_vec(),
        tau,
        report,
        normalization_degenerate: [false; 2],
    })
}

/// Evaluates every cell of the config's grid, in parallel across cells.
///
/// Cell errors carry the cell's coordinates; when several cells fail the
/// one with the lowest index is reported, so failures are deterministic.
pub fn run_scenario(cfg: &ScenarioConfig) -> Result<SweepGrid> {
    cfg.validate()?;
    let axes = axes_for(cfg);
    let total: usize = axes.iter().map(|a| a.values.len()).product();

    let slots: Vec<Mutex<Option<Result<GridCell>>>> =
        (0..total).map(|_| Mutex::new(None)).collect();
    let next = AtomicUsize::new(0);
    let workers = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(total.max(1));
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= total {
                    break;
                }
                let coords = coords_of(&axes, i);
                let result = evaluate_cell(cfg, &axes, &coords).map_err(|e| Error::AtCell {
                    coords: format_coords(&axes, &coords),
                    source: Box::new(e),
                });
                *slots[i].lock().expect("slot lock") = Some(result);
            });
        }
    });
    let mut cells = Vec::with_capacity(total);
    for slot in slots {
        cells.push(
            slot.into_inner()
                .expect("slot lock")
                .expect("every cell evaluated")?,
        );
    }

    let mut grid = SweepGrid {
        config: cfg.clone(),
        metadata: metadata_for(cfg, &axes),
        axes,
        cells,
    };
    normalize_panels(&mut grid);
    Ok(grid)
}

fn metadata_for(cfg: &ScenarioConfig, axes: &[AxisDef]) -> GridMetadata {
    let canonical = cfg.canonical_toml();
    let hash = Sha256::digest(canonical.as_bytes());
    let panel_axes: Vec<&str> = axes[..axes.len() - 2]
        .iter()
        .map(|a| a.name.as_str())
        .collect();
    let block_axes: Vec<&str> = axes[axes.len() - 2..]
        .iter()
        .map(|a| a.name.as_str())
        .collect();
    GridMetadata {
        scenario: cfg.name.clone(),
        tool_version: TOOL_VERSION.into(),
        config_sha256: hex::encode(hash),
        normalization_scope: format!(
            "per panel: min-max over {} at fixed {}",
            block_axes.join(" x "),
            panel_axes.join(", ")
        ),
        canonical_config: canonical,
    }
}

fn normalize_panels(grid: &mut SweepGrid) {
    let size = grid.panel_size();
    let measures = grid.config.measures.clone();
    for panel in grid.cells.chunks_mut(size) {
        for &m in &measures {
            let deltas: Vec<f64> = panel
                .iter()
                .map(|c| c.report.measure(m).expect("measure evaluated").delta)
                .collect();
            let normalized = normalize_over_grid(&deltas);
            for (cell, value) in panel.iter_mut().zip(normalized.values) {
                cell.report
                    .measure_mut(m)
                    .expect("measure evaluated")
                    .delta_normalized = Some(value);
                cell.normalization_degenerate[measure_index(m)] = normalized.degenerate;
            }
        }
    }
}
