//! Config-driven parameter sweeps and their CSV output.

pub mod config;
pub mod csv;
pub mod sweep;

pub use config::{parse_config, Axis, DriveKind, ScenarioConfig, TauAxis};
pub use csv::{export_csv, parse_csv, to_csv_string, ParsedCsv};
pub use sweep::{run_scenario, AxisDef, GridCell, GridMetadata, SweepGrid, TOOL_VERSION};
