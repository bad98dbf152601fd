//! CSV export of sweep grids and the matching re-parser.

use std::path::Path;

use super::sweep::SweepGrid;
use crate::error::{Error, Result};
use crate::qsl::{Measure, MeasureReport};

/// Twelve significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.11e}")
}

fn measure_columns(m: Measure) -> Vec<String> {
    let t = m.tag();
    [
        format!("divergence_{t}"),
        format!("speed_avg_{t}"),
        format!("tau_qsl_{t}"),
        format!("tau_qsl_{t}_exact"),
        format!("tau_qsl_{t}_kraus_bound"),
        format!("upper_bound_{t}"),
        format!("delta_{t}"),
        format!("delta_{t}_normalized"),
        format!("frozen_{t}"),
        format!("normalization_degenerate_{t}"),
    ]
    .into()
}

fn measure_fields(r: &MeasureReport, degenerate: bool) -> Vec<String> {
    vec![
        format_float(r.divergence),
        format_float(r.speed_avg),
        format_float(r.tau_qsl),
        format_float(r.tau_qsl_exact),
        format_float(r.tau_qsl_kraus_bound),
        format_float(r.upper_bound),
        format_float(r.delta),
        format_float(r.delta_normalized.unwrap_or(0.0)),
        r.frozen.to_string(),
        degenerate.to_string(),
    ]
}

/// Header row for a grid.
pub fn header(grid: &SweepGrid) -> Vec<String> {
    let mut cols: Vec<String> = grid.axes.iter().map(|a| a.name.clone()).collect();
    if grid.axis_index("tau").is_none() {
        cols.push("tau".into());
    }
    for &m in &grid.config.measures {
        cols.extend(measure_columns(m));
    }
    if grid.config.measures.contains(&Measure::Jeffreys) {
        cols.push("tau_J_below".into());
        cols.push("tau_J_above".into());
    }
    cols.push("converged".into());
    cols
}

/// Renders the grid as CSV text: a `#` metadata block with the config
/// echo, the header, then one row per cell. No timestamps.
pub fn to_csv_string(grid: &SweepGrid) -> Result<String> {
    let meta = &grid.metadata;
    let mut out = String::new();
    out.push_str(&format!("# scenario: {}\n", meta.scenario));
    out.push_str(&format!("# tool_version: {}\n", meta.tool_version));
    out.push_str(&format!("# config_sha256: {}\n", meta.config_sha256));
    out.push_str(&format!(
        "# normalization_scope: {}\n",
        meta.normalization_scope
    ));
    out.push_str(&format!("# speed_mode: {}\n", grid.config.speed_mode));
    out.push_str("# config:\n");
    for line in meta.canonical_config.lines() {
        if line.is_empty() {
            out.push_str("#\n");
        } else {
            out.push_str(&format!("#   {line}\n"));
        }
    }

    let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
    let has_tau_axis = grid.axis_index("tau").is_some();
    writer.write_record(header(grid))?;
    for cell in &grid.cells {
        let mut row: Vec<String> = cell.coords.iter().map(|&v| format_float(v)).collect();
        if !has_tau_axis {
            row.push(format_float(cell.tau));
        }
        for &m in &grid.config.measures {
            let r = cell.report.measure(m).expect("measure evaluated");
            row.extend(measure_fields(r, cell.degenerate(m)));
        }
        if let (Some(below), Some(above)) = (cell.report.tau_j_below, cell.report.tau_j_above) {
            row.push(format_float(below));
            row.push(format_float(above));
        }
        row.push(cell.report.converged.to_string());
        writer.write_record(&row)?;
    }
    let body = writer
        .into_inner()
        .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))?;
    out.push_str(std::str::from_utf8(&body).expect("CSV fields are UTF-8"));
    Ok(out)
}

pub fn export_csv(grid: &SweepGrid, path: &Path) -> Result<()> {
    let text = to_csv_string(grid)?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, text)?;
    Ok(())
}

/// A CSV file read back: metadata lines (without the `# ` prefix), header
/// and raw string fields.
#[derive(Clone, Debug, PartialEq)]
pub struct ParsedCsv {
    pub metadata: Vec<String>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

/// Parses text produced by [`to_csv_string`]. Rows must all have the
/// header's width.
pub fn parse_csv(text: &str) -> Result<ParsedCsv> {
    let metadata = text
        .lines()
        .take_while(|l| l.starts_with('#'))
        .map(|l| {
            l.trim_start_matches('#')
                .strip_prefix(' ')
                .unwrap_or(l.trim_start_matches('#'))
                .to_string()
        })
        .collect();
    let mut reader = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .has_headers(true)
        .from_reader(text.as_bytes());
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        rows.push(record?.iter().map(str::to_string).collect());
    }
    Ok(ParsedCsv {
        metadata,
        header,
        rows,
    })
}

impl ParsedCsv {
    pub fn column_index(&self, name: &str) -> Result<usize> {
        self.header
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| Error::InvalidParameter(format!("no column `{name}`")))
    }

    pub fn column(&self, name: &str) -> Result<Vec<f64>> {
        let i = self.column_index(name)?;
        self.rows
            .iter()
            .map(|row| {
                row[i]
                    .parse::<f64>()
                    .map_err(|e| Error::InvalidParameter(format!("column `{name}`: {e}")))
            })
            .collect()
    }

    pub fn column_bool(&self, name: &str) -> Result<Vec<bool>> {
        let i = self.column_index(name)?;
        self.rows
            .iter()
            .map(|row| {
                row[i]
                    .parse::<bool>()
                    .map_err(|e| Error::InvalidParameter(format!("column `{name}`: {e}")))
            })
            .collect()
    }

    /// Value of a `key: value` metadata line.
    pub fn metadata_value(&self, key: &str) -> Option<&str> {
        self.metadata
            .iter()
            .find_map(|l| l.strip_prefix(key).and_then(|rest| rest.strip_prefix(": ")))
    }
}
