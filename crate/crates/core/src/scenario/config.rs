//! Declarative scenario configs in TOML.

use serde::{Deserialize, Serialize};

use crate::channels::{ChannelKind, Drive, KrausChannel, UnitaryDrive};
use crate::error::{Error, Result};
use crate::qsl::{Measure, SpeedMode};
use crate::quadrature::Refinement;

/// Default resolution of range axes that omit `count`.
pub const DEFAULT_AXIS_COUNT: usize = 50;

/// A grid axis: a single value, an explicit list, or an inclusive
/// linearly spaced range.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Axis {
    Scalar(f64),
    List(Vec<f64>),
    Range {
        start: f64,
        stop: f64,
        #[serde(default = "default_count")]
        count: usize,
    },
}

fn default_count() -> usize {
    DEFAULT_AXIS_COUNT
}

impl Axis {
    pub fn values(&self) -> Vec<f64> {
        match self {
            Axis::Scalar(v) => vec![*v],
            Axis::List(vs) => vs.clone(),
            Axis::Range { start, stop, count } => match count {
                0 => Vec::new(),
                1 => vec![*start],
                n => (0..*n)
                    .map(|i| start + (stop - start) * i as f64 / (*n - 1) as f64)
                    .collect(),
            },
        }
    }

    fn validate(&self, name: &str, lo: f64, hi: f64, hi_inclusive: bool) -> Result<()> {
        let values = self.values();
        if values.is_empty() {
            return Err(Error::Config(format!("axis `{name}` is empty")));
        }
        for v in values {
            let above = if hi_inclusive { v > hi } else { v >= hi };
            if !v.is_finite() || v < lo || above {
                let close = if hi_inclusive { ']' } else { ')' };
                return Err(Error::Config(format!(
                    "axis `{name}` value {v} outside [{lo}, {hi}{close}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DriveKind {
    Depolarizing,
    PhaseDamping,
    Gad,
    Unitary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DriveConfig {
    pub kind: DriveKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// GAD bath parameter; may be a list to sweep panels.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Axis>,
    /// Unitary drive vector, `H = n·σ`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<[f64; 3]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateConfig {
    pub r: Axis,
    #[serde(default = "zero_axis")]
    pub theta: Axis,
    #[serde(default = "zero_axis")]
    pub phi: Axis,
}

fn zero_axis() -> Axis {
    Axis::Scalar(0.0)
}

/// Duration axis, either dimensionless `Γτ` (channels only) or absolute `τ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TauConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_tau: Option<Axis>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<Axis>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    #[serde(default = "default_measures")]
    pub measures: Vec<Measure>,
    #[serde(default)]
    pub speed_mode: SpeedMode,
    #[serde(default = "default_panels")]
    pub panels: usize,
    pub drive: DriveConfig,
    pub state: StateConfig,
    pub tau: TauConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_measures() -> Vec<Measure> {
    vec![Measure::Jeffreys, Measure::JensenShannon]
}

fn default_panels() -> usize {
    Refinement::default().panels
}

/// Which duration axis a config sweeps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TauAxis {
    GammaTau,
    Tau,
}

impl TauAxis {
    pub fn name(&self) -> &'static str {
        match self {
            TauAxis::GammaTau => "gamma_tau",
            TauAxis::Tau => "tau",
        }
    }
}

/// Parses and validates a TOML scenario.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(Error::Config("`name` must not be empty".into()));
        }
        if self.measures.is_empty() {
            return Err(Error::Config(
                "`measures` must list at least one of J, JS".into(),
            ));
        }
        let distinct: std::collections::HashSet<_> = self.measures.iter().collect();
        if distinct.len() != self.measures.len() {
            return Err(Error::Config("`measures` contains duplicates".into()));
        }
        Refinement::with_panels(self.panels).map_err(|e| Error::Config(e.to_string()))?;

        let d = &self.drive;
        match d.kind {
            DriveKind::Unitary => {
                let n =
                    d.n.ok_or_else(|| Error::Config("unitary drive needs `n`".into()))?;
                if n.iter().any(|x| !x.is_finite()) {
                    return Err(Error::Config("`drive.n` must be finite".into()));
                }
                if d.gamma.is_some() || d.alpha.is_some() {
                    return Err(Error::Config(
                        "unitary drive takes no `gamma` or `alpha`".into(),
                    ));
                }
            }
            kind => {
                let gamma = d
                    .gamma
                    .ok_or_else(|| Error::Config("channel drive needs `gamma`".into()))?;
                if !(gamma.is_finite() && gamma > 0.0) {
                    return Err(Error::Config(format!(
                        "`drive.gamma` must be positive, got {gamma}"
                    )));
                }
                if d.n.is_some() {
                    return Err(Error::Config("channel drive takes no `n`".into()));
                }
                match (kind, &d.alpha) {
                    (DriveKind::Gad, None) => {
                        return Err(Error::Config("gad drive needs `alpha`".into()))
                    }
                    (DriveKind::Gad, Some(a)) => a.validate("drive.alpha", 0.0, 1.0, true)?,
                    (_, Some(_)) => {
                        return Err(Error::Config(
                            "`alpha` only applies to the gad drive".into(),
                        ))
                    }
                    _ => {}
                }
            }
        }

        self.state.r.validate("state.r", 0.0, 1.0, false)?;
        self.state
            .theta
            .validate("state.theta", 0.0, std::f64::consts::PI, true)?;
        self.state
            .phi
            .validate("state.phi", 0.0, std::f64::consts::TAU, false)?;

        match (&self.tau.gamma_tau, &self.tau.tau) {
            (Some(_), Some(_)) => {
                return Err(Error::Config(
                    "give exactly one of `tau.gamma_tau`, `tau.tau`".into(),
                ))
            }
            (None, None) => {
                return Err(Error::Config("`tau` needs `gamma_tau` or `tau`".into()));
            }
            (Some(a), None) => {
                if d.kind == DriveKind::Unitary {
                    return Err(Error::Config(
                        "`gamma_tau` needs a channel drive; use `tau`".into(),
                    ));
                }
                a.validate("tau.gamma_tau", 0.0, f64::MAX, true)?;
            }
            (None, Some(a)) => a.validate("tau.tau", 0.0, f64::MAX, true)?,
        }
        Ok(())
    }

    pub fn tau_axis(&self) -> TauAxis {
        if self.tau.gamma_tau.is_some() {
            TauAxis::GammaTau
        } else {
            TauAxis::Tau
        }
    }

    pub fn tau_values(&self) -> Vec<f64> {
        self.tau
            .gamma_tau
            .as_ref()
            .or(self.tau.tau.as_ref())
            .map(Axis::values)
            .unwrap_or_default()
    }

    /// Swept GAD `α` values, or `None` for other drives.
    pub fn alpha_values(&self) -> Option<Vec<f64>> {
        match self.drive.kind {
            DriveKind::Gad => self.drive.alpha.as_ref().map(Axis::values),
            _ => None,
        }
    }

    pub fn refinement(&self) -> Refinement {
        Refinement {
            panels: self.panels,
            ..Refinement::default()
        }
    }

    /// Drive for one panel; `alpha` is ignored except for GAD.
    pub fn build_drive(&self, alpha: f64) -> Result<Drive> {
        let d = &self.drive;
        let kind = match d.kind {
            DriveKind::Unitary => {
                return Ok(Drive::Unitary(UnitaryDrive::new(d.n.expect("validated"))?));
            }
            DriveKind::Depolarizing => ChannelKind::Depolarizing,
            DriveKind::PhaseDamping => ChannelKind::PhaseDamping,
            DriveKind::Gad => ChannelKind::GeneralizedAmplitudeDamping,
        };
        Ok(Drive::Channel(KrausChannel::new(
            kind,
            d.gamma.expect("validated"),
            alpha,
        )?))
    }

    /// Conversion from the duration axis to absolute time.
    pub fn tau_scale(&self) -> f64 {
        match self.tau_axis() {
            TauAxis::GammaTau => 1.0 / self.drive.gamma.expect("validated"),
            TauAxis::Tau => 1.0,
        }
    }

    /// Normalized TOML text; hashed into the CSV metadata and echoed there.
    pub fn canonical_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
