//! Scenario configuration files (JSON).

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use tlsim::{DriveField, IntegratorConfig, TlsParams};

use crate::error::{config, io, CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Solver {
    /// Schrödinger equation in the interaction frame, no approximation.
    NumericFull,
    /// Full Bloch equations with relaxation.
    NumericBloch,
    Rwa,
    Avg2,
    Naive,
}

impl Solver {
    pub fn name(self) -> &'static str {
        match self {
            Solver::NumericFull => "numeric_full",
            Solver::NumericBloch => "numeric_bloch",
            Solver::Rwa => "rwa",
            Solver::Avg2 => "avg2",
            Solver::Naive => "naive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    Phase0,
    Carrier,
    Amplitude,
}

/// Evenly spaced grid. `endpoint = false` drops `stop`, which is what a
/// periodic axis wants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    #[serde(default = "yes")]
    pub endpoint: bool,
}

fn yes() -> bool {
    true
}

impl GridSpec {
    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        let div = if self.endpoint {
            n.saturating_sub(1).max(1)
        } else {
            n.max(1)
        };
        let h = (self.stop - self.start) / div as f64;
        (0..n).map(|k| self.start + h * k as f64).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis: SweepAxis,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub values: Option<Vec<f64>>,
}

impl SweepSpec {
    pub fn phase(points: usize) -> Self {
        Self {
            axis: SweepAxis::Phase0,
            grid: Some(GridSpec {
                start: 0.0,
                stop: 2.0 * PI,
                points,
                endpoint: false,
            }),
            values: None,
        }
    }

    /// Explicit values win over the grid; a phase sweep defaults to 64
    /// points on `[0, 2π)`.
    pub fn points(&self) -> Result<Vec<f64>> {
        if let Some(v) = &self.values {
            if v.is_empty() {
                return Err(config("sweep.values", "must not be empty"));
            }
            if let Some(bad) = v.iter().find(|x| !x.is_finite()) {
                return Err(config("sweep.values", format!("non-finite value {bad}")));
            }
            return Ok(v.clone());
        }
        match (&self.grid, self.axis) {
            (Some(g), _) => {
                if g.points == 0 {
                    return Err(config("sweep.grid.points", "must be positive"));
                }
                if !(g.start.is_finite() && g.stop.is_finite()) {
                    return Err(config("sweep.grid", "bounds must be finite"));
                }
                Ok(g.values())
            }
            (None, SweepAxis::Phase0) => Ok(SweepSpec::phase(64).grid.unwrap().values()),
            (None, _) => Err(config(
                "sweep.grid",
                "carrier and amplitude sweeps need a grid or explicit values",
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Directory relative to the output root.
    #[serde(default)]
    pub dir: Option<PathBuf>,
    /// Approximate number of rows per CSV; the record stride is chosen
    /// so the grid has at least this many points when possible.
    #[serde(default = "default_rows")]
    pub rows: usize,
}

fn default_rows() -> usize {
    2000
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: None,
            rows: default_rows(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default)]
    pub system: TlsParams,
    pub drive: DriveField,
    pub solvers: Vec<Solver>,
    #[serde(default)]
    pub span: Option<[f64; 2]>,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
}

fn default_name() -> String {
    "scenario".to_owned()
}

fn scoped(prefix: &str, e: tlsim::Error) -> CliError {
    match e {
        tlsim::Error::InvalidParameter { field, reason } => config(format!("{prefix}.{field}"), reason),
        other => config(prefix, other.to_string()),
    }
}

impl ScenarioConfig {
    pub fn new(name: &str, system: TlsParams, drive: DriveField, solvers: &[Solver]) -> Self {
        Self {
            name: name.to_owned(),
            system,
            drive,
            solvers: solvers.to_vec(),
            span: None,
            integrator: IntegratorConfig::default(),
            output: OutputConfig::default(),
            sweep: None,
        }
    }

    pub fn with_span(mut self, start: f64, end: f64) -> Self {
        self.span = Some([start, end]);
        self
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(io(path))?;
        let cfg: Self = serde_json::from_str(&text).map_err(|source| CliError::Json {
            path: path.to_owned(),
            source,
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty() || self.name.contains(['/', '\\']) {
            return Err(config("name", "must be a non-empty file stem"));
        }
        self.system.validate().map_err(|e| scoped("system", e))?;
        self.drive.validate().map_err(|e| scoped("drive", e))?;
        self.integrator.validate().map_err(|e| scoped("integrator", e))?;
        if self.solvers.is_empty() {
            return Err(config("solvers", "at least one solver is required"));
        }
        for (i, s) in self.solvers.iter().enumerate() {
            if self.solvers[..i].contains(s) {
                return Err(config(format!("solvers[{i}]"), format!("`{}` listed twice", s.name())));
            }
        }
        if let Some([a, b]) = self.span {
            if !(a.is_finite() && b.is_finite() && b > a) {
                return Err(config("span", format!("need finite start < end, got [{a}, {b}]")));
            }
        }
        if self.output.rows < 2 {
            return Err(config("output.rows", "must be at least 2"));
        }
        if let Some(sw) = &self.sweep {
            let pts = sw.points()?;
            if sw.axis == SweepAxis::Carrier {
                if self.drive.is_chirped() {
                    return Err(config("sweep.axis", "a chirped drive has no fixed carrier to sweep"));
                }
                if pts.iter().any(|w| *w <= 0.0) {
                    return Err(config("sweep.values", "carrier frequencies must be positive"));
                }
            }
            if sw.axis == SweepAxis::Amplitude && pts.iter().any(|a| *a < 0.0) {
                return Err(config("sweep.values", "amplitudes must be non-negative"));
            }
        }
        Ok(())
    }

    /// Explicit span, else the drive's natural end, else three RWA flop
    /// periods of a CW tone.
    pub fn resolved_span(&self) -> (f64, f64) {
        if let Some([a, b]) = self.span {
            return (a, b);
        }
        if let Some(end) = self.drive.natural_end() {
            return (0.0, end);
        }
        (0.0, 3.0 * cw_flop_period(&self.system, &self.drive))
    }
}

/// `π/Ω` for a CW tone: the time for one full population cycle in RWA.
pub fn cw_flop_period(p: &TlsParams, d: &DriveField) -> f64 {
    match d {
        DriveField::CwTone {
            omega, amplitude_half, ..
        } => {
            let delta = omega - p.omega0;
            let rabi = (amplitude_half * amplitude_half + 0.25 * delta * delta).sqrt();
            if rabi > 0.0 {
                PI / rabi
            } else {
                100.0
            }
        }
        _ => 100.0,
    }
}
