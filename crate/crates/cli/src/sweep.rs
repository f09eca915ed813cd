//! Parameter sweeps, one independent run per grid value, in parallel.

use rayon::prelude::*;
use serde_json::json;
use tlsim::csv::Table;
use tlsim::DriveField;

use crate::config::{cw_flop_period, ScenarioConfig, Solver, SweepAxis};
use crate::error::{config, Result};
use crate::solvers::{run_solver, Grid, SolverOutput};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointResult {
    pub final_n1: f64,
    /// Largest excited population in the window, refined parabolically.
    pub peak_n2: f64,
    /// Time of the maximum of N₂ averaged over the `2ω` ripple period.
    pub t_peak: f64,
    /// Height of that ripple-averaged maximum.
    pub smooth_peak_n2: f64,
}

#[derive(Debug, Clone)]
pub struct SweepResult {
    pub axis: SweepAxis,
    pub solvers: Vec<Solver>,
    pub values: Vec<f64>,
    /// `points[i][j]`: value `i`, solver `j`.
    pub points: Vec<Vec<PointResult>>,
}

fn set_carrier(d: &mut DriveField, w: f64) {
    match d {
        DriveField::CwTone { omega, .. } | DriveField::GaussianPulse { omega, .. } => *omega = w,
        DriveField::ChirpedGaussianPulse { .. } => {}
        DriveField::PulseTrain { pulses } => pulses.iter_mut().for_each(|p| set_carrier(p, w)),
    }
}

fn set_amplitude(d: &mut DriveField, a: f64) {
    match d {
        DriveField::CwTone { amplitude_half, .. } => *amplitude_half = a,
        DriveField::GaussianPulse { peak_half, .. } | DriveField::ChirpedGaussianPulse { peak_half, .. } => {
            *peak_half = a
        }
        DriveField::PulseTrain { pulses } => pulses.iter_mut().for_each(|p| set_amplitude(p, a)),
    }
}

/// The scenario at one sweep value. A phase value becomes the drive's
/// `phase0` (a train's members all move by the same offset).
pub fn apply_axis(base: &ScenarioConfig, axis: SweepAxis, v: f64) -> Result<ScenarioConfig> {
    let mut cfg = base.clone();
    cfg.sweep = None;
    match axis {
        SweepAxis::Phase0 => cfg.drive = base.drive.with_phase_shift(v - base.drive.phase0()),
        SweepAxis::Carrier => {
            if base.drive.is_chirped() {
                return Err(config("sweep.axis", "a chirped drive has no fixed carrier to sweep"));
            }
            set_carrier(&mut cfg.drive, v);
            if base.span.is_none() && base.drive.natural_end().is_none() {
                // One RWA flop at this carrier.
                cfg.span = Some([0.0, cw_flop_period(&cfg.system, &cfg.drive)]);
            }
        }
        SweepAxis::Amplitude => set_amplitude(&mut cfg.drive, v),
    }
    Ok(cfg)
}

/// Vertex of the parabola through three equally spaced samples, as an
/// offset in units of the spacing, plus the interpolated value.
pub fn parabolic_vertex(y0: f64, y1: f64, y2: f64) -> (f64, f64) {
    let den = y0 - 2.0 * y1 + y2;
    if den == 0.0 {
        return (0.0, y1);
    }
    let s = (0.5 * (y0 - y2) / den).clamp(-1.0, 1.0);
    (s, y1 - 0.25 * (y0 - y2) * s)
}

/// Location and height of the maximum of `ys(xs)`, refined with a
/// parabola when the discrete maximum is interior.
pub fn refined_max(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let (k, _) = ys
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty series");
    if k == 0 || k + 1 == ys.len() {
        return (xs[k], ys[k]);
    }
    let (s, y) = parabolic_vertex(ys[k - 1], ys[k], ys[k + 1]);
    let h = if s < 0.0 { xs[k] - xs[k - 1] } else { xs[k + 1] - xs[k] };
    (xs[k] + s * h, y)
}

/// Centred running mean over `window` (time units) on a uniform grid.
pub fn running_mean(ts: &[f64], ys: &[f64], window: f64) -> Vec<f64> {
    if ts.len() < 3 {
        return ys.to_vec();
    }
    let dt = (ts[ts.len() - 1] - ts[0]) / (ts.len() - 1) as f64;
    let half = (0.5 * window / dt).round() as usize;
    let mut prefix = vec![0.0];
    for y in ys {
        prefix.push(prefix.last().unwrap() + y);
    }
    (0..ys.len())
        .map(|i| {
            let a = i.saturating_sub(half);
            let b = (i + half + 1).min(ys.len());
            (prefix[b] - prefix[a]) / (b - a) as f64
        })
        .collect()
}

fn point(out: &SolverOutput, carrier: Option<f64>) -> PointResult {
    let n2: Vec<f64> = out.n2().collect();
    let (_, peak_n2) = refined_max(&out.times, &n2);
    let smooth = match carrier {
        Some(w) if w > 0.0 => running_mean(&out.times, &n2, std::f64::consts::PI / w),
        _ => n2,
    };
    let (t_peak, smooth_peak_n2) = refined_max(&out.times, &smooth);
    PointResult {
        final_n1: out.final_n1(),
        peak_n2,
        t_peak,
        smooth_peak_n2,
    }
}

pub fn run_sweep(base: &ScenarioConfig, axis: SweepAxis, values: &[f64]) -> Result<SweepResult> {
    base.validate()?;
    if values.is_empty() {
        return Err(config("sweep.values", "must not be empty"));
    }
    let points = values
        .par_iter()
        .map(|&v| {
            let cfg = apply_axis(base, axis, v)?;
            let grid = Grid::plan(&cfg.integrator, cfg.resolved_span(), cfg.output.rows);
            cfg.solvers
                .iter()
                .map(|&s| run_solver(&cfg, s, &grid).map(|o| point(&o, cfg.drive.fixed_carrier())))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult {
        axis,
        solvers: base.solvers.clone(),
        values: values.to_vec(),
        points,
    })
}

pub fn sweep_phase(base: &ScenarioConfig, phases: &[f64]) -> Result<SweepResult> {
    run_sweep(base, SweepAxis::Phase0, phases)
}

pub fn sweep_frequency(base: &ScenarioConfig, omegas: &[f64]) -> Result<SweepResult> {
    run_sweep(base, SweepAxis::Carrier, omegas)
}

impl SweepResult {
    pub fn column(&self, solver: Solver, f: impl Fn(&PointResult) -> f64) -> Option<Vec<f64>> {
        let j = self.solvers.iter().position(|s| *s == solver)?;
        Some(self.points.iter().map(|row| f(&row[j])).collect())
    }

    pub fn axis_name(&self) -> &'static str {
        match self.axis {
            SweepAxis::Phase0 => "phase0",
            SweepAxis::Carrier => "omega",
            SweepAxis::Amplitude => "amplitude_half",
        }
    }

    pub fn table(&self) -> Table {
        let mut header = vec![self.axis_name().to_owned()];
        for s in &self.solvers {
            header.push(format!("final_n1_{}", s.name()));
            if self.axis != SweepAxis::Phase0 {
                header.push(format!("peak_n2_{}", s.name()));
                header.push(format!("t_peak_{}", s.name()));
                header.push(format!("smooth_peak_n2_{}", s.name()));
            }
        }
        let mut t = Table::new(&header);
        for (v, row) in self.values.iter().zip(&self.points) {
            let mut r = vec![*v];
            for p in row {
                r.push(p.final_n1);
                if self.axis != SweepAxis::Phase0 {
                    r.push(p.peak_n2);
                    r.push(p.t_peak);
                    r.push(p.smooth_peak_n2);
                }
            }
            t.push(&r);
        }
        t
    }

    /// Sweep value maximizing the peak excited population.
    pub fn argmax_peak(&self, solver: Solver) -> Option<f64> {
        let y = self.column(solver, |p| p.peak_n2)?;
        Some(refined_max(&self.values, &y).0)
    }

    /// Sweep value maximizing the ripple-averaged peak.
    pub fn argmax_smooth_peak(&self, solver: Solver) -> Option<f64> {
        let y = self.column(solver, |p| p.smooth_peak_n2)?;
        Some(refined_max(&self.values, &y).0)
    }

    /// Sweep value with the slowest flop, i.e. the latest population peak.
    pub fn slowest_flop(&self, solver: Solver) -> Option<f64> {
        let y = self.column(solver, |p| p.t_peak)?;
        Some(refined_max(&self.values, &y).0)
    }

    pub fn summary(&self) -> serde_json::Value {
        let per: serde_json::Map<_, _> = self
            .solvers
            .iter()
            .map(|&s| {
                let f = self.column(s, |p| p.final_n1).unwrap();
                let lo = f.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = f.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                let mut v = json!({
                    "final_n1_min": lo,
                    "final_n1_max": hi,
                    "final_n1_spread": hi - lo,
                });
                if self.axis != SweepAxis::Phase0 && self.values.len() > 1 {
                    v["argmax_peak_n2"] = json!(self.argmax_peak(s));
                    v["argmax_smooth_peak_n2"] = json!(self.argmax_smooth_peak(s));
                    v["slowest_flop"] = json!(self.slowest_flop(s));
                }
                (s.name().to_owned(), v)
            })
            .collect();
        json!({ "axis": self.axis_name(), "points": self.values.len(), "solvers": per })
    }
}
