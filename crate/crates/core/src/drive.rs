//! Drive fields and their evaluation.
//!
//! Every drive couples the levels through `F(t) = 2 Ω₀(t) cos(Φ(t) + φ₀)`
//! where `Φ(t) = ∫₀ᵗ ω(s) ds` is the accumulated carrier phase. Chirped pulses
//! follow the chirp law `ω(t) = (ω₀ + √(ω₀² + 4Ω₀(t)²)) / 2`, the positive root
//! of `ω² − ω₀ω − Ω₀² = 0`, which keeps the Bloch–Siegert-shifted detuning at
//! zero throughout the pulse.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Half-width of the window (in σ₀) where quadratures use the refined step.
const REFINED_HALF_WIDTH: f64 = 6.0;
/// Beyond this many σ₀ from the centre an envelope is treated as zero.
const ENVELOPE_CUTOFF: f64 = 40.0;

/// How the carrier phase of successive pulses in a train is referenced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CarrierPhase {
    /// One oscillator for the whole train: every pulse uses `Φ(t) + φ₀`.
    #[default]
    Continuous,
    /// Each pulse is `cos(Φ(t) − Φ(t_k) + φ₀)`, i.e. its phase is measured
    /// from its own centre.
    PerPulse,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianEnvelope {
    pub peak_half: f64,
    pub sigma0: f64,
    pub t_center: f64,
}

impl GaussianEnvelope {
    #[inline]
    pub fn value(&self, t: f64) -> f64 {
        let x = (t - self.t_center) / self.sigma0;
        if x.abs() > ENVELOPE_CUTOFF {
            return 0.0;
        }
        self.peak_half * (-0.5 * x * x).exp()
    }

    /// Total area `∫ 2Ω₀(s) ds` over the whole real line.
    pub fn full_area(&self) -> f64 {
        2.0 * self.peak_half * self.sigma0 * (2.0 * PI).sqrt()
    }

    fn window(&self) -> (f64, f64) {
        let w = REFINED_HALF_WIDTH * self.sigma0;
        (self.t_center - w, self.t_center + w)
    }
}

/// Positive root of `ω² − ω₀ω − Ω₀² = 0`.
#[inline]
pub fn chirp_law(omega0: f64, envelope: f64) -> f64 {
    0.5 * (omega0 + (omega0 * omega0 + 4.0 * envelope * envelope).sqrt())
}

/// `ω(t) − ω₀` for the chirp law, written to avoid cancellation when the
/// envelope is small.
#[inline]
fn chirp_excess(omega0: f64, envelope: f64) -> f64 {
    let e2 = envelope * envelope;
    2.0 * e2 / (omega0 + (omega0 * omega0 + 4.0 * e2).sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DriveField {
    #[serde(rename = "cw")]
    CwTone {
        omega: f64,
        amplitude_half: f64,
        #[serde(default)]
        phase0: f64,
    },
    #[serde(rename = "gaussian")]
    GaussianPulse {
        omega: f64,
        peak_half: f64,
        sigma0: f64,
        t_center: f64,
        #[serde(default)]
        phase0: f64,
    },
    #[serde(rename = "chirped_gaussian")]
    ChirpedGaussianPulse {
        omega0_ref: f64,
        peak_half: f64,
        sigma0: f64,
        t_center: f64,
        #[serde(default)]
        phase0: f64,
    },
    #[serde(rename = "train")]
    PulseTrain { pulses: Vec<DriveField> },
}

impl DriveField {
    pub fn cw(omega: f64, amplitude_half: f64) -> Self {
        DriveField::CwTone {
            omega,
            amplitude_half,
            phase0: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        fn finite(field: &'static str, v: f64) -> Result<()> {
            if v.is_finite() {
                Ok(())
            } else {
                Err(invalid(field, format!("must be finite, got {v}")))
            }
        }
        fn nonneg(field: &'static str, v: f64) -> Result<()> {
            finite(field, v)?;
            if v < 0.0 {
                return Err(invalid(field, format!("must be >= 0, got {v}")));
            }
            Ok(())
        }
        fn positive(field: &'static str, v: f64) -> Result<()> {
            finite(field, v)?;
            if v <= 0.0 {
                return Err(invalid(field, format!("must be > 0, got {v}")));
            }
            Ok(())
        }
        match self {
            DriveField::CwTone {
                omega,
                amplitude_half,
                phase0,
            } => {
                nonneg("omega", *omega)?;
                nonneg("amplitude_half", *amplitude_half)?;
                finite("phase0", *phase0)
            }
            DriveField::GaussianPulse {
                omega,
                peak_half,
                sigma0,
                t_center,
                phase0,
            } => {
                nonneg("omega", *omega)?;
                nonneg("peak_half", *peak_half)?;
                positive("sigma0", *sigma0)?;
                positive("t_center", *t_center)?;
                finite("phase0", *phase0)
            }
            DriveField::ChirpedGaussianPulse {
                omega0_ref,
                peak_half,
                sigma0,
                t_center,
                phase0,
            } => {
                positive("omega0_ref", *omega0_ref)?;
                nonneg("peak_half", *peak_half)?;
                positive("sigma0", *sigma0)?;
                positive("t_center", *t_center)?;
                finite("phase0", *phase0)
            }
            DriveField::PulseTrain { pulses } => {
                if pulses.is_empty() {
                    return Err(invalid("pulses", "a train needs at least one pulse"));
                }
                let mut last = f64::NEG_INFINITY;
                for p in pulses {
                    match p {
                        DriveField::GaussianPulse { .. } | DriveField::ChirpedGaussianPulse { .. } => {}
                        _ => return Err(invalid("pulses", "train members must be single pulses")),
                    }
                    p.validate()?;
                    let c = p.t_center().unwrap_or(0.0);
                    if c <= last {
                        return Err(invalid("pulses", "pulse centres must be strictly increasing"));
                    }
                    last = c;
                }
                Ok(())
            }
        }
    }

    pub fn is_chirped(&self) -> bool {
        match self {
            DriveField::ChirpedGaussianPulse { .. } => true,
            DriveField::PulseTrain { pulses } => pulses.iter().any(|p| p.is_chirped()),
            _ => false,
        }
    }

    /// Constant carrier frequency, if the whole drive has one.
    pub fn fixed_carrier(&self) -> Option<f64> {
        match self {
            DriveField::CwTone { omega, .. } | DriveField::GaussianPulse { omega, .. } => Some(*omega),
            DriveField::ChirpedGaussianPulse { .. } => None,
            DriveField::PulseTrain { pulses } => {
                let first = pulses.first()?.fixed_carrier()?;
                pulses.iter().all(|p| p.fixed_carrier() == Some(first)).then_some(first)
            }
        }
    }

    pub fn phase0(&self) -> f64 {
        match self {
            DriveField::CwTone { phase0, .. }
            | DriveField::GaussianPulse { phase0, .. }
            | DriveField::ChirpedGaussianPulse { phase0, .. } => *phase0,
            DriveField::PulseTrain { pulses } => pulses.first().map_or(0.0, |p| p.phase0()),
        }
    }

    /// Copy of the drive with every carrier phase offset by `dphi`.
    pub fn with_phase_shift(&self, dphi: f64) -> Self {
        let mut d = self.clone();
        d.shift_phase(dphi);
        d
    }

    fn shift_phase(&mut self, dphi: f64) {
        match self {
            DriveField::CwTone { phase0, .. }
            | DriveField::GaussianPulse { phase0, .. }
            | DriveField::ChirpedGaussianPulse { phase0, .. } => *phase0 += dphi,
            DriveField::PulseTrain { pulses } => pulses.iter_mut().for_each(|p| p.shift_phase(dphi)),
        }
    }

    pub fn t_center(&self) -> Option<f64> {
        match self {
            DriveField::GaussianPulse { t_center, .. } | DriveField::ChirpedGaussianPulse { t_center, .. } => {
                Some(*t_center)
            }
            _ => None,
        }
    }

    pub fn envelope_shape(&self) -> Option<GaussianEnvelope> {
        match self {
            DriveField::GaussianPulse {
                peak_half,
                sigma0,
                t_center,
                ..
            }
            | DriveField::ChirpedGaussianPulse {
                peak_half,
                sigma0,
                t_center,
                ..
            } => Some(GaussianEnvelope {
                peak_half: *peak_half,
                sigma0: *sigma0,
                t_center: *t_center,
            }),
            _ => None,
        }
    }

    /// The single pulses making up the drive (a train's members, or the drive itself).
    pub fn members(&self) -> &[DriveField] {
        match self {
            DriveField::PulseTrain { pulses } => pulses,
            other => std::slice::from_ref(other),
        }
    }

    /// Time by which every envelope has decayed (last centre + 5σ₀), or
    /// `None` for a CW tone.
    pub fn natural_end(&self) -> Option<f64> {
        self.members()
            .iter()
            .filter_map(|m| m.envelope_shape())
            .map(|e| e.t_center + 5.0 * e.sigma0)
            .reduce(f64::max)
    }

    /// Half-amplitude envelope `Ω₀(t)`.
    pub fn envelope_amplitude(&self, t: f64) -> f64 {
        match self {
            DriveField::CwTone { amplitude_half, .. } => *amplitude_half,
            DriveField::PulseTrain { pulses } => pulses.iter().map(|p| p.envelope_amplitude(t)).sum(),
            single => single.envelope_shape().map_or(0.0, |e| e.value(t)),
        }
    }

    /// Instantaneous carrier frequency `ω(t)`. For trains this is the
    /// frequency of the member with the largest envelope at `t`.
    pub fn instantaneous_frequency(&self, t: f64) -> f64 {
        match self {
            DriveField::CwTone { omega, .. } | DriveField::GaussianPulse { omega, .. } => *omega,
            DriveField::ChirpedGaussianPulse { omega0_ref, .. } => chirp_law(*omega0_ref, self.envelope_amplitude(t)),
            DriveField::PulseTrain { pulses } => pulses
                .iter()
                .max_by(|a, b| a.envelope_amplitude(t).total_cmp(&b.envelope_amplitude(t)))
                .map_or(0.0, |p| p.instantaneous_frequency(t)),
        }
    }

    /// Accumulated carrier phase `Φ(t) = ∫₀ᵗ ω(s) ds`.
    pub fn accumulated_phase(&self, t: f64) -> f64 {
        match self {
            DriveField::CwTone { omega, .. } | DriveField::GaussianPulse { omega, .. } => omega * t,
            DriveField::ChirpedGaussianPulse { omega0_ref, .. } => {
                let env = self.envelope_shape().expect("pulse");
                omega0_ref * t + chirp_phase_excess(*omega0_ref, &env, t)
            }
            DriveField::PulseTrain { .. } => {
                if let Some(w) = self.fixed_carrier() {
                    return w * t;
                }
                let windows = self.refined_windows();
                let base = self.base_quadrature_step();
                piecewise_simpson(|s| self.instantaneous_frequency(s), 0.0, t, base, &windows)
            }
        }
    }

    /// Envelope area `A(t) = ∫₀ᵗ 2Ω₀(s) ds`.
    pub fn envelope_area(&self, t: f64) -> f64 {
        match self {
            DriveField::CwTone { amplitude_half, .. } => 2.0 * amplitude_half * t,
            _ => self
                .members()
                .iter()
                .filter_map(|m| m.envelope_shape())
                .map(|env| piecewise_simpson(|s| 2.0 * env.value(s), 0.0, t, env.sigma0 / 64.0, &[env.window()]))
                .sum(),
        }
    }

    /// Field value `F(t)`.
    pub fn evaluate(&self, t: f64) -> f64 {
        match self {
            DriveField::PulseTrain { pulses } => pulses.iter().map(|p| p.evaluate(t)).sum(),
            single => 2.0 * single.envelope_amplitude(t) * (single.accumulated_phase(t) + single.phase0()).cos(),
        }
    }

    fn refined_windows(&self) -> Vec<(f64, f64)> {
        self.members()
            .iter()
            .filter_map(|m| m.envelope_shape())
            .map(|e| e.window())
            .collect()
    }

    fn base_quadrature_step(&self) -> f64 {
        self.members()
            .iter()
            .filter_map(|m| m.envelope_shape())
            .map(|e| e.sigma0 / 64.0)
            .fold(0.25, f64::min)
    }
}

/// `∫₀ᵗ (ω(s) − ω₀) ds` for a chirped Gaussian pulse.
fn chirp_phase_excess(omega0: f64, env: &GaussianEnvelope, t: f64) -> f64 {
    piecewise_simpson(
        |s| chirp_excess(omega0, env.value(s)),
        0.0,
        t,
        env.sigma0 / 64.0,
        &[env.window()],
    )
}

fn simpson(f: &impl Fn(f64) -> f64, a: f64, b: f64, max_step: f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let mut n = ((b - a) / max_step).ceil() as usize;
    n = n.max(2);
    if n % 2 == 1 {
        n += 1;
    }
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for k in 1..n {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + k as f64 * h);
    }
    acc * h / 3.0
}

/// Composite Simpson on `[a, b]` with `base` step, refined ×4 inside `windows`.
/// Returns a signed integral when `b < a`.
pub(crate) fn piecewise_simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, base: f64, windows: &[(f64, f64)]) -> f64 {
    if b < a {
        return -piecewise_simpson(f, b, a, base, windows);
    }
    let mut cuts: Vec<f64> = vec![a, b];
    for &(lo, hi) in windows {
        for c in [lo, hi] {
            if c > a && c < b {
                cuts.push(c);
            }
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    cuts.windows(2)
        .map(|seg| {
            let mid = 0.5 * (seg[0] + seg[1]);
            let refined = windows.iter().any(|&(lo, hi)| mid > lo && mid < hi);
            simpson(&f, seg[0], seg[1], if refined { base / 4.0 } else { base })
        })
        .sum()
}

/// Tabulated accumulated-phase excess of one chirped pulse, with cubic
/// Hermite interpolation between nodes (the derivative is known exactly).
#[derive(Debug, Clone)]
struct ChirpTable {
    omega0: f64,
    env: GaussianEnvelope,
    t_lo: f64,
    dt: f64,
    values: Vec<f64>,
}

impl ChirpTable {
    fn new(omega0: f64, env: GaussianEnvelope) -> Self {
        let t_lo = (env.t_center - 12.0 * env.sigma0).max(0.0);
        let t_hi = env.t_center + 12.0 * env.sigma0;
        let dt = env.sigma0 / 256.0;
        let n = ((t_hi - t_lo) / dt).ceil() as usize;
        let rate = |s: f64| chirp_excess(omega0, env.value(s));
        let (w_lo, w_hi) = env.window();
        let mut values = Vec::with_capacity(n + 1);
        let mut acc = piecewise_simpson(rate, 0.0, t_lo, env.sigma0 / 16.0, &[env.window()]);
        values.push(acc);
        for k in 0..n {
            let a = t_lo + k as f64 * dt;
            let b = t_lo + (k + 1) as f64 * dt;
            let mid = 0.5 * (a + b);
            let step = if mid > w_lo && mid < w_hi { dt / 4.0 } else { dt / 2.0 };
            acc += simpson(&rate, a, b, step);
            values.push(acc);
        }
        Self {
            omega0,
            env,
            t_lo,
            dt,
            values,
        }
    }

    fn rate(&self, t: f64) -> f64 {
        chirp_excess(self.omega0, self.env.value(t))
    }

    fn excess(&self, t: f64) -> f64 {
        let last = self.values.len() - 1;
        let x = (t - self.t_lo) / self.dt;
        if x <= 0.0 {
            // Left of the table: the integrand is below e^{-72} relative.
            return self.values[0] * (t / self.t_lo.max(f64::MIN_POSITIVE)).clamp(0.0, 1.0);
        }
        if x >= last as f64 {
            return self.values[last];
        }
        let k = x.floor() as usize;
        let s = x - k as f64;
        let t0 = self.t_lo + k as f64 * self.dt;
        let (y0, y1) = (self.values[k], self.values[k + 1]);
        let (d0, d1) = (self.rate(t0) * self.dt, self.rate(t0 + self.dt) * self.dt);
        hermite(y0, d0, y1, d1, s)
    }
}

#[inline]
pub(crate) fn hermite<T>(y0: T, d0: T, y1: T, d1: T, s: f64) -> T
where
    T: std::ops::Mul<f64, Output = T> + std::ops::Add<Output = T> + Copy,
{
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    y0 * h00 + d0 * h10 + y1 * h01 + d1 * h11
}

#[derive(Debug, Clone)]
struct PreparedMember {
    env: Option<GaussianEnvelope>,
    cw_amplitude: f64,
    omega: f64,
    phase0: f64,
    chirp: Option<ChirpTable>,
}

impl PreparedMember {
    fn envelope(&self, t: f64) -> f64 {
        self.env.map_or(self.cw_amplitude, |e| e.value(t))
    }

    fn phase(&self, t: f64) -> f64 {
        match &self.chirp {
            Some(c) => c.omega0 * t + c.excess(t),
            None => self.omega * t,
        }
    }

    fn frequency(&self, t: f64) -> f64 {
        match &self.chirp {
            Some(c) => c.omega0 + c.rate(t),
            None => self.omega,
        }
    }
}

/// Slowly varying description of a drive, as seen by the averaged equations.
///
/// The field is `F(t) = 2 Re[E(t) e^{iΦ(t)}]` with complex envelope
/// `E(t) = Ω₀(t) e^{iφ(t)}` varying slowly compared with the frame phase `Φ`.
pub trait SlowDrive: Sync {
    fn complex_envelope(&self, t: f64) -> C64;
    /// Frame frequency `ω(t) = dΦ/dt`.
    fn carrier(&self, t: f64) -> f64;
    /// Frame phase `Φ(t)`.
    fn frame_phase(&self, t: f64) -> f64;
}

/// Drive with chirp phases tabulated, for use inside integrators.
#[derive(Debug, Clone)]
pub struct PreparedDrive {
    source: DriveField,
    members: Vec<PreparedMember>,
    chirped: bool,
}

impl PreparedDrive {
    pub fn new(drive: &DriveField) -> Result<Self> {
        drive.validate()?;
        let members = drive
            .members()
            .iter()
            .map(|m| match m {
                DriveField::CwTone {
                    omega,
                    amplitude_half,
                    phase0,
                } => PreparedMember {
                    env: None,
                    cw_amplitude: *amplitude_half,
                    omega: *omega,
                    phase0: *phase0,
                    chirp: None,
                },
                DriveField::GaussianPulse { omega, phase0, .. } => PreparedMember {
                    env: m.envelope_shape(),
                    cw_amplitude: 0.0,
                    omega: *omega,
                    phase0: *phase0,
                    chirp: None,
                },
                DriveField::ChirpedGaussianPulse { omega0_ref, phase0, .. } => {
                    let env = m.envelope_shape().expect("pulse");
                    PreparedMember {
                        env: Some(env),
                        cw_amplitude: 0.0,
                        omega: *omega0_ref,
                        phase0: *phase0,
                        chirp: Some(ChirpTable::new(*omega0_ref, env)),
                    }
                }
                DriveField::PulseTrain { .. } => unreachable!("validated: no nested trains"),
            })
            .collect::<Vec<_>>();
        let chirped = members.iter().any(|m| m.chirp.is_some());
        Ok(Self {
            source: drive.clone(),
            members,
            chirped,
        })
    }

    pub fn source(&self) -> &DriveField {
        &self.source
    }

    #[inline]
    pub fn field(&self, t: f64) -> f64 {
        self.members
            .iter()
            .map(|m| 2.0 * m.envelope(t) * (m.phase(t) + m.phase0).cos())
            .sum()
    }

    pub fn envelope(&self, t: f64) -> f64 {
        self.members.iter().map(|m| m.envelope(t)).sum()
    }

    /// Instantaneous frequency of the dominant member.
    pub fn frequency(&self, t: f64) -> f64 {
        self.members
            .iter()
            .max_by(|a, b| a.envelope(t).total_cmp(&b.envelope(t)))
            .map_or(0.0, |m| m.frequency(t))
    }

    /// Checks that the train shares one carrier law so a single slow frame exists.
    pub fn check_common_carrier(&self) -> Result<()> {
        if self.chirped {
            if self.members.iter().all(|m| m.chirp.is_some()) {
                let w0 = self.members[0].omega;
                if self.members.iter().all(|m| m.omega == w0) {
                    return Ok(());
                }
            }
            return Err(Error::MixedCarrier);
        }
        let w = self.members[0].omega;
        if self.members.iter().all(|m| m.omega == w) {
            Ok(())
        } else {
            Err(Error::MixedCarrier)
        }
    }
}

impl SlowDrive for PreparedDrive {
    fn complex_envelope(&self, t: f64) -> C64 {
        let frame = self.frame_phase(t);
        self.members
            .iter()
            .map(|m| C64::from_polar(m.envelope(t), m.phase0 + m.phase(t) - frame))
            .sum()
    }

    fn carrier(&self, t: f64) -> f64 {
        if self.chirped {
            let w0 = self.members[0].omega;
            w0 + self
                .members
                .iter()
                .filter_map(|m| m.chirp.as_ref())
                .map(|c| c.rate(t))
                .sum::<f64>()
        } else {
            self.members[0].omega
        }
    }

    fn frame_phase(&self, t: f64) -> f64 {
        if self.chirped {
            let w0 = self.members[0].omega;
            w0 * t
                + self
                    .members
                    .iter()
                    .filter_map(|m| m.chirp.as_ref())
                    .map(|c| c.excess(t))
                    .sum::<f64>()
        } else {
            self.members[0].omega * t
        }
    }
}

/// Slow drive built from plain functions: envelope `Ω₀(t)`, constant
/// carrier phase `φ₀` and carrier `ω(t)`; the frame phase is integrated
/// with composite Simpson on a fixed grid.
pub struct FnDrive<E, W> {
    pub envelope: E,
    pub carrier: W,
    pub phase0: f64,
    frame: Vec<f64>,
    dt: f64,
}

impl<E, W> FnDrive<E, W>
where
    E: Fn(f64) -> f64 + Sync,
    W: Fn(f64) -> f64 + Sync,
{
    /// Tabulates the frame phase on `[0, t_end]` with node spacing `dt`.
    pub fn new(envelope: E, carrier: W, phase0: f64, t_end: f64, dt: f64) -> Self {
        let n = (t_end / dt).ceil() as usize + 1;
        let mut frame = Vec::with_capacity(n + 1);
        let mut acc = 0.0;
        frame.push(0.0);
        for k in 0..n {
            let a = k as f64 * dt;
            acc += simpson(&carrier, a, a + dt, dt / 2.0);
            frame.push(acc);
        }
        Self {
            envelope,
            carrier,
            phase0,
            frame,
            dt,
        }
    }
}

impl<E, W> SlowDrive for FnDrive<E, W>
where
    E: Fn(f64) -> f64 + Sync,
    W: Fn(f64) -> f64 + Sync,
{
    fn complex_envelope(&self, t: f64) -> C64 {
        C64::from_polar((self.envelope)(t), self.phase0)
    }

    fn carrier(&self, t: f64) -> f64 {
        (self.carrier)(t)
    }

    fn frame_phase(&self, t: f64) -> f64 {
        let x = (t / self.dt).max(0.0);
        let k = (x.floor() as usize).min(self.frame.len() - 2);
        let s = x - k as f64;
        let t0 = k as f64 * self.dt;
        hermite(
            self.frame[k],
            (self.carrier)(t0) * self.dt,
            self.frame[k + 1],
            (self.carrier)(t0 + self.dt) * self.dt,
            s,
        )
    }
}

/// Integration grid hint for building phase tables and quadratures.
pub fn default_quadrature_step(drive: &DriveField) -> f64 {
    drive.base_quadrature_step()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn gaussian(omega: f64, peak: f64, sigma0: f64, t_center: f64, phase0: f64) -> DriveField {
        DriveField::GaussianPulse {
            omega,
            peak_half: peak,
            sigma0,
            t_center,
            phase0,
        }
    }

    fn chirped(peak: f64, sigma0: f64) -> DriveField {
        DriveField::ChirpedGaussianPulse {
            omega0_ref: 1.0,
            peak_half: peak,
            sigma0,
            t_center: 5.0 * sigma0,
            phase0: 0.0,
        }
    }

    #[test]
    fn cw_field_at_origin() {
        assert_relative_eq!(DriveField::cw(1.0, 0.1).evaluate(0.0), 0.2, epsilon = 1e-15);
    }

    #[test]
    fn gaussian_at_quarter_phase_vanishes() {
        // ωt₀ + φ₀ = π/2 at the centre.
        let t0 = 4.0;
        let d = gaussian(1.0, 0.1, 1.0, t0, PI / 2.0 - t0);
        assert!(d.evaluate(t0).abs() < 1e-15);
    }

    #[test]
    fn chirped_field_at_centre_uses_accumulated_phase() {
        let d = chirped(0.4, 1.5666);
        let t0 = d.t_center().unwrap();
        let expect = 0.8 * d.accumulated_phase(t0).cos();
        assert_relative_eq!(d.evaluate(t0), expect, epsilon = 1e-14);
        assert_relative_eq!(d.envelope_amplitude(t0), 0.4, epsilon = 1e-15);
    }

    #[test]
    fn gaussian_envelope_values() {
        let d = gaussian(1.0, 0.5, 2.0, 10.0, 0.0);
        assert_relative_eq!(d.envelope_amplitude(10.0), 0.5);
        assert_relative_eq!(d.envelope_amplitude(12.0), 0.303_265_329_856_316_7, epsilon = 1e-15);
    }

    #[test]
    fn train_envelope_at_middle_centre_is_peak() {
        let pulses = (0..3)
            .map(|k| gaussian(1.0, 0.5, 1.0, 5.0 + 10.0 * k as f64, 0.0))
            .collect();
        let train = DriveField::PulseTrain { pulses };
        let v = train.envelope_amplitude(15.0);
        assert!((v - 0.5).abs() < 1e-20 + 0.5 * (-50.0_f64).exp() * 2.0);
    }

    #[test]
    fn chirp_law_values() {
        let d = chirped(0.4, 1.5666);
        let t0 = d.t_center().unwrap();
        assert_relative_eq!(
            d.instantaneous_frequency(t0),
            0.5 * (1.0 + 1.64_f64.sqrt()),
            epsilon = 1e-15
        );
        assert_relative_eq!(d.instantaneous_frequency(t0), 1.140_312_423_743, epsilon = 1e-12);
        // envelope ≈ 0 far away
        assert_relative_eq!(d.instantaneous_frequency(t0 + 100.0), 1.0, epsilon = 1e-15);
        // √(δω) with δ = 0.1, ω = 1.1 inverts to ω = 1.1.
        assert_relative_eq!(chirp_law(1.0, 0.331_662), 1.1, epsilon = 1e-6);
    }

    #[test]
    fn linear_phase_for_fixed_carrier() {
        assert_relative_eq!(DriveField::cw(1.1, 0.1).accumulated_phase(10.0), 11.0, epsilon = 1e-14);
    }

    #[test]
    fn chirped_phase_starts_at_zero_and_has_positive_excess() {
        let d = chirped(0.4, 1.5666);
        assert_eq!(d.accumulated_phase(0.0), 0.0);
        let far = 200.0;
        let excess = d.accumulated_phase(far) - far;
        assert!(excess > 0.0);
        // Brute-force midpoint oracle on a fine grid.
        let n = 400_000;
        let h = far / n as f64;
        let mut acc = 0.0;
        for k in 0..n {
            let s = (k as f64 + 0.5) * h;
            acc += d.instantaneous_frequency(s) - 1.0;
        }
        assert_relative_eq!(excess, acc * h, epsilon = 1e-9);
    }

    #[test]
    fn prepared_drive_matches_direct_evaluation() {
        let d = chirped(0.4, 1.5666);
        let p = PreparedDrive::new(&d).unwrap();
        for k in 0..300 {
            let t = k as f64 * 0.0571;
            let (a, b) = (p.frame_phase(t), d.accumulated_phase(t));
            assert!((p.field(t) - d.evaluate(t)).abs() < 1e-10, "t = {t}: {a} vs {b}");
            assert!((a - b).abs() < 1e-10, "t = {t}: {a} vs {b}");
        }
    }

    #[test]
    fn area_of_pi_pulse() {
        let peak = 0.4;
        let sigma0 = PI.sqrt() / (2.0 * 2.0_f64.sqrt() * peak);
        let d = gaussian(1.0, peak, sigma0, 5.0 * sigma0, 0.0);
        assert!(d.envelope_area(0.0).abs() < 1e-15);
        let a = d.envelope_area(5.0 * sigma0 + 40.0 * sigma0);
        assert!((a - PI).abs() < 1e-6, "{a}");
    }

    #[test]
    fn slow_envelope_carries_member_phases() {
        let d = DriveField::PulseTrain {
            pulses: vec![gaussian(1.1, 0.3, 1.0, 5.0, 0.25), gaussian(1.1, 0.3, 1.0, 20.0, -1.0)],
        };
        let p = PreparedDrive::new(&d).unwrap();
        let e = p.complex_envelope(20.0);
        assert_relative_eq!(e.arg(), -1.0, epsilon = 1e-12);
        for k in 0..200 {
            let t = 0.17 * k as f64;
            let rebuilt = 2.0 * (p.complex_envelope(t) * C64::from_polar(1.0, p.frame_phase(t))).re;
            assert!((rebuilt - d.evaluate(t)).abs() < 1e-13);
        }
    }

    #[test]
    fn validation_errors() {
        assert!(gaussian(1.0, 0.1, 0.0, 1.0, 0.0).validate().is_err());
        assert!(gaussian(1.0, -0.1, 1.0, 1.0, 0.0).validate().is_err());
        assert!(gaussian(1.0, 0.1, 1.0, 0.0, 0.0).validate().is_err());
        let unordered = DriveField::PulseTrain {
            pulses: vec![gaussian(1.0, 0.1, 1.0, 9.0, 0.0), gaussian(1.0, 0.1, 1.0, 3.0, 0.0)],
        };
        assert!(unordered.validate().is_err());
        let mixed = DriveField::PulseTrain {
            pulses: vec![gaussian(1.0, 0.1, 1.0, 3.0, 0.0), gaussian(1.2, 0.1, 1.0, 30.0, 0.0)],
        };
        assert!(mixed.validate().is_ok());
        assert_eq!(
            PreparedDrive::new(&mixed).unwrap().check_common_carrier(),
            Err(Error::MixedCarrier)
        );
    }

    #[test]
    fn json_schema_keys() {
        let d = DriveField::PulseTrain {
            pulses: vec![gaussian(1.1, 0.33, 1.9, 9.5, 0.0), chirped(0.4, 1.5)],
        };
        let s = serde_json::to_string(&d).unwrap();
        for key in [
            "\"kind\":\"train\"",
            "\"pulses\"",
            "\"peak_half\"",
            "\"sigma0\"",
            "\"t_center\"",
            "\"phase0\"",
            "\"omega0_ref\"",
        ] {
            assert!(s.contains(key), "{key} missing from {s}");
        }
        let back: DriveField = serde_json::from_str(&s).unwrap();
        assert_eq!(back, d);
        let cw: DriveField = serde_json::from_str(r#"{"kind":"cw","omega":1.0,"amplitude_half":0.1}"#).unwrap();
        assert_eq!(cw, DriveField::cw(1.0, 0.1));
    }
}
