//! π-pulse design: resonant, chirped and shaped-amplitude Gaussian pulses,
//! trains of them, and envelope-area checks.

use std::f64::consts::PI;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::drive::{CarrierPhase, DriveField};
use crate::error::{invalid, Error, Result};

/// Pulse centres sit this many σ₀ after `t = 0`.
pub const CENTER_OFFSET_SIGMAS: f64 = 5.0;
/// Default centre-to-centre train spacing in σ₀.
pub const DEFAULT_SPACING_SIGMAS: f64 = 10.0;
/// Minimum train spacing in σ₀.
pub const MIN_SPACING_SIGMAS: f64 = 6.0;
/// Advisory upper bound on `δ/ω` for the shaped-amplitude design.
pub const SHAPED_DETUNING_LIMIT: f64 = 0.25;

/// `σ₀ = √π / (2√2 Ω₀)`, which gives an envelope area of exactly π.
pub fn pi_pulse_width(omega0_half: f64) -> Result<f64> {
    if !(omega0_half > 0.0 && omega0_half.is_finite()) {
        return Err(Error::NonPositiveAmplitude(omega0_half));
    }
    Ok(PI.sqrt() / (2.0 * 2.0_f64.sqrt() * omega0_half))
}

fn guard_slow_variation(sigma0: f64, omega0: f64) {
    let period = 2.0 * PI / omega0;
    if sigma0 < period {
        warn!(
            "pulse width σ₀ = {sigma0:.4} is shorter than one carrier period {period:.4}; averaging may be inaccurate"
        );
    }
}

/// Gaussian π-pulse with a fixed carrier `omega`.
pub fn make_gaussian_pi_pulse(omega0_half: f64, omega: f64, phase0: f64) -> Result<DriveField> {
    let sigma0 = pi_pulse_width(omega0_half)?;
    guard_slow_variation(sigma0, omega);
    Ok(DriveField::GaussianPulse {
        omega,
        peak_half: omega0_half,
        sigma0,
        t_center: CENTER_OFFSET_SIGMAS * sigma0,
        phase0,
    })
}

/// π-pulse whose carrier follows the chirp law referenced to `omega0`.
pub fn make_chirped_pi_pulse(omega0_half: f64, omega0: f64, phase0: f64) -> Result<DriveField> {
    let sigma0 = pi_pulse_width(omega0_half)?;
    if !(omega0 > 0.0) {
        return Err(invalid("omega0", format!("must be > 0, got {omega0}")));
    }
    guard_slow_variation(sigma0, omega0);
    Ok(DriveField::ChirpedGaussianPulse {
        omega0_ref: omega0,
        peak_half: omega0_half,
        sigma0,
        t_center: CENTER_OFFSET_SIGMAS * sigma0,
        phase0,
    })
}

/// Peak amplitude `Ω₀ = √(δω)` that cancels the shifted detuning at the
/// pulse peak for a blue-shifted carrier.
pub fn shaped_amplitude(delta: f64, omega: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::RedShiftedDetuning(delta));
    }
    if !(omega > 0.0) {
        return Err(invalid("omega", format!("must be > 0, got {omega}")));
    }
    if delta / omega >= SHAPED_DETUNING_LIMIT {
        warn!(
            "δ/ω = {:.3} is not small; the shaped design assumes δ = O(ε²)",
            delta / omega
        );
    }
    Ok((delta * omega).sqrt())
}

/// Shaped-amplitude π-pulse: carrier `omega = ω₀ + δ`, peak `√(δω)`.
pub fn make_shaped_pi_pulse(delta: f64, omega0: f64, phase0: f64) -> Result<DriveField> {
    let omega = omega0 + delta;
    make_gaussian_pi_pulse(shaped_amplitude(delta, omega)?, omega, phase0)
}

/// Train with one continuous carrier across all pulses.
pub fn make_pulse_train(pulse: &DriveField, n: usize, spacing: f64) -> Result<DriveField> {
    make_pulse_train_with(pulse, n, spacing, CarrierPhase::Continuous)
}

/// Train of `n` copies of `pulse` with centres `t₀ + k·spacing`.
///
/// With [`CarrierPhase::PerPulse`] each copy's phase offset is lowered by
/// the carrier phase accumulated up to its own centre.
pub fn make_pulse_train_with(pulse: &DriveField, n: usize, spacing: f64, carrier: CarrierPhase) -> Result<DriveField> {
    if n == 0 {
        return Err(invalid("n", "a train needs at least one pulse"));
    }
    let env = pulse
        .envelope_shape()
        .ok_or_else(|| invalid("pulse", "train members must be single Gaussian pulses"))?;
    let min = MIN_SPACING_SIGMAS * env.sigma0;
    if n > 1 && !(spacing > min) {
        return Err(Error::OverlappingPulses { spacing, min });
    }
    let pulses = (0..n)
        .map(|k| {
            let mut p = pulse.clone();
            let center = env.t_center + k as f64 * spacing;
            match &mut p {
                DriveField::GaussianPulse { t_center, .. } | DriveField::ChirpedGaussianPulse { t_center, .. } => {
                    *t_center = center
                }
                _ => unreachable!("checked above"),
            }
            if carrier == CarrierPhase::PerPulse {
                let shift = -p.accumulated_phase(center);
                p = p.with_phase_shift(shift);
            }
            p
        })
        .collect();
    let train = DriveField::PulseTrain { pulses };
    train.validate()?;
    Ok(train)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AreaReport {
    /// Area of each pulse envelope over the whole record.
    pub per_pulse: Vec<f64>,
    /// Cumulative area of the whole drive after each pulse, taken midway to
    /// the next centre (or 12σ₀ past the last one).
    pub cumulative_after: Vec<f64>,
    /// `(t, A(t))` samples.
    pub curve: Vec<(f64, f64)>,
}

/// Integrates `2Ω₀(s)` for each pulse and along the whole drive.
pub fn verify_pulse_area(d: &DriveField, curve_points: usize) -> AreaReport {
    let members: Vec<_> = d.members().iter().filter_map(|m| m.envelope_shape()).collect();
    let per_pulse = members
        .iter()
        .map(|e| {
            let single = DriveField::GaussianPulse {
                omega: 1.0,
                peak_half: e.peak_half,
                sigma0: e.sigma0,
                t_center: e.t_center,
                phase0: 0.0,
            };
            single.envelope_area(e.t_center + 12.0 * e.sigma0)
        })
        .collect();
    let end = d.natural_end().unwrap_or(1.0);
    let cumulative_after = members
        .iter()
        .enumerate()
        .map(|(k, e)| {
            let t = members
                .get(k + 1)
                .map_or(e.t_center + 12.0 * e.sigma0, |next| 0.5 * (e.t_center + next.t_center));
            d.envelope_area(t)
        })
        .collect();
    let n = curve_points.max(2);
    let mut curve = Vec::with_capacity(n);
    let mut acc = 0.0;
    let mut prev = 0.0;
    let step = members.iter().map(|e| e.sigma0 / 16.0).fold(0.25, f64::min);
    let windows: Vec<_> = members
        .iter()
        .map(|e| (e.t_center - 6.0 * e.sigma0, e.t_center + 6.0 * e.sigma0))
        .collect();
    for k in 0..n {
        let t = end * k as f64 / (n - 1) as f64;
        acc += crate::drive::piecewise_simpson(|s| 2.0 * d.envelope_amplitude(s), prev, t, step, &windows);
        curve.push((t, acc));
        prev = t;
    }
    AreaReport {
        per_pulse,
        cumulative_after,
        curve,
    }
}
