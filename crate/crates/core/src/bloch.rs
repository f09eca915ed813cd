//! Bloch equations with two-rate relaxation.
//!
//! Full equations, integrated in the lab frame:
//! `Δ̇ = −γ₁(Δ − Δ₀) + 4 Im(σ) F(t)`, `σ̇ = −γ₂σ + iω₀σ − iΔF(t)`.
//!
//! In the slow frame `σ = e^{iΦ(t)} σ̃` with complex envelope `E(t)` the
//! averaged equations read
//! `Δ̇ = −γ₁(Δ − Δ₀) − 2i(E*σ̃ − Eσ̃*)`, `σ̃̇ = −γ₂σ̃ − iδ σ̃ − iEΔ`,
//! with `δ = ω(t) − ω₀` at first order and `δ − |E|²/ω` at second order.
//!
//! States are stored as `[Δ, Re σ, Im σ]`.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::drive::{DriveField, PreparedDrive, SlowDrive};
use crate::error::{invalid, Error, Result};
use crate::integrate::{integrate, IntegratorConfig, Trajectory};
use crate::params::TlsParams;
use crate::state::{BlochState, Frame};

const I: C64 = C64 { re: 0.0, im: 1.0 };

fn check_state(s0: &BlochState) -> Result<()> {
    if !s0.is_physical(1e-9) {
        return Err(invalid(
            "initial_state",
            format!("4|σ|² + Δ² = {} exceeds 1", s0.purity_radius_sqr()),
        ));
    }
    Ok(())
}

/// Full Bloch equations. `s0.sigma` is the lab-frame coherence.
pub fn simulate_bloch_full(
    p: &TlsParams,
    d: &DriveField,
    s0: BlochState,
    span: (f64, f64),
    cfg: &IntegratorConfig,
) -> Result<Trajectory<[f64; 3]>> {
    p.validate()?;
    check_state(&s0)?;
    let drive = PreparedDrive::new(d)?;
    let (g1, g2, d0, w0) = (p.gamma1, p.gamma2, p.delta0, p.omega0);
    let rhs = |t: f64, y: &[f64; 3]| {
        let f = drive.field(t);
        let (dp, sr, si) = (y[0], y[1], y[2]);
        [
            -g1 * (dp - d0) + 4.0 * si * f,
            -g2 * sr - w0 * si,
            -g2 * si + w0 * sr - dp * f,
        ]
    };
    let mut tr = integrate(rhs, s0.to_array(), span, cfg)?;
    tr.meta.frame = Some(Frame::Lab);
    tr.meta.drive = Some(d.clone());
    Ok(tr)
}

fn simulate_averaged(
    p: &TlsParams,
    drive: &dyn SlowDrive,
    s0: BlochState,
    span: (f64, f64),
    cfg: &IntegratorConfig,
    second_order: bool,
) -> Result<Trajectory<[f64; 3]>> {
    p.validate()?;
    check_state(&s0)?;
    let (g1, g2, d0, w0) = (p.gamma1, p.gamma2, p.delta0, p.omega0);
    let rhs = |t: f64, y: &[f64; 3]| {
        let e = drive.complex_envelope(t);
        let w = drive.carrier(t);
        let mut detuning = w - w0;
        if second_order {
            detuning -= e.norm_sqr() / w;
        }
        let dp = y[0];
        let s = C64::new(y[1], y[2]);
        // −2i(E*σ̃ − Eσ̃*) = 4 Im(E*σ̃)
        let ddp = -g1 * (dp - d0) + 4.0 * (e.conj() * s).im;
        let ds = -s * g2 - I * s * detuning - I * e * dp;
        [ddp, ds.re, ds.im]
    };
    let mut tr = integrate(rhs, s0.to_array(), span, cfg)?;
    tr.meta.frame = Some(if second_order { Frame::Averaged } else { Frame::Rotating });
    Ok(tr)
}

/// First-order averaged (RWA) Bloch equations in the slow frame.
pub fn simulate_bloch_rwa(
    p: &TlsParams,
    drive: &dyn SlowDrive,
    s0: BlochState,
    span: (f64, f64),
    cfg: &IntegratorConfig,
) -> Result<Trajectory<[f64; 3]>> {
    simulate_averaged(p, drive, s0, span, cfg, false)
}

/// Second-order averaged Bloch equations with the shifted detuning.
pub fn simulate_bloch_avg2(
    p: &TlsParams,
    drive: &dyn SlowDrive,
    s0: BlochState,
    span: (f64, f64),
    cfg: &IntegratorConfig,
) -> Result<Trajectory<[f64; 3]>> {
    simulate_averaged(p, drive, s0, span, cfg, true)
}

/// Second-order effective detuning `ω − ω₀ − Ω₀²/ω`.
pub fn effective_detuning(omega0: f64, omega: f64, envelope: f64) -> f64 {
    omega - omega0 - envelope * envelope / omega
}

/// Stationary point of the RWA Bloch equations for a constant drive.
pub fn bloch_rwa_fixed_point(
    omega0_half: f64,
    delta: f64,
    gamma1: f64,
    gamma2: f64,
    delta0: f64,
    phi0: f64,
) -> Result<(f64, C64)> {
    if gamma1 <= 0.0 || gamma2 <= 0.0 {
        return Err(Error::ZeroDissipation { gamma1, gamma2 });
    }
    let w2 = omega0_half * omega0_half;
    let dp = delta0 / (1.0 + 4.0 * w2 * gamma2 / (gamma1 * (gamma2 * gamma2 + delta * delta)));
    let sigma = -I * omega0_half * delta0 * C64::new(gamma2, -delta) * C64::from_polar(1.0, phi0)
        / (gamma2 * gamma2 + delta * delta + 4.0 * w2 * gamma2 / gamma1);
    Ok((dp, sigma))
}

/// Jacobian of the RWA Bloch equations in `(Δ, Re σ̃, Im σ̃)`; the system is
/// linear so this holds everywhere.
pub fn rwa_jacobian(omega0_half: f64, delta: f64, gamma1: f64, gamma2: f64, phi0: f64) -> [[f64; 3]; 3] {
    let (s, c) = phi0.sin_cos();
    let (er, ei) = (omega0_half * c, omega0_half * s);
    // 4 Im(E*σ̃) = 4(er·Im σ̃ − ei·Re σ̃); −iEΔ = (ei Δ, −er Δ).
    [
        [-gamma1, -4.0 * ei, 4.0 * er],
        [ei, -gamma2, delta],
        [-er, -delta, -gamma2],
    ]
}

/// Routh–Hurwitz test on the characteristic polynomial of a 3×3 matrix.
pub fn is_hurwitz_stable(j: &[[f64; 3]; 3]) -> bool {
    let tr = j[0][0] + j[1][1] + j[2][2];
    let minors = j[0][0] * j[1][1] - j[0][1] * j[1][0] + j[0][0] * j[2][2] - j[0][2] * j[2][0] + j[1][1] * j[2][2]
        - j[1][2] * j[2][1];
    let det = j[0][0] * (j[1][1] * j[2][2] - j[1][2] * j[2][1]) - j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0])
        + j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0]);
    // λ³ + a2 λ² + a1 λ + a0
    let (a2, a1, a0) = (-tr, minors, -det);
    a2 > 0.0 && a0 > 0.0 && a2 * a1 > a0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Reconstructed {
    pub delta_pop: f64,
    pub sigma_slow: C64,
    pub sigma_lab: C64,
    pub n1: f64,
    pub n2: f64,
}

/// Undoes the near-identity transform of second-order averaging:
/// `Δ = Δ_y − (2/ω) Re(E σ̃ e^{2iΦ})`, `σ̃ = σ̃_y + (Δ_y/2ω) E* e^{−2iΦ}`,
/// then `σ = e^{iΦ} σ̃`.
pub fn reconstruct_sigma(y: &BlochState, envelope: C64, omega: f64, phi: f64) -> Reconstructed {
    let r = C64::from_polar(1.0, 2.0 * phi);
    let delta_pop = y.delta_pop - (2.0 / omega) * (envelope * y.sigma * r).re;
    let sigma_slow = y.sigma + envelope.conj() * r.conj() * (y.delta_pop / (2.0 * omega));
    Reconstructed {
        delta_pop,
        sigma_slow,
        sigma_lab: sigma_slow * C64::from_polar(1.0, phi),
        n1: 0.5 * (1.0 + delta_pop),
        n2: 0.5 * (1.0 - delta_pop),
    }
}

/// Averaged-frame state whose reconstruction at `t` is `s`, found by
/// fixed-point iteration. Identity where the envelope vanishes.
pub fn averaged_initial_state(s: &BlochState, drive: &dyn SlowDrive, t: f64) -> BlochState {
    let (e, w, phi) = (drive.complex_envelope(t), drive.carrier(t), drive.frame_phase(t));
    let mut y = *s;
    for _ in 0..50 {
        let r = reconstruct_sigma(&y, e, w, phi);
        let step = (s.delta_pop - r.delta_pop, s.sigma - r.sigma_slow);
        y = BlochState::new(y.delta_pop + step.0, y.sigma + step.1);
        if step.0.abs() + step.1.norm() < 1e-15 {
            break;
        }
    }
    y
}

/// Reconstructed lab-frame values along an averaged trajectory.
pub fn reconstruct_trajectory(traj: &Trajectory<[f64; 3]>, drive: &dyn SlowDrive) -> Vec<Reconstructed> {
    traj.times
        .iter()
        .zip(&traj.states)
        .map(|(&t, y)| {
            reconstruct_sigma(
                &BlochState::from_slice(y),
                drive.complex_envelope(t),
                drive.carrier(t),
                drive.frame_phase(t),
            )
        })
        .collect()
}

/// Slow-frame view `σ̃ = e^{−iΦ} σ` of a full-equation trajectory.
pub fn slow_frame_states(traj: &Trajectory<[f64; 3]>, drive: &dyn SlowDrive) -> Vec<BlochState> {
    traj.times
        .iter()
        .zip(&traj.states)
        .map(|(&t, y)| {
            let s = BlochState::from_slice(y);
            BlochState::new(s.delta_pop, s.sigma * C64::from_polar(1.0, -drive.frame_phase(t)))
        })
        .collect()
}
