//! Unitary propagation of the driven two-level system.
//!
//! Frames, with `E₁ = −ω₀/2`, `E₂ = +ω₀/2` and `δ = ω − ω₀`:
//! - lab: `iĊ₁ = E₁C₁ + F C₂`, `iĊ₂ = E₂C₂ + F C₁`;
//! - interaction, `c_j = e^{iE_j t} C_j`: `iċ₁ = F e^{−iω₀t} c₂`, `iċ₂ = F e^{iω₀t} c₁`;
//! - rotating, `c₁ = e^{iδt/2} b₁`, `c₂ = e^{−iδt/2} b₂`, for a fixed carrier ω:
//!   `iḃ₁ = δ/2 b₁ + (E + E* e^{−2iωt}) b₂`, `iḃ₂ = −δ/2 b₂ + (E* + E e^{2iωt}) b₁`,
//!   where `E = Ω₀(t) e^{iφ₀}`. Dropping the `e^{±2iωt}` terms gives the RWA.

use num_complex::Complex64 as C64;

use crate::drive::{DriveField, PreparedDrive, SlowDrive};
use crate::error::{invalid, Error, Result};
use crate::integrate::{integrate, IntegratorConfig, Trajectory};
use crate::params::TlsParams;
use crate::state::{AmplitudePair, Frame};

const I: C64 = C64 { re: 0.0, im: 1.0 };

fn check_input(p: &TlsParams, psi0: &AmplitudePair, frame: Frame) -> Result<()> {
    p.validate()?;
    if psi0.frame != frame {
        return Err(Error::UnsupportedTransform {
            from: psi0.frame.name(),
            to: frame.name(),
        });
    }
    let n = psi0.norm_sqr();
    if (n - 1.0).abs() > 1e-9 {
        return Err(invalid("initial_state", format!("must be normalized, |psi|^2 = {n}")));
    }
    Ok(())
}

fn tag(mut tr: Trajectory<[C64; 2]>, frame: Frame, d: &DriveField) -> Trajectory<[C64; 2]> {
    tr.meta.frame = Some(frame);
    tr.meta.drive = Some(d.clone());
    tr
}

pub fn propagate_lab(
    p: &TlsParams,
    d: &DriveField,
    psi0: AmplitudePair,
    span: (f64, f64),
    cfg: &IntegratorConfig,
) -> Result<Trajectory<[C64; 2]>> {
    check_input(p, &psi0, Frame::Lab)?;
    let drive = PreparedDrive::new(d)?;
    let (e1, e2) = p.energies();
    let rhs = |t: f64, y: &[C64; 2]| {
        let f = drive.field(t);
        [-I * (y[0] * e1 + y[1] * f), -I * (y[1] * e2 + y[0] * f)]
    };
    Ok(tag(integrate(rhs, psi0.as_array(), span, cfg)?, Frame::Lab, d))
}

pub fn propagate_interaction(
    p: &TlsParams,
    d: &DriveField,
    c0: AmplitudePair,
    span: (f64, f64),
    cfg: &IntegratorConfig,
) -> Result<Trajectory<[C64; 2]>> {
    check_input(p, &c0, Frame::Interaction)?;
    let drive = PreparedDrive::new(d)?;
    let w0 = p.omega0;
    let rhs = |t: f64, y: &[C64; 2]| {
        let f = drive.field(t);
        let rot = C64::from_polar(1.0, w0 * t);
        [-I * f * rot.conj() * y[1], -I * f * rot * y[0]]
    };
    Ok(tag(integrate(rhs, c0.as_array(), span, cfg)?, Frame::Interaction, d))
}

/// Rotating-frame propagation. With `rwa = true` the counter-rotating
/// `e^{±2iωt}` terms are dropped.
pub fn propagate_rotating(
    p: &TlsParams,
    d: &DriveField,
    b0: AmplitudePair,
    span: (f64, f64),
    cfg: &IntegratorConfig,
    rwa: bool,
) -> Result<Trajectory<[C64; 2]>> {
    check_input(p, &b0, Frame::Rotating)?;
    let omega = d.fixed_carrier().ok_or(Error::ChirpNotSupported)?;
    let drive = PreparedDrive::new(d)?;
    let half_delta = 0.5 * (omega - p.omega0);
    let rhs = |t: f64, y: &[C64; 2]| {
        let e = drive.complex_envelope(t);
        let (up, down) = if rwa {
            (e, e.conj())
        } else {
            let r = C64::from_polar(1.0, 2.0 * omega * t);
            (e + e.conj() * r.conj(), e.conj() + e * r)
        };
        [
            -I * (y[0] * half_delta + up * y[1]),
            -I * (-y[1] * half_delta + down * y[0]),
        ]
    };
    Ok(tag(integrate(rhs, b0.as_array(), span, cfg)?, Frame::Rotating, d))
}

/// Exact phase maps between the lab, interaction and rotating frames.
pub fn transform(a: AmplitudePair, to: Frame, p: &TlsParams, d: &DriveField, t: f64) -> Result<AmplitudePair> {
    fn rank(f: Frame) -> Option<i32> {
        match f {
            Frame::Lab => Some(0),
            Frame::Interaction => Some(1),
            Frame::Rotating => Some(2),
            Frame::Averaged => None,
        }
    }
    let unsupported = || Error::UnsupportedTransform {
        from: a.frame.name(),
        to: to.name(),
    };
    let (from_rank, to_rank) = (
        rank(a.frame).ok_or_else(unsupported)?,
        rank(to).ok_or_else(unsupported)?,
    );
    let (e1, e2) = p.energies();
    // Phase of each amplitude relative to the lab frame: x_j = e^{iθ_j} C_j.
    let phases = |r: i32| -> Result<(f64, f64)> {
        match r {
            0 => Ok((0.0, 0.0)),
            1 => Ok((e1 * t, e2 * t)),
            _ => {
                let omega = d.fixed_carrier().ok_or(Error::ChirpNotSupported)?;
                let hd = 0.5 * (omega - p.omega0) * t;
                Ok((e1 * t - hd, e2 * t + hd))
            }
        }
    };
    let (f1, f2) = phases(from_rank)?;
    let (g1, g2) = phases(to_rank)?;
    Ok(AmplitudePair::new(
        a.a1 * C64::from_polar(1.0, g1 - f1),
        a.a2 * C64::from_polar(1.0, g2 - f2),
        to,
    ))
}

pub fn populations(a: &AmplitudePair) -> (f64, f64) {
    a.populations()
}

/// Ground-state population `|a₁|²` at every recorded point.
pub fn ground_population(traj: &Trajectory<[C64; 2]>) -> Vec<f64> {
    traj.states.iter().map(|s| s[0].norm_sqr()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn gaussian(omega: f64) -> DriveField {
        DriveField::GaussianPulse {
            omega,
            peak_half: 0.3,
            sigma0: 2.0,
            t_center: 10.0,
            phase0: 0.4,
        }
    }

    #[test]
    fn lab_and_interaction_populations_agree() {
        let p = TlsParams::default();
        let d = gaussian(1.05);
        let cfg = IntegratorConfig::default().with_stride(64);
        let lab = propagate_lab(&p, &d, AmplitudePair::ground(Frame::Lab), (0.0, 20.0), &cfg).unwrap();
        let int = propagate_interaction(&p, &d, AmplitudePair::ground(Frame::Interaction), (0.0, 20.0), &cfg).unwrap();
        for (a, b) in lab.states.iter().zip(&int.states) {
            assert!((a[0].norm_sqr() - b[0].norm_sqr()).abs() < 1e-10);
        }
        let moved = transform(
            AmplitudePair::from_array(*lab.last(), Frame::Lab),
            Frame::Interaction,
            &p,
            &d,
            lab.t_end(),
        )
        .unwrap();
        assert!((moved.a1 - int.last()[0]).norm() < 1e-9);
        assert!((moved.a2 - int.last()[1]).norm() < 1e-9);
    }

    #[test]
    fn rotating_exact_matches_interaction() {
        let p = TlsParams::default();
        let d = gaussian(1.1);
        let cfg = IntegratorConfig::default().with_stride(128);
        let rot = propagate_rotating(&p, &d, AmplitudePair::ground(Frame::Rotating), (0.0, 20.0), &cfg, false).unwrap();
        let int = propagate_interaction(&p, &d, AmplitudePair::ground(Frame::Interaction), (0.0, 20.0), &cfg).unwrap();
        let back = transform(
            AmplitudePair::from_array(*rot.last(), Frame::Rotating),
            Frame::Interaction,
            &p,
            &d,
            rot.t_end(),
        )
        .unwrap();
        assert!((back.a1 - int.last()[0]).norm() < 1e-9);
        assert!((back.a2 - int.last()[1]).norm() < 1e-9);
    }

    #[test]
    fn chirped_drive_rejected_in_rotating_frame() {
        let d = DriveField::ChirpedGaussianPulse {
            omega0_ref: 1.0,
            peak_half: 0.4,
            sigma0: 1.5,
            t_center: 7.5,
            phase0: 0.0,
        };
        let p = TlsParams::default();
        let r = propagate_rotating(
            &p,
            &d,
            AmplitudePair::ground(Frame::Rotating),
            (0.0, 1.0),
            &IntegratorConfig::default(),
            true,
        );
        assert_eq!(r.unwrap_err(), Error::ChirpNotSupported);
        let t = transform(AmplitudePair::ground(Frame::Lab), Frame::Rotating, &p, &d, 1.0);
        assert_eq!(t.unwrap_err(), Error::ChirpNotSupported);
    }

    #[test]
    fn wrong_frame_or_norm_rejected() {
        let p = TlsParams::default();
        let d = DriveField::cw(1.0, 0.1);
        let cfg = IntegratorConfig::default();
        assert!(propagate_lab(&p, &d, AmplitudePair::ground(Frame::Rotating), (0.0, 1.0), &cfg).is_err());
        let bad = AmplitudePair::new(C64::new(1.0, 0.0), C64::new(1.0, 0.0), Frame::Lab);
        assert!(propagate_lab(&p, &d, bad, (0.0, 1.0), &cfg).is_err());
    }

    proptest! {
        #[test]
        fn frame_round_trip_is_identity(t in 0.0f64..500.0, th in 0.0f64..6.3, w in 0.5f64..1.5) {
            let p = TlsParams::default();
            let d = DriveField::cw(w, 0.1);
            let a = AmplitudePair::normalized(C64::new(th.cos(), 0.2), C64::from_polar(th.sin(), 1.0), Frame::Lab);
            let mut x = a;
            for f in [Frame::Interaction, Frame::Rotating, Frame::Interaction, Frame::Lab] {
                x = transform(x, f, &p, &d, t).unwrap();
            }
            prop_assert!((x.a1 - a.a1).norm() < 1e-12);
            prop_assert!((x.a2 - a.a2).norm() < 1e-12);
            let r = transform(a, Frame::Rotating, &p, &d, t).unwrap();
            prop_assert!((r.norm_sqr() - a.norm_sqr()).abs() < 1e-14);
        }
    }
}
