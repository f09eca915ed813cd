//! Closed-form approximations: the RWA solution, the naive first-order
//! correction and the second-order averaging solution.
//!
//! All rotating-frame quantities use `δ = ω − ω₀` and the Hamiltonian
//! `H = [[δ/2, Ω₀], [Ω₀, −δ/2]]` (RWA) or `H̃` with `δ` replaced by the
//! shifted detuning `δ̃ = δ − Ω₀²/ω` (second order).

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::{AmplitudePair, Frame};

const I: C64 = C64 { re: 0.0, im: 1.0 };
const DENOMINATOR_FLOOR: f64 = 1e-12;

/// `cos(Ωt) b₀ − i sin(Ωt)/Ω · H b₀` for `H = [[d/2, w], [w, −d/2]]`.
fn two_level_flop(d: f64, w: f64, rabi: f64, b0: [C64; 2], t: f64) -> [C64; 2] {
    let hb = [b0[0] * (0.5 * d) + b0[1] * w, b0[0] * w - b0[1] * (0.5 * d)];
    let (s, c) = (rabi * t).sin_cos();
    // sin(Ωt)/Ω → t as Ω → 0.
    let sinc = if rabi == 0.0 { t } else { s / rabi };
    [b0[0] * c - I * hb[0] * sinc, b0[1] * c - I * hb[1] * sinc]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rwa1Solution {
    pub omega_half_rabi: f64,
    pub delta: f64,
    pub omega0_half: f64,
}

impl Rwa1Solution {
    pub fn new(omega0_half: f64, delta: f64) -> Self {
        Self {
            omega_half_rabi: (omega0_half * omega0_half + 0.25 * delta * delta).sqrt(),
            delta,
            omega0_half,
        }
    }

    /// Rotating-frame amplitudes at `t`, starting from `b0`.
    pub fn evolve(&self, b0: &AmplitudePair, t: f64) -> AmplitudePair {
        let b = two_level_flop(self.delta, self.omega0_half, self.omega_half_rabi, b0.as_array(), t);
        AmplitudePair::from_array(b, Frame::Rotating)
    }

    pub fn at(&self, t: f64) -> AmplitudePair {
        self.evolve(&AmplitudePair::ground(Frame::Rotating), t)
    }

    /// As [`Self::evolve`] for a drive with carrier phase `phi0`; the phase
    /// only rotates `b₂`.
    pub fn evolve_phased(&self, b0: &AmplitudePair, t: f64, phi0: f64) -> AmplitudePair {
        let turn = C64::from_polar(1.0, phi0);
        let hat = AmplitudePair::new(b0.a1, b0.a2 * turn, Frame::Rotating);
        let b = self.evolve(&hat, t);
        AmplitudePair::new(b.a1, b.a2 * turn.conj(), Frame::Rotating)
    }

    pub fn populations(&self, t: f64) -> (f64, f64) {
        let w = self.omega_half_rabi;
        if w == 0.0 {
            return (1.0, 0.0);
        }
        let s2 = (w * t).sin().powi(2);
        let n2 = (self.omega0_half / w).powi(2) * s2;
        (1.0 - n2, n2)
    }
}

pub fn rwa_solution(omega0_half: f64, delta: f64, t: f64) -> AmplitudePair {
    Rwa1Solution::new(omega0_half, delta).at(t)
}

pub fn rwa_populations(omega0_half: f64, delta: f64, t: f64) -> (f64, f64) {
    Rwa1Solution::new(omega0_half, delta).populations(t)
}

/// Interaction-frame `c₁(t)` from substituting the RWA solution back into
/// the exact equations once.
pub fn naive_perturbation_c1(omega0_half: f64, omega: f64, omega0: f64, t: f64) -> Result<C64> {
    let delta = omega - omega0;
    let w = (omega0_half * omega0_half + 0.25 * delta * delta).sqrt();
    let dens = [
        ("2Ω+δ", 2.0 * w + delta),
        ("2Ω+4ω−δ", 2.0 * w + 4.0 * omega - delta),
        ("2Ω−4ω+δ", 2.0 * w - 4.0 * omega + delta),
        ("2Ω−δ", 2.0 * w - delta),
    ];
    if omega0_half == 0.0 {
        return Ok(C64::new(1.0, 0.0));
    }
    for (which, value) in dens {
        if value.abs() < DENOMINATOR_FLOOR {
            return Err(Error::ResonantDenominator { which, value });
        }
    }
    let e = |x: f64| C64::from_polar(1.0, x * t);
    let one = C64::new(1.0, 0.0);
    let i1 = -(e(w + 0.5 * delta) - one) / dens[0].1 - (e(-(w + 2.0 * omega - 0.5 * delta)) - one) / dens[1].1;
    let i2 = (one - e(w - 2.0 * omega + 0.5 * delta)) / dens[2].1 - (e(-(w - 0.5 * delta)) - one) / dens[3].1;
    Ok(one - (omega0_half * omega0_half / w) * (i1 + i2))
}

/// `δ̃ = δ − Ω₀²/ω`.
pub fn bloch_siegert_detuning(omega0_half: f64, omega: f64, delta: f64) -> f64 {
    delta - omega0_half * omega0_half / omega
}

/// Carrier at which the shifted detuning vanishes: `(ω₀ + √(ω₀² + 4Ω₀²))/2`.
pub fn resonance_frequency(omega0_half: f64, omega0: f64) -> f64 {
    crate::drive::chirp_law(omega0, omega0_half)
}

/// Second-order averaged solution `z(t) = A cos Ω̃t + B sin Ω̃t`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Avg2Solution {
    pub omega0_half: f64,
    pub omega: f64,
    pub delta_tilde: f64,
    pub omega_tilde: f64,
    /// Carrier phase `φ₀`; `a`, `b` and [`Self::at`] refer to `(z₁, e^{iφ₀} z₂)`.
    pub phase0: f64,
    pub a: [C64; 2],
    pub b: [C64; 2],
}

impl Avg2Solution {
    /// `ε = Ω₀/(2ω)`.
    pub fn epsilon(&self) -> f64 {
        self.omega0_half / (2.0 * self.omega)
    }

    pub fn at(&self, t: f64) -> AmplitudePair {
        let (s, c) = (self.omega_tilde * t).sin_cos();
        let z = if self.omega_tilde == 0.0 {
            self.a
        } else {
            [self.a[0] * c + self.b[0] * s, self.a[1] * c + self.b[1] * s]
        };
        AmplitudePair::from_array(z, Frame::Averaged)
    }

    /// Rotating-frame amplitudes `b = z + εW(z, t)`.
    pub fn reconstructed(&self, t: f64) -> AmplitudePair {
        if self.phase0 == 0.0 {
            return reconstruct_b(&self.at(t), t, self.omega0_half, self.omega);
        }
        let b = reconstruct_b(&self.at(t), t + self.phase0 / self.omega, self.omega0_half, self.omega);
        AmplitudePair::new(b.a1, b.a2 * C64::from_polar(1.0, -self.phase0), Frame::Rotating)
    }
}

/// Coefficients for the averaged solution matching the rotating-frame
/// initial state `b0` through the inverse of `b = z + εW(z, 0)`.
pub fn avg2_initial(omega0_half: f64, omega: f64, delta: f64, b0: &AmplitudePair) -> Avg2Solution {
    avg2_initial_phased(omega0_half, omega, delta, 0.0, b0)
}

/// As [`avg2_initial`] for a drive `2Ω₀ cos(ωt + φ₀)`.
pub fn avg2_initial_phased(omega0_half: f64, omega: f64, delta: f64, phase0: f64, b0: &AmplitudePair) -> Avg2Solution {
    let eps = omega0_half / (2.0 * omega);
    let det = 1.0 + eps * eps;
    // In (b₁, e^{iφ₀} b₂) the problem is the φ₀ = 0 one with the fast phase
    // advanced by φ₀/ω, so W(z, 0) carries e^{∓2iφ₀}.
    let b2 = b0.a2 * C64::from_polar(1.0, phase0);
    let r = C64::from_polar(eps, 2.0 * phase0);
    let z0 = [(b0.a1 - r.conj() * b2) / det, (b2 + r * b0.a1) / det];
    let dt = bloch_siegert_detuning(omega0_half, omega, delta);
    let wt = (omega0_half * omega0_half + 0.25 * dt * dt).sqrt();
    let b = if wt == 0.0 {
        [C64::new(0.0, 0.0); 2]
    } else {
        let hz = [
            z0[0] * (0.5 * dt) + z0[1] * omega0_half,
            z0[0] * omega0_half - z0[1] * (0.5 * dt),
        ];
        [-I * hz[0] / wt, -I * hz[1] / wt]
    };
    Avg2Solution {
        omega0_half,
        omega,
        delta_tilde: dt,
        omega_tilde: wt,
        phase0,
        a: z0,
        b,
    }
}

/// Averaged amplitudes at `t` for the ground initial state.
pub fn avg2_solution(omega0_half: f64, omega: f64, delta: f64, t: f64) -> AmplitudePair {
    avg2_initial(omega0_half, omega, delta, &AmplitudePair::ground(Frame::Rotating)).at(t)
}

/// `b₁ = z₁ + ε e^{−2iωt} z₂`, `b₂ = z₂ − ε e^{2iωt} z₁` with `ε = Ω₀/(2ω)`.
pub fn reconstruct_b(z: &AmplitudePair, t: f64, omega0_half: f64, omega: f64) -> AmplitudePair {
    let eps = omega0_half / (2.0 * omega);
    let r = C64::from_polar(eps, 2.0 * omega * t);
    AmplitudePair::new(z.a1 + r.conj() * z.a2, z.a2 - r * z.a1, Frame::Rotating)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    #[test]
    fn rwa_half_flop() {
        let b = rwa_solution(0.1, 0.0, PI / 0.2);
        assert!(b.a1.norm() < 1e-15);
        assert!((b.a2 - C64::new(0.0, -1.0)).norm() < 1e-15);
        assert_eq!(
            rwa_solution(0.1, 0.3, 0.0).as_array(),
            [C64::new(1.0, 0.0), C64::new(0.0, 0.0)]
        );
        assert_eq!(rwa_populations(0.3, 0.0, 0.0), (1.0, 0.0));
    }

    #[test]
    fn rwa_population_envelopes() {
        let s = Rwa1Solution::new(0.1, 0.1);
        let peak = s.populations(PI / (2.0 * s.omega_half_rabi)).1;
        assert_relative_eq!(peak, 0.8, epsilon = 1e-14);
        for k in 0..200 {
            let t = 0.37 * k as f64;
            let (n1, n2) = rwa_populations(0.1, 0.2, t);
            assert!(n2 <= 0.5 + 1e-15);
            assert_relative_eq!(n1 + n2, 1.0, epsilon = 1e-15);
            assert_relative_eq!(rwa_populations(0.1, 0.0, t).1, (0.1 * t).sin().powi(2), epsilon = 1e-14);
            let b = s.at(t);
            assert_relative_eq!(b.a2.norm_sqr(), s.populations(t).1, epsilon = 1e-14);
        }
    }

    #[test]
    fn zero_drive_rwa_is_identity() {
        let b = rwa_solution(0.0, 0.0, 17.0);
        assert_eq!(b.a1, C64::new(1.0, 0.0));
        assert_eq!(b.a2, C64::new(0.0, 0.0));
    }

    #[test]
    fn naive_limits() {
        assert!((naive_perturbation_c1(0.1, 1.2, 1.0, 0.0).unwrap() - 1.0).norm() < 1e-15);
        assert_eq!(naive_perturbation_c1(0.0, 1.2, 1.0, 50.0).unwrap(), C64::new(1.0, 0.0));
        assert!((naive_perturbation_c1(1e-6, 1.2, 1.0, 50.0).unwrap() - 1.0).norm() < 1e-9);
    }

    #[test]
    fn naive_matches_direct_quadrature() {
        let (w0h, omega, omega0): (f64, f64, f64) = (0.1, 1.2, 1.0);
        let delta = omega - omega0;
        let w = (w0h * w0h + delta * delta / 4.0).sqrt();
        let t = 23.7;
        let f = |s: f64| {
            C64::from_polar(1.0, -(omega0 + delta / 2.0) * s) * ((omega + w) * s).sin()
                + C64::from_polar(1.0, -(omega0 + delta / 2.0) * s) * ((w - omega) * s).sin()
        };
        let n = 200_000;
        let h = t / n as f64;
        let mut acc = f(0.0) + f(t);
        for k in 1..n {
            acc += f(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
        }
        let direct = 1.0 - (w0h * w0h / w) * acc * (h / 3.0);
        let closed = naive_perturbation_c1(w0h, omega, omega0, t).unwrap();
        assert!((direct - closed).norm() < 1e-12, "{direct} vs {closed}");
    }

    #[test]
    fn naive_resonant_denominator() {
        // 2Ω − δ ≈ 2Ω₀²/δ for small Ω₀ with δ > 0.
        let e = naive_perturbation_c1(1e-7, 1.2, 1.0, 1.0).unwrap_err();
        assert!(matches!(e, Error::ResonantDenominator { which: "2Ω−δ", .. }), "{e:?}");
    }

    #[test]
    fn shift_and_resonance() {
        assert!(bloch_siegert_detuning(0.331662, 1.1, 0.1).abs() < 1e-6);
        assert_eq!(bloch_siegert_detuning(0.0, 1.3, 0.2), 0.2);
        assert_relative_eq!(bloch_siegert_detuning(0.1, 1.0, 0.0), -0.01, epsilon = 1e-16);
        assert_eq!(resonance_frequency(0.0, 1.0), 1.0);
        assert!((resonance_frequency(0.331662, 1.0) - 1.1).abs() < 1e-5);
        assert_relative_eq!(resonance_frequency(0.1, 1.0), 1.009_901_951_359_278_4, epsilon = 1e-15);
    }

    #[test]
    fn avg2_initial_values() {
        let s = avg2_initial(0.1, 1.0, 0.0, &AmplitudePair::ground(Frame::Rotating));
        assert_relative_eq!(s.a[0].re, 0.997_506_234_413_965_1, epsilon = 1e-15);
        assert_relative_eq!(s.a[1].re, 0.049_875_311_720_698_25, epsilon = 1e-15);
        assert_relative_eq!(s.a[1].re / s.a[0].re, 0.05, epsilon = 1e-15);
        let a1 = s.a[0].re;
        let a2 = s.a[1].re;
        let b1 = -I * (s.delta_tilde * a1 + 0.2 * a2) / (2.0 * s.omega_tilde);
        let b2 = -I * (0.2 * a1 - s.delta_tilde * a2) / (2.0 * s.omega_tilde);
        assert!((s.b[0] - b1).norm() < 1e-15 && (s.b[1] - b2).norm() < 1e-15);
        let r = s.reconstructed(0.0);
        assert!((r.a1 - 1.0).norm() < 1e-15 && r.a2.norm() < 1e-16);
        let tiny = avg2_initial(1e-9, 1.0, 0.0, &AmplitudePair::ground(Frame::Rotating));
        assert!((tiny.a[0].re - 1.0).abs() < 1e-15 && tiny.a[1].norm() < 1e-9);
    }

    #[test]
    fn avg2_at_shaped_resonance_peaks_at_quarter_period() {
        let (w0h, omega) = (0.331662, 1.1);
        let s = avg2_initial(w0h, omega, 0.1, &AmplitudePair::ground(Frame::Rotating));
        let tq = PI / (2.0 * s.omega_tilde);
        let at = |t: f64| s.at(t).a2.norm();
        assert!(at(tq) >= at(tq - 1e-3) && at(tq) >= at(tq + 1e-3));
        assert_eq!(s.at(0.0).as_array(), s.a);
    }

    #[test]
    fn avg2_degenerate_rate_is_constant() {
        let s = avg2_initial(0.0, 1.0, 0.0, &AmplitudePair::ground(Frame::Rotating));
        assert_eq!(s.omega_tilde, 0.0);
        assert_eq!(s.at(123.0).as_array(), s.a);
    }

    #[test]
    fn avg2_matches_its_own_ode() {
        // z' = −i H̃ z integrated by brute-force RK4.
        let s = avg2_initial(0.2, 1.1, 0.15, &AmplitudePair::ground(Frame::Rotating));
        let h = [[0.5 * s.delta_tilde, 0.2], [0.2, -0.5 * s.delta_tilde]];
        let f = |z: [C64; 2]| {
            [
                -I * (z[0] * h[0][0] + z[1] * h[0][1]),
                -I * (z[0] * h[1][0] + z[1] * h[1][1]),
            ]
        };
        let mut z = s.a;
        let dt = 1e-3;
        for _ in 0..10_000 {
            let k1 = f(z);
            let k2 = f([z[0] + k1[0] * (dt / 2.0), z[1] + k1[1] * (dt / 2.0)]);
            let k3 = f([z[0] + k2[0] * (dt / 2.0), z[1] + k2[1] * (dt / 2.0)]);
            let k4 = f([z[0] + k3[0] * dt, z[1] + k3[1] * dt]);
            for i in 0..2 {
                z[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0);
            }
        }
        let c = s.at(10.0);
        assert!((c.a1 - z[0]).norm() < 1e-10 && (c.a2 - z[1]).norm() < 1e-10);
    }

    #[test]
    fn phased_solution_matches_rotating_ode() {
        // Direct RK4 of the exact rotating-frame equations with E = Ω₀e^{iφ₀}.
        let (w0h, omega, phi) = (0.1, 1.0, 1.1);
        let e = C64::from_polar(w0h, phi);
        let f = |t: f64, b: [C64; 2]| {
            let r = C64::from_polar(1.0, 2.0 * omega * t);
            [-I * (e + e.conj() * r.conj()) * b[1], -I * (e.conj() + e * r) * b[0]]
        };
        let mut b = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];
        let (dt, n) = (1.0 / 512.0, 512 * 40);
        let s = avg2_initial_phased(w0h, omega, 0.0, phi, &AmplitudePair::ground(Frame::Rotating));
        let plain = avg2_initial(w0h, omega, 0.0, &AmplitudePair::ground(Frame::Rotating));
        let mut worst = 0.0_f64;
        let mut worst_plain = 0.0_f64;
        for k in 0..n {
            let t = k as f64 * dt;
            let k1 = f(t, b);
            let k2 = f(t + dt / 2.0, [b[0] + k1[0] * (dt / 2.0), b[1] + k1[1] * (dt / 2.0)]);
            let k3 = f(t + dt / 2.0, [b[0] + k2[0] * (dt / 2.0), b[1] + k2[1] * (dt / 2.0)]);
            let k4 = f(t + dt, [b[0] + k3[0] * dt, b[1] + k3[1] * dt]);
            for i in 0..2 {
                b[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0);
            }
            let n1 = b[0].norm_sqr();
            worst = worst.max((s.reconstructed(t + dt).a1.norm_sqr() - n1).abs());
            worst_plain = worst_plain.max((plain.reconstructed(t + dt).a1.norm_sqr() - n1).abs());
        }
        assert!(worst < 0.5 * worst_plain, "phased {worst} vs unphased {worst_plain}");
        let r = s.reconstructed(0.0);
        assert!((r.a1 - 1.0).norm() < 1e-15 && r.a2.norm() < 1e-15);
        let rwa = Rwa1Solution::new(0.1, 0.05);
        let b0 = AmplitudePair::ground(Frame::Rotating);
        assert!((rwa.evolve_phased(&b0, 7.0, phi).a2.norm() - rwa.at(7.0).a2.norm()).abs() < 1e-15);
    }

    proptest! {
        #[test]
        fn general_initial_state_is_matched(th in 0.0f64..PI, ph in -PI..PI, phi0 in -PI..PI, w0h in 0.0f64..0.5, omega in 0.8f64..1.3) {
            let b0 = AmplitudePair::new(C64::new(th.cos(), 0.0), C64::from_polar(th.sin(), ph), Frame::Rotating);
            let s = avg2_initial_phased(w0h, omega, omega - 1.0, phi0, &b0);
            let r = s.reconstructed(0.0);
            prop_assert!((r.a1 - b0.a1).norm() < 1e-14 && (r.a2 - b0.a2).norm() < 1e-14);
        }

        #[test]
        fn reconstruction_norm_ripple_is_bounded(t in 0.0f64..200.0, w0h in 0.0f64..0.5, omega in 0.8f64..1.3) {
            let s = avg2_initial(w0h, omega, omega - 1.0, &AmplitudePair::ground(Frame::Rotating));
            let z = s.at(t);
            let zn = AmplitudePair::normalized(z.a1, z.a2, Frame::Averaged);
            let eps = s.epsilon();
            let ripple = (reconstruct_b(&zn, t, w0h, omega).norm_sqr() - 1.0).abs();
            prop_assert!(ripple <= 2.0 * eps * eps + 1e-14);
        }

        #[test]
        fn rwa_evolution_is_unitary(w0h in 0.0f64..0.5, delta in -0.3f64..0.3, t in 0.0f64..300.0) {
            let b0 = AmplitudePair::normalized(C64::new(0.6, 0.1), C64::new(-0.2, 0.7), Frame::Rotating);
            let b = Rwa1Solution::new(w0h, delta).evolve(&b0, t);
            prop_assert!((b.norm_sqr() - 1.0).abs() < 1e-13);
        }
    }
}
