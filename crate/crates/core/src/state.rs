use std::fmt;

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

/// Frame in which a pair of amplitudes is expressed.
///
/// `Lab` holds `C₁, C₂`; `Interaction` holds `c_j = e^{iE_j t} C_j`;
/// `Rotating` holds `b₁ = e^{-iδt/2} c₁`, `b₂ = e^{iδt/2} c₂`; `Averaged`
/// holds the slow variables `z` of the second-order averaged system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Frame {
    Lab,
    Interaction,
    Rotating,
    Averaged,
}

impl Frame {
    pub fn name(self) -> &'static str {
        match self {
            Frame::Lab => "lab",
            Frame::Interaction => "interaction",
            Frame::Rotating => "rotating",
            Frame::Averaged => "averaged",
        }
    }
}

impl fmt::Display for Frame {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AmplitudePair {
    pub a1: C64,
    pub a2: C64,
    pub frame: Frame,
}

impl AmplitudePair {
    pub fn new(a1: C64, a2: C64, frame: Frame) -> Self {
        Self { a1, a2, frame }
    }

    /// Normalized pure state. Panics on the zero vector.
    pub fn normalized(a1: C64, a2: C64, frame: Frame) -> Self {
        let n = (a1.norm_sqr() + a2.norm_sqr()).sqrt();
        assert!(n > 0.0, "cannot normalize the zero vector");
        Self::new(a1 / n, a2 / n, frame)
    }

    pub fn ground(frame: Frame) -> Self {
        Self::new(C64::new(1.0, 0.0), C64::new(0.0, 0.0), frame)
    }

    pub fn excited(frame: Frame) -> Self {
        Self::new(C64::new(0.0, 0.0), C64::new(1.0, 0.0), frame)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.a1.norm_sqr() + self.a2.norm_sqr()
    }

    /// Occupation probabilities `(|a₁|², |a₂|²)`.
    pub fn populations(&self) -> (f64, f64) {
        (self.a1.norm_sqr(), self.a2.norm_sqr())
    }

    pub fn as_array(&self) -> [C64; 2] {
        [self.a1, self.a2]
    }

    pub fn from_array(a: [C64; 2], frame: Frame) -> Self {
        Self::new(a[0], a[1], frame)
    }
}

/// Population difference `Δ = N₁ − N₂` and coherence `σ̃` in the
/// slowly varying frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochState {
    pub delta_pop: f64,
    pub sigma: C64,
}

impl BlochState {
    pub fn new(delta_pop: f64, sigma: C64) -> Self {
        Self { delta_pop, sigma }
    }

    pub fn ground() -> Self {
        Self::new(1.0, C64::new(0.0, 0.0))
    }

    pub fn n1(&self) -> f64 {
        0.5 * (1.0 + self.delta_pop)
    }

    pub fn n2(&self) -> f64 {
        0.5 * (1.0 - self.delta_pop)
    }

    /// `4|σ|² + Δ²`, equal to 1 for pure states and below 1 for mixed ones.
    pub fn purity_radius_sqr(&self) -> f64 {
        4.0 * self.sigma.norm_sqr() + self.delta_pop * self.delta_pop
    }

    pub fn is_physical(&self, tol: f64) -> bool {
        self.delta_pop.abs() <= 1.0 + tol && self.purity_radius_sqr() <= 1.0 + tol
    }

    /// Bloch variables of a pure state given by lab amplitudes, using the
    /// coherence `σ = −C₁C₂*` that obeys the free precession `σ̇ = iω₀σ`.
    pub fn from_amplitudes(c1: C64, c2: C64) -> Self {
        Self::new(c1.norm_sqr() - c2.norm_sqr(), -(c1 * c2.conj()))
    }

    pub(crate) fn to_array(self) -> [f64; 3] {
        [self.delta_pop, self.sigma.re, self.sigma.im]
    }

    pub(crate) fn from_slice(y: &[f64; 3]) -> Self {
        Self::new(y[0], C64::new(y[1], y[2]))
    }
}
