//! Simulation of coherently driven two-level systems beyond the
//! rotating-wave approximation.
//!
//! Units: ħ = 1, transition frequency ω₀ = 1 unless stated otherwise. All
//! drive amplitudes are *half* amplitudes Ω₀ so that the field coupling the
//! two levels is `F(t) = 2 Ω₀(t) cos(Φ(t) + φ₀)`.
//!
//! Module map:
//! - [`drive`], [`params`], [`state`]: domain types and drive evaluation.
//! - [`integrate`]: fixed-step RK4 and adaptive Dormand–Prince engine.
//! - [`schrodinger`]: unitary propagation in lab / interaction / rotating frames.
//! - [`averaging`]: RWA, naive perturbation and second-order averaging closed forms.
//! - [`bloch`]: dissipative Bloch equations, full and averaged.
//! - [`pulsecraft`]: π-pulse design (chirped, shaped, trains) and area checks.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod averaging;
pub mod bloch;
pub mod csv;
pub mod drive;
pub mod error;
pub mod integrate;
pub mod params;
pub mod pulsecraft;
pub mod schrodinger;
pub mod state;

pub use drive::{CarrierPhase, DriveField, FnDrive, GaussianEnvelope, PreparedDrive, SlowDrive};
pub use error::{Error, Result};
pub use integrate::{IntegratorConfig, IntegratorMode, Trajectory, TrajectoryMeta};
pub use params::TlsParams;
pub use state::{AmplitudePair, BlochState, Frame};

pub use num_complex::Complex64 as C64;
