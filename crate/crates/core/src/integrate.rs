//! Explicit Runge–Kutta integration for small real or complex systems.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::drive::DriveField;
use crate::error::{invalid, Error, Result};
use crate::state::Frame;

/// Default fixed step, `2⁻¹⁰`.
pub const DEFAULT_STEP: f64 = 1.0 / 1024.0;
pub const DEFAULT_TOL: f64 = 1e-12;

/// Vector-space operations needed by the steppers.
pub trait OdeState: Copy + Send + Sync + std::fmt::Debug {
    /// `self + a·x`
    fn add_scaled(&self, a: f64, x: &Self) -> Self;
    fn scaled(&self, a: f64) -> Self;
    fn is_finite(&self) -> bool;
    /// Largest `|err_i| / (atol + rtol·max(|y0_i|, |y1_i|))`.
    fn error_ratio(y0: &Self, y1: &Self, err: &Self, rtol: f64, atol: f64) -> f64;
    /// Real components, complex values interleaved as (re, im).
    fn reals(&self) -> Vec<f64>;
}

impl<const N: usize> OdeState for [f64; N] {
    fn add_scaled(&self, a: f64, x: &Self) -> Self {
        std::array::from_fn(|i| self[i] + a * x[i])
    }
    fn scaled(&self, a: f64) -> Self {
        self.map(|v| a * v)
    }
    fn is_finite(&self) -> bool {
        self.iter().all(|v| v.is_finite())
    }
    fn error_ratio(y0: &Self, y1: &Self, err: &Self, rtol: f64, atol: f64) -> f64 {
        (0..N)
            .map(|i| err[i].abs() / (atol + rtol * y0[i].abs().max(y1[i].abs())))
            .fold(0.0, f64::max)
    }
    fn reals(&self) -> Vec<f64> {
        self.to_vec()
    }
}

impl<const N: usize> OdeState for [C64; N] {
    fn add_scaled(&self, a: f64, x: &Self) -> Self {
        std::array::from_fn(|i| self[i] + x[i] * a)
    }
    fn scaled(&self, a: f64) -> Self {
        self.map(|v| v * a)
    }
    fn is_finite(&self) -> bool {
        self.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }
    fn error_ratio(y0: &Self, y1: &Self, err: &Self, rtol: f64, atol: f64) -> f64 {
        (0..N)
            .map(|i| err[i].norm() / (atol + rtol * y0[i].norm().max(y1[i].norm())))
            .fold(0.0, f64::max)
    }
    fn reals(&self) -> Vec<f64> {
        self.iter().flat_map(|c| [c.re, c.im]).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegratorMode {
    #[default]
    FixedRk4,
    AdaptiveRk,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct IntegratorConfig {
    pub mode: IntegratorMode,
    pub step: f64,
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub record_stride: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            mode: IntegratorMode::FixedRk4,
            step: DEFAULT_STEP,
            rel_tol: DEFAULT_TOL,
            abs_tol: DEFAULT_TOL,
            record_stride: 1,
        }
    }
}

impl IntegratorConfig {
    pub fn fixed(step: f64) -> Self {
        Self {
            step,
            ..Self::default()
        }
    }

    pub fn adaptive(rel_tol: f64, abs_tol: f64) -> Self {
        Self {
            mode: IntegratorMode::AdaptiveRk,
            rel_tol,
            abs_tol,
            ..Self::default()
        }
    }

    pub fn with_stride(mut self, stride: usize) -> Self {
        self.record_stride = stride;
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self.mode {
            IntegratorMode::FixedRk4 => {
                if !(self.step.is_finite() && self.step > 0.0) {
                    return Err(invalid("step", format!("must be > 0, got {}", self.step)));
                }
            }
            IntegratorMode::AdaptiveRk => {
                for (field, v) in [("rel_tol", self.rel_tol), ("abs_tol", self.abs_tol)] {
                    if !(v > 0.0 && v < 1.0) {
                        return Err(invalid(field, format!("must lie in (0, 1), got {v}")));
                    }
                }
            }
        }
        if self.record_stride == 0 {
            return Err(invalid("record_stride", "must be positive"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrajectoryMeta {
    pub frame: Option<Frame>,
    pub drive: Option<DriveField>,
    pub integrator: IntegratorConfig,
    pub accepted_steps: usize,
    pub rejected_steps: usize,
}

/// Recorded solution: states and their time derivatives on a grid.
#[derive(Debug, Clone)]
pub struct Trajectory<S> {
    pub times: Vec<f64>,
    pub states: Vec<S>,
    pub derivs: Vec<S>,
    pub meta: TrajectoryMeta,
}

impl<S: OdeState> Trajectory<S> {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn t_start(&self) -> f64 {
        self.times[0]
    }

    pub fn t_end(&self) -> f64 {
        *self.times.last().expect("non-empty trajectory")
    }

    pub fn last(&self) -> &S {
        self.states.last().expect("non-empty trajectory")
    }

    /// Cubic Hermite interpolation using the stored derivatives.
    pub fn sample(&self, t: f64) -> Result<S> {
        let (start, end) = (self.t_start(), self.t_end());
        if !(t >= start && t <= end) {
            return Err(Error::OutOfRange { t, start, end });
        }
        let k = self.times.partition_point(|&x| x <= t);
        if k == 0 {
            return Ok(self.states[0]);
        }
        let i = k - 1;
        if self.times[i] == t || i + 1 == self.len() {
            return Ok(self.states[i]);
        }
        let (t0, t1) = (self.times[i], self.times[i + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        Ok(self.states[i]
            .scaled(h00)
            .add_scaled(h10 * h, &self.derivs[i])
            .add_scaled(h01, &self.states[i + 1])
            .add_scaled(h11 * h, &self.derivs[i + 1]))
    }

    /// Applies `f` to every recorded state, keeping the grid.
    pub fn map<T: OdeState>(&self, f: impl Fn(f64, &S) -> T, df: impl Fn(f64, &S, &S) -> T) -> Trajectory<T> {
        Trajectory {
            times: self.times.clone(),
            states: self.times.iter().zip(&self.states).map(|(&t, y)| f(t, y)).collect(),
            derivs: self
                .times
                .iter()
                .zip(self.states.iter().zip(&self.derivs))
                .map(|(&t, (y, d))| df(t, y, d))
                .collect(),
            meta: self.meta.clone(),
        }
    }
}

/// Number of fixed steps covering `[ta, tb]`; the last one may be short.
pub fn fixed_step_count(ta: f64, tb: f64, h: f64) -> usize {
    let ratio = (tb - ta) / h;
    let mut n = ratio.floor() as usize;
    // Treat spans that are a whole number of steps up to rounding as exact.
    if ratio - (n as f64) > 1e-9 {
        n += 1;
    }
    n.max(1)
}

/// Times recorded by a fixed-step run with the given stride.
pub fn fixed_grid(ta: f64, tb: f64, h: f64, stride: usize) -> Vec<f64> {
    let n = fixed_step_count(ta, tb, h);
    let stride = stride.max(1);
    let mut times: Vec<f64> = (0..n).step_by(stride).map(|k| ta + k as f64 * h).collect();
    times.push(tb);
    times
}

/// Integrates `y' = rhs(t, y)` from `t_span.0` to `t_span.1`.
pub fn integrate<S, F>(rhs: F, y0: S, t_span: (f64, f64), cfg: &IntegratorConfig) -> Result<Trajectory<S>>
where
    S: OdeState,
    F: Fn(f64, &S) -> S,
{
    cfg.validate()?;
    let (ta, tb) = t_span;
    if !(ta.is_finite() && tb.is_finite() && ta < tb) {
        return Err(invalid("span", format!("need finite t_a < t_b, got [{ta}, {tb}]")));
    }
    if !y0.is_finite() {
        return Err(Error::NonFiniteState { t: ta });
    }
    match cfg.mode {
        IntegratorMode::FixedRk4 => fixed_rk4(&rhs, y0, ta, tb, cfg),
        IntegratorMode::AdaptiveRk => dormand_prince(&rhs, y0, ta, tb, cfg),
    }
}

fn fixed_rk4<S: OdeState>(
    rhs: &impl Fn(f64, &S) -> S,
    y0: S,
    ta: f64,
    tb: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory<S>> {
    let h = cfg.step;
    let n = fixed_step_count(ta, tb, h);
    let capacity = n / cfg.record_stride + 2;
    let mut traj = Trajectory {
        times: Vec::with_capacity(capacity),
        states: Vec::with_capacity(capacity),
        derivs: Vec::with_capacity(capacity),
        meta: TrajectoryMeta {
            integrator: *cfg,
            ..TrajectoryMeta::default()
        },
    };
    let mut y = y0;
    let mut t = ta;
    let mut k1 = rhs(t, &y);
    traj.times.push(t);
    traj.states.push(y);
    traj.derivs.push(k1);
    for k in 1..=n {
        let t_next = if k == n { tb } else { ta + k as f64 * h };
        let dt = t_next - t;
        let half = 0.5 * dt;
        let k2 = rhs(t + half, &y.add_scaled(half, &k1));
        let k3 = rhs(t + half, &y.add_scaled(half, &k2));
        let k4 = rhs(t_next, &y.add_scaled(dt, &k3));
        y = y
            .add_scaled(dt / 6.0, &k1)
            .add_scaled(dt / 3.0, &k2)
            .add_scaled(dt / 3.0, &k3)
            .add_scaled(dt / 6.0, &k4);
        t = t_next;
        if !y.is_finite() {
            return Err(Error::NonFiniteState { t });
        }
        k1 = rhs(t, &y);
        if k % cfg.record_stride == 0 || k == n {
            traj.times.push(t);
            traj.states.push(y);
            traj.derivs.push(k1);
        }
    }
    traj.meta.accepted_steps = n;
    Ok(traj)
}

// Dormand–Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn dormand_prince<S: OdeState>(
    rhs: &impl Fn(f64, &S) -> S,
    y0: S,
    ta: f64,
    tb: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory<S>> {
    let span = tb - ta;
    let min_step = 1e-14 * span;
    let (rtol, atol) = (cfg.rel_tol, cfg.abs_tol);
    let mut traj = Trajectory {
        times: vec![ta],
        states: vec![y0],
        derivs: Vec::new(),
        meta: TrajectoryMeta {
            integrator: *cfg,
            ..TrajectoryMeta::default()
        },
    };
    let mut y = y0;
    let mut t = ta;
    let mut k1 = rhs(t, &y);
    traj.derivs.push(k1);
    let mut h = (1e-3 * span).min(0.01);
    let mut accepted = 0usize;
    let mut rejected = 0usize;
    loop {
        let last = t + h >= tb;
        let dt = if last { tb - t } else { h };
        let k2 = rhs(t + C2 * dt, &y.add_scaled(dt * A21, &k1));
        let k3 = rhs(t + C3 * dt, &y.add_scaled(dt * A31, &k1).add_scaled(dt * A32, &k2));
        let k4 = rhs(
            t + C4 * dt,
            &y.add_scaled(dt * A41, &k1)
                .add_scaled(dt * A42, &k2)
                .add_scaled(dt * A43, &k3),
        );
        let k5 = rhs(
            t + C5 * dt,
            &y.add_scaled(dt * A51, &k1)
                .add_scaled(dt * A52, &k2)
                .add_scaled(dt * A53, &k3)
                .add_scaled(dt * A54, &k4),
        );
        let k6 = rhs(
            t + dt,
            &y.add_scaled(dt * A61, &k1)
                .add_scaled(dt * A62, &k2)
                .add_scaled(dt * A63, &k3)
                .add_scaled(dt * A64, &k4)
                .add_scaled(dt * A65, &k5),
        );
        let y_new = y
            .add_scaled(dt * B1, &k1)
            .add_scaled(dt * B3, &k3)
            .add_scaled(dt * B4, &k4)
            .add_scaled(dt * B5, &k5)
            .add_scaled(dt * B6, &k6);
        let t_new = if last { tb } else { t + dt };
        let k7 = rhs(t_new, &y_new);
        let err = k1
            .scaled(dt * E1)
            .add_scaled(dt * E3, &k3)
            .add_scaled(dt * E4, &k4)
            .add_scaled(dt * E5, &k5)
            .add_scaled(dt * E6, &k6)
            .add_scaled(dt * E7, &k7);
        let ratio = if y_new.is_finite() && err.is_finite() {
            S::error_ratio(&y, &y_new, &err, rtol, atol)
        } else {
            f64::INFINITY
        };
        if ratio <= 1.0 {
            t = t_new;
            y = y_new;
            k1 = k7;
            accepted += 1;
            if accepted.is_multiple_of(cfg.record_stride) || last {
                traj.times.push(t);
                traj.states.push(y);
                traj.derivs.push(k1);
            }
            if last {
                break;
            }
            let factor = if ratio == 0.0 {
                5.0
            } else {
                (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0)
            };
            h = dt * factor;
        } else {
            rejected += 1;
            let factor = if ratio.is_finite() {
                (0.9 * ratio.powf(-0.2)).clamp(0.1, 0.9)
            } else {
                0.1
            };
            h = dt * factor;
        }
        if h < min_step {
            if !y_new.is_finite() {
                return Err(Error::NonFiniteState { t: t + dt });
            }
            return Err(Error::StepUnderflow {
                t,
                step: h,
                limit: min_step,
            });
        }
    }
    traj.meta.accepted_steps = accepted;
    traj.meta.rejected_steps = rejected;
    Ok(traj)
}
