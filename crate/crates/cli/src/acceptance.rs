//! The acceptance suite: one check per numbered criterion.

use std::f64::consts::PI;

use serde::Serialize;
use tlsim::averaging::{naive_perturbation_c1, rwa_populations};
use tlsim::bloch::simulate_bloch_rwa;
use tlsim::pulsecraft::{
    make_chirped_pi_pulse, make_gaussian_pi_pulse, make_pulse_train, make_pulse_train_with, make_shaped_pi_pulse,
    pi_pulse_width, shaped_amplitude, verify_pulse_area,
};
use tlsim::schrodinger::{propagate_lab, propagate_rotating};
use tlsim::{
    AmplitudePair, BlochState, CarrierPhase, DriveField, FnDrive, Frame, IntegratorConfig, PreparedDrive, TlsParams,
};

use crate::config::{ScenarioConfig, Solver, SweepSpec};
use crate::error::Result;
use crate::solvers::{run_all, SolverOutput};
use crate::sweep::{refined_max, sweep_frequency, sweep_phase};

/// Train spacing used by the figure scenarios, in units of σ₀.
pub const FIGURE_SPACING_SIGMAS: f64 = 13.1;

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: String,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl CriterionResult {
    fn new(id: impl Into<String>, name: &'static str, passed: bool, detail: String) -> Self {
        Self {
            id: id.into(),
            name,
            passed,
            detail,
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{} criterion {:>2}  {}: {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.detail
        )
    }
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Linear interpolation of a solver's N₁ series.
fn n1_at(o: &SolverOutput, t: f64) -> f64 {
    let k = o.times.partition_point(|&x| x <= t).clamp(1, o.times.len() - 1);
    let (t0, t1) = (o.times[k - 1], o.times[k]);
    let s = ((t - t0) / (t1 - t0)).clamp(0.0, 1.0);
    o.n1[k - 1] * (1.0 - s) + o.n1[k] * s
}

fn find(outs: &[SolverOutput], s: Solver) -> &SolverOutput {
    outs.iter().find(|o| o.solver == s).expect("solver was requested")
}

fn lossless() -> TlsParams {
    TlsParams::default()
}

pub fn norm_conservation() -> Result<CriterionResult> {
    let d = DriveField::cw(1.0, 0.1);
    let cfg = IntegratorConfig::fixed(2f64.powi(-10)).with_stride(1024);
    let tr = propagate_lab(&lossless(), &d, AmplitudePair::ground(Frame::Lab), (0.0, 2000.0), &cfg)?;
    let worst = tr
        .states
        .iter()
        .map(|s| (s[0].norm_sqr() + s[1].norm_sqr() - 1.0).abs())
        .fold(0.0, f64::max);
    Ok(CriterionResult::new(
        "1",
        "norm conservation",
        worst < 1e-8,
        format!("max | |C1|^2+|C2|^2 - 1 | = {worst:.3e} over t in [0, 2000] (tol 1e-8)"),
    ))
}

pub fn rwa_closed_form_matches_ode() -> Result<CriterionResult> {
    let mut worst = 0.0_f64;
    for w0h in [0.05, 0.1, 0.3] {
        for delta in [0.0, 0.1] {
            let d = DriveField::cw(1.0 + delta, w0h);
            let rabi = (w0h * w0h + 0.25 * delta * delta).sqrt();
            let span = (0.0, 3.0 * PI / rabi);
            let cfg = IntegratorConfig::default().with_stride(8);
            let tr = propagate_rotating(
                &lossless(),
                &d,
                AmplitudePair::ground(Frame::Rotating),
                span,
                &cfg,
                true,
            )?;
            for (&t, y) in tr.times.iter().zip(&tr.states) {
                let (n1, n2) = rwa_populations(w0h, delta, t);
                worst = worst
                    .max((n1 - y[0].norm_sqr()).abs())
                    .max((n2 - y[1].norm_sqr()).abs());
            }
        }
    }
    Ok(CriterionResult::new(
        "2",
        "RWA closed form = RWA ODE",
        worst < 1e-7,
        format!("max population difference {worst:.3e} over 6 (Omega0, delta) cases (tol 1e-7)"),
    ))
}

fn bloch_siegert_sweep() -> Result<crate::sweep::SweepResult> {
    let cfg = ScenarioConfig::new("bs", lossless(), DriveField::cw(1.0, 0.1), &[Solver::NumericFull]);
    let omegas: Vec<f64> = (0..=80).map(|k| 0.99 + 5e-4 * k as f64).collect();
    sweep_frequency(&cfg, &omegas)
}

fn resonance_target(w0h: f64) -> f64 {
    0.5 * (1.0 + (1.0 + 4.0 * w0h * w0h).sqrt())
}

pub fn bloch_siegert_resonance() -> Result<Vec<CriterionResult>> {
    let r = bloch_siegert_sweep()?;
    let target = resonance_target(0.1);
    let found = r.argmax_peak(Solver::NumericFull).unwrap();
    let slow = r.slowest_flop(Solver::NumericFull).unwrap();
    Ok(vec![
        CriterionResult::new(
            "3",
            "Bloch-Siegert resonance (peak N2 argmax)",
            (found - target).abs() < 2e-3,
            format!(
                "argmax = {found:.6}, target = {target:.6}, |diff| = {:.3e} (tol 2e-3)",
                (found - target).abs()
            ),
        ),
        CriterionResult::new(
            "3s",
            "supplementary: slowest flop carrier",
            (slow - target).abs() < 2e-3,
            format!(
                "slowest flop at {slow:.6}, |diff| = {:.3e} (tol 2e-3, not a substitute for 3)",
                (slow - target).abs()
            ),
        ),
    ])
}

pub fn avg2_beats_rwa() -> Result<CriterionResult> {
    let cfg = ScenarioConfig::new(
        "c4",
        lossless(),
        DriveField::cw(1.0, 0.1),
        &[Solver::NumericFull, Solver::Rwa, Solver::Avg2],
    )
    .with_span(0.0, 3.0 * PI / 0.1);
    let (_, outs) = run_all(&cfg)?;
    let num = &find(&outs, Solver::NumericFull).n1;
    let e_rwa = max_abs_diff(num, &find(&outs, Solver::Rwa).n1);
    let e_avg = max_abs_diff(num, &find(&outs, Solver::Avg2).n1);
    Ok(CriterionResult::new(
        "4",
        "second order beats RWA",
        e_avg < 0.5 * e_rwa,
        format!(
            "max |dN1| avg2 = {e_avg:.4e}, RWA = {e_rwa:.4e}, ratio = {:.3} (need < 0.5)",
            e_avg / e_rwa
        ),
    ))
}

pub fn naive_does_not_improve() -> Result<CriterionResult> {
    let (w0h, omega): (f64, f64) = (0.1, 1.2);
    let delta = omega - 1.0;
    let rabi = (w0h * w0h + 0.25 * delta * delta).sqrt();
    let mut cfg = ScenarioConfig::new("c5", lossless(), DriveField::cw(omega, w0h), &[Solver::NumericFull])
        .with_span(0.0, PI / rabi);
    cfg.output.rows = 20_000;
    let (_, outs) = run_all(&cfg)?;
    let num = &outs[0];
    let neg: Vec<f64> = num.n1.iter().map(|n| -n).collect();
    let (t_min, neg_min) = refined_max(&num.times, &neg);
    let n_num = -neg_min;
    let n_naive = naive_perturbation_c1(w0h, omega, 1.0, t_min)?.norm_sqr();
    let n_rwa = rwa_populations(w0h, delta, t_min).0;
    let (e_naive, e_rwa) = ((n_naive - n_num).abs(), (n_rwa - n_num).abs());
    Ok(CriterionResult::new(
        "5",
        "naive perturbation does not improve on RWA",
        e_naive >= e_rwa,
        format!("first flop minimum t = {t_min:.4}, N1 = {n_num:.5}; naive error {e_naive:.4e}, RWA error {e_rwa:.4e}"),
    ))
}

pub fn shaped_train() -> Result<DriveField> {
    let pulse = make_shaped_pi_pulse(0.1, 1.0, 0.0)?;
    let sigma0 = pi_pulse_width(shaped_amplitude(0.1, 1.1)?)?;
    Ok(make_pulse_train(&pulse, 3, FIGURE_SPACING_SIGMAS * sigma0)?)
}

pub fn off_design_train(w0h: f64, carrier: CarrierPhase) -> Result<DriveField> {
    let pulse = make_gaussian_pi_pulse(w0h, 1.1, 0.0)?;
    let sigma0 = pi_pulse_width(w0h)?;
    Ok(make_pulse_train_with(
        &pulse,
        3,
        FIGURE_SPACING_SIGMAS * sigma0,
        carrier,
    )?)
}

/// Times midway between pulses and at the end of the record.
pub fn after_pulse_times(train: &DriveField) -> Vec<f64> {
    let c: Vec<f64> = train.members().iter().filter_map(|m| m.t_center()).collect();
    let end = train.natural_end().unwrap();
    (0..c.len())
        .map(|k| c.get(k + 1).map_or(end, |n| 0.5 * (c[k] + n)))
        .collect()
}

pub fn shaped_pulses() -> Result<CriterionResult> {
    let train = shaped_train()?;
    let cfg = ScenarioConfig::new(
        "c6",
        lossless(),
        train.clone(),
        &[Solver::NumericFull, Solver::Rwa, Solver::Avg2],
    );
    let (_, outs) = run_all(&cfg)?;
    let after = after_pulse_times(&train);
    let inv = |s, t| 1.0 - n1_at(find(&outs, s), t);
    let num: Vec<f64> = after.iter().map(|&t| inv(Solver::NumericFull, t)).collect();
    let avg: Vec<f64> = after.iter().map(|&t| inv(Solver::Avg2, t)).collect();
    let rwa: Vec<f64> = after.iter().map(|&t| inv(Solver::Rwa, t)).collect();
    let dev = max_abs_diff(&num, &avg);
    let ok = num[0] >= 0.985 && dev < 0.02 && rwa[2] < 0.80;
    Ok(CriterionResult::new(
        "6",
        "shaped pi-pulses",
        ok,
        format!(
            "numeric inversion after pulse 1 = {:.4} (>= 0.985); max |avg2 - numeric| after each pulse = {dev:.4} (< 0.02); RWA after pulse 3 = {:.4} (< 0.80)",
            num[0], rwa[2]
        ),
    ))
}

fn excited_after_train(train: DriveField) -> Result<f64> {
    let cfg = ScenarioConfig::new("c7", lossless(), train, &[Solver::NumericFull]);
    let (_, outs) = run_all(&cfg)?;
    Ok(1.0 - outs[0].final_n1())
}

pub fn off_design_failures() -> Result<CriterionResult> {
    let weak = excited_after_train(off_design_train(0.1, CarrierPhase::Continuous)?)?;
    let strong = excited_after_train(off_design_train(0.5, CarrierPhase::PerPulse)?)?;
    Ok(CriterionResult::new(
        "7",
        "off-design pulse trains",
        (weak - 0.40).abs() <= 0.05 && (strong - 0.44).abs() <= 0.05,
        format!(
            "excited after train: Omega0=0.1 -> {weak:.4} (0.40 +- 0.05), Omega0=0.5 -> {strong:.4} (0.44 +- 0.05)"
        ),
    ))
}

fn final_n1_by_phase(d: DriveField) -> Result<Vec<f64>> {
    let cfg = ScenarioConfig::new("c8", lossless(), d, &[Solver::NumericFull]);
    let phases = SweepSpec::phase(64).points()?;
    Ok(sweep_phase(&cfg, &phases)?
        .column(Solver::NumericFull, |p| p.final_n1)
        .unwrap())
}

pub fn chirped_pi_pulse() -> Result<CriterionResult> {
    let chirped = final_n1_by_phase(make_chirped_pi_pulse(0.4, 1.0, 0.0)?)?;
    let plain = final_n1_by_phase(make_gaussian_pi_pulse(0.4, 1.0, 0.0)?)?;
    let worst = chirped.iter().copied().fold(0.0, f64::max);
    let hi = plain.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = plain.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(CriterionResult::new(
        "8",
        "chirped pi-pulse",
        worst < 0.02 && hi - lo > 0.05,
        format!(
            "chirped max final N1 = {worst:.4e} (< 0.02); unchirped spread = {:.4} (> 0.05)",
            hi - lo
        ),
    ))
}

pub fn bloch_fixed_point() -> Result<CriterionResult> {
    let p = TlsParams {
        omega0: 1.0,
        gamma1: 2e-4,
        gamma2: 0.02,
        delta0: 1.0,
    };
    let t_end = 4000.0;
    let drive = FnDrive::new(|_| 0.1, |_| 1.0, 0.0, t_end, 1.0);
    let tr = simulate_bloch_rwa(
        &p,
        &drive,
        BlochState::ground(),
        (0.0, t_end),
        &IntegratorConfig::adaptive(1e-10, 1e-12),
    )?;
    let got = tr.last()[0];
    // Δ* = Δ₀ / (1 + 4Ω₀²/(γ₁γ₂)) on resonance.
    let target = 1.0 / (1.0 + 4.0 * 0.01 / (2e-4 * 0.02));
    Ok(CriterionResult::new(
        "9",
        "Bloch fixed point",
        (got - target).abs() < 1e-6,
        format!(
            "Delta(T={t_end}) = {got:.6e}, Delta* = {target:.6e}, |diff| = {:.3e} (tol 1e-6)",
            (got - target).abs()
        ),
    ))
}

pub fn dissipative_chirp() -> Result<CriterionResult> {
    let p = TlsParams::dissipative();
    let run = |d: DriveField, solvers: &[Solver]| run_all(&ScenarioConfig::new("c10", p, d, solvers)).map(|r| r.1);
    let chirped = run(
        make_chirped_pi_pulse(0.4, 1.0, 0.0)?,
        &[Solver::NumericBloch, Solver::Avg2],
    )?;
    let plain = run(make_gaussian_pi_pulse(0.4, 1.0, 0.0)?, &[Solver::NumericBloch])?;
    let min = |o: &SolverOutput| o.n1.iter().copied().fold(f64::INFINITY, f64::min);
    let (mc, mp) = (min(&chirped[0]), min(&plain[0]));
    let dev = max_abs_diff(&chirped[0].n1, &chirped[1].n1);
    Ok(CriterionResult::new(
        "10",
        "dissipative chirped advantage",
        mc < mp && dev < 0.02,
        format!(
            "min N1 chirped = {mc:.4e} vs unchirped = {mp:.4e}; max |avg2+corrections - numeric| = {dev:.4} (< 0.02)"
        ),
    ))
}

pub fn pulse_areas() -> Result<CriterionResult> {
    let designs = [
        make_gaussian_pi_pulse(0.1, 1.0, 0.0)?,
        make_gaussian_pi_pulse(0.5, 1.1, 0.0)?,
        make_chirped_pi_pulse(0.4, 1.0, 0.0)?,
        make_shaped_pi_pulse(0.1, 1.0, 0.0)?,
    ];
    let mut worst = 0.0_f64;
    for d in &designs {
        worst = worst.max((verify_pulse_area(d, 2).per_pulse[0] - PI).abs());
    }
    let train = verify_pulse_area(&shaped_train()?, 2);
    let mut worst_train = 0.0_f64;
    for (k, (a, c)) in train.per_pulse.iter().zip(&train.cumulative_after).enumerate() {
        worst = worst.max((a - PI).abs());
        worst_train = worst_train.max((c - PI * (k + 1) as f64).abs());
    }
    Ok(CriterionResult::new(
        "11",
        "pulse areas",
        worst < 1e-6 && worst_train < 1e-6,
        format!("max |area - pi| = {worst:.3e}; max |cumulative - k pi| = {worst_train:.3e} (tol 1e-6)"),
    ))
}

pub fn averaged_phase_invariance() -> Result<CriterionResult> {
    let p = TlsParams::dissipative();
    let base = make_chirped_pi_pulse(0.4, 1.0, 0.0)?;
    let span = (0.0, base.natural_end().unwrap());
    let cfg = IntegratorConfig::default().with_stride(16);
    let deltas = |phi: f64, second: bool| -> Result<Vec<f64>> {
        let drive = PreparedDrive::new(&base.with_phase_shift(phi))?;
        let tr = if second {
            tlsim::bloch::simulate_bloch_avg2(&p, &drive, BlochState::ground(), span, &cfg)?
        } else {
            simulate_bloch_rwa(&p, &drive, BlochState::ground(), span, &cfg)?
        };
        Ok(tr.states.iter().map(|s| s[0]).collect())
    };
    let mut worst = 0.0_f64;
    for second in [false, true] {
        let reference = deltas(0.0, second)?;
        for k in 1..16 {
            worst = worst.max(max_abs_diff(&reference, &deltas(2.0 * PI * k as f64 / 16.0, second)?));
        }
    }
    Ok(CriterionResult::new(
        "12",
        "phase invariance of averaged dynamics",
        worst < 1e-12,
        format!("max |Delta(phi) - Delta(0)| = {worst:.3e} over 16 phases, first and second order (tol 1e-12)"),
    ))
}

fn guarded(id: &str, name: &'static str, r: Result<CriterionResult>) -> CriterionResult {
    r.unwrap_or_else(|e| CriterionResult::new(id, name, false, format!("error: {e}")))
}

/// Runs every criterion in order. Errors become failing entries.
pub fn run_all_criteria() -> Vec<CriterionResult> {
    let mut out = vec![
        guarded("1", "norm conservation", norm_conservation()),
        guarded("2", "RWA closed form = RWA ODE", rwa_closed_form_matches_ode()),
    ];
    match bloch_siegert_resonance() {
        Ok(v) => out.extend(v),
        Err(e) => out.push(CriterionResult::new(
            "3",
            "Bloch-Siegert resonance",
            false,
            format!("error: {e}"),
        )),
    }
    out.extend([
        guarded("4", "second order beats RWA", avg2_beats_rwa()),
        guarded(
            "5",
            "naive perturbation does not improve on RWA",
            naive_does_not_improve(),
        ),
        guarded("6", "shaped pi-pulses", shaped_pulses()),
        guarded("7", "off-design pulse trains", off_design_failures()),
        guarded("8", "chirped pi-pulse", chirped_pi_pulse()),
        guarded("9", "Bloch fixed point", bloch_fixed_point()),
        guarded("10", "dissipative chirped advantage", dissipative_chirp()),
        guarded("11", "pulse areas", pulse_areas()),
        guarded(
            "12",
            "phase invariance of averaged dynamics",
            averaged_phase_invariance(),
        ),
    ]);
    out
}
