//! Datasets and plot scripts for the eight reference figures.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde_json::json;
use tlsim::csv::Table;
use tlsim::pulsecraft::{make_chirped_pi_pulse, make_gaussian_pi_pulse, shaped_amplitude, verify_pulse_area};
use tlsim::{CarrierPhase, DriveField, PreparedDrive, TlsParams};

use crate::acceptance::{off_design_train, shaped_train};
use crate::config::{ScenarioConfig, Solver, SweepSpec};
use crate::error::{CliError, Result};
use crate::manifest::{FileTags, OutputDir};
use crate::run::tags;
use crate::solvers::run_all;
use crate::sweep::sweep_phase;

pub const FIGURES: [&str; 8] = ["fig1", "fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8"];

struct Curve {
    file: String,
    x: String,
    y: String,
    label: String,
}

struct Panel {
    title: String,
    xlabel: &'static str,
    ylabel: &'static str,
    curves: Vec<Curve>,
}

impl Panel {
    fn new(title: impl Into<String>, xlabel: &'static str, ylabel: &'static str) -> Self {
        Self {
            title: title.into(),
            xlabel,
            ylabel,
            curves: Vec::new(),
        }
    }

    fn curve(&mut self, file: &str, x: &str, y: &str, label: impl Into<String>) {
        self.curves.push(Curve {
            file: file.to_owned(),
            x: x.to_owned(),
            y: y.to_owned(),
            label: label.into(),
        });
    }
}

fn plot_script(id: &str, panels: &[Panel]) -> String {
    let mut s = String::new();
    s.push_str("#!/usr/bin/env python3\n");
    let _ = writeln!(s, "\"\"\"Plots {id} from the CSV files next to this script.\"\"\"");
    s.push_str(
        "import csv\nimport os\n\nimport matplotlib\nmatplotlib.use(\"Agg\")\nimport matplotlib.pyplot as plt\n\n",
    );
    s.push_str("HERE = os.path.dirname(os.path.abspath(__file__))\n\n\n");
    s.push_str("def column(name, key):\n    with open(os.path.join(HERE, name), newline=\"\") as f:\n        return [float(row[key]) for row in csv.DictReader(f)]\n\n\n");
    let _ = writeln!(
        s,
        "fig, axes = plt.subplots({n}, 1, figsize=(7, {h}), squeeze=False)",
        n = panels.len(),
        h = 3 * panels.len()
    );
    for (i, p) in panels.iter().enumerate() {
        let _ = writeln!(s, "ax = axes[{i}][0]");
        for c in &p.curves {
            let _ = writeln!(
                s,
                "ax.plot(column({f:?}, {x:?}), column({f:?}, {y:?}), label={l:?})",
                f = c.file,
                x = c.x,
                y = c.y,
                l = c.label
            );
        }
        let _ = writeln!(s, "ax.set_title({:?})", p.title);
        let _ = writeln!(s, "ax.set_xlabel({:?})", p.xlabel);
        let _ = writeln!(s, "ax.set_ylabel({:?})", p.ylabel);
        s.push_str("ax.legend()\n");
    }
    let _ = writeln!(
        s,
        "fig.tight_layout()\nfig.savefig(os.path.join(HERE, \"{id}.png\"), dpi=150)"
    );
    s
}

#[derive(Debug)]
pub struct FigureReport {
    pub id: String,
    pub dir: PathBuf,
    pub manifest: PathBuf,
    pub files: Vec<String>,
}

struct Builder {
    id: String,
    out: OutputDir,
    panels: Vec<Panel>,
    configs: Vec<serde_json::Value>,
    summary: serde_json::Map<String, serde_json::Value>,
}

impl Builder {
    /// Runs `cfg` and writes `<cfg.name>_<solver>.csv`; adds an N₁ panel.
    fn trajectories(&mut self, cfg: ScenarioConfig, title: &str) -> Result<Vec<crate::solvers::SolverOutput>> {
        let (_, outs) = run_all(&cfg)?;
        let mut panel = Panel::new(title, "t", "N1");
        for o in &outs {
            let file = format!("{}_{}.csv", cfg.name, o.solver.name());
            self.out.write(&file, &o.table.render(), tags(o))?;
            panel.curve(&file, "t", "n1", o.solver.name());
        }
        let finals: serde_json::Map<_, _> = outs
            .iter()
            .map(|o| (o.solver.name().to_owned(), json!(o.final_n1())))
            .collect();
        self.summary.insert(format!("{}_final_n1", cfg.name), json!(finals));
        self.configs
            .push(serde_json::to_value(&cfg).expect("config serializes"));
        self.panels.push(panel);
        Ok(outs)
    }

    fn phase_sweep(&mut self, cfg: ScenarioConfig, title: &str) -> Result<()> {
        let r = sweep_phase(&cfg, &SweepSpec::phase(64).points()?)?;
        let file = format!("{}_sweep.csv", cfg.name);
        self.out.write(&file, &r.table().render(), FileTags::default())?;
        let mut panel = Panel::new(title, "phase0", "final N1");
        for s in &r.solvers {
            panel.curve(&file, "phase0", &format!("final_n1_{}", s.name()), s.name());
        }
        self.summary.insert(format!("{}_sweep", cfg.name), r.summary());
        self.configs
            .push(serde_json::to_value(&cfg).expect("config serializes"));
        self.panels.push(panel);
        Ok(())
    }

    /// Field, envelope, instantaneous frequency, carrier phase excess
    /// `Φ − ω₀t` and cumulative envelope area.
    fn drive_diagnostics(&mut self, name: &str, d: &DriveField, omega0: f64, span: (f64, f64)) -> Result<()> {
        let prepared = PreparedDrive::new(d)?;
        let rows = 2000;
        let area = verify_pulse_area(d, rows);
        let mut t = Table::new(&["t", "field", "envelope", "inst_freq", "phase_excess", "area"]);
        let mut excess = 0.0;
        let mut prev = span.0;
        for k in 0..rows {
            let time = span.0 + (span.1 - span.0) * k as f64 / (rows - 1) as f64;
            if k > 0 {
                // Trapezoid on a fine subgrid is plenty for a plotted curve.
                let m = 16;
                let h = (time - prev) / m as f64;
                for j in 0..m {
                    let a = prev + j as f64 * h;
                    excess += 0.5 * h * (prepared.frequency(a) + prepared.frequency(a + h) - 2.0 * omega0);
                }
            }
            prev = time;
            let a = interp(&area.curve, time);
            t.push(&[
                time,
                prepared.field(time),
                prepared.envelope(time),
                prepared.frequency(time),
                excess,
                a,
            ]);
        }
        let file = format!("{name}_drive.csv");
        self.out.write(&file, &t.render(), FileTags::default())?;
        let mut p = Panel::new(format!("{name}: field and envelope"), "t", "amplitude");
        p.curve(&file, "t", "field", "F(t)");
        p.curve(&file, "t", "envelope", "Omega0(t)");
        self.panels.push(p);
        let mut p = Panel::new(format!("{name}: carrier"), "t", "frequency / phase");
        p.curve(&file, "t", "inst_freq", "omega(t)");
        p.curve(&file, "t", "phase_excess", "Phi - omega0 t");
        self.panels.push(p);
        let mut p = Panel::new(format!("{name}: envelope area"), "t", "area");
        p.curve(&file, "t", "area", "A(t)");
        self.panels.push(p);
        self.summary.insert(
            format!("{name}_areas"),
            json!({ "per_pulse": area.per_pulse, "cumulative_after": area.cumulative_after }),
        );
        Ok(())
    }

    fn finish(self, started: Instant) -> Result<FigureReport> {
        let Builder {
            id,
            mut out,
            panels,
            configs,
            summary,
        } = self;
        out.write(&format!("{id}.py"), &plot_script(&id, &panels), FileTags::default())?;
        let files = out.files().iter().map(|f| f.file.clone()).collect();
        let dir = out.path().to_owned();
        let manifest = out.finish(
            &id,
            "figure",
            json!(configs),
            json!(summary),
            started.elapsed().as_secs_f64(),
        )?;
        Ok(FigureReport {
            id,
            dir,
            manifest,
            files,
        })
    }
}

fn interp(curve: &[(f64, f64)], t: f64) -> f64 {
    let k = curve.partition_point(|p| p.0 <= t).clamp(1, curve.len() - 1);
    let ((t0, a0), (t1, a1)) = (curve[k - 1], curve[k]);
    if t1 == t0 {
        return a1;
    }
    a0 + (a1 - a0) * ((t - t0) / (t1 - t0)).clamp(0.0, 1.0)
}

fn cw(name: &str, omega: f64, solvers: &[Solver], end: f64) -> ScenarioConfig {
    ScenarioConfig::new(name, TlsParams::default(), DriveField::cw(omega, 0.1), solvers).with_span(0.0, end)
}

/// Writes the datasets and plot script for `id` under `root/<id>`.
pub fn reproduce_figure(id: &str, root: &Path) -> Result<FigureReport> {
    if !FIGURES.contains(&id) {
        return Err(CliError::UnknownFigure(id.to_owned()));
    }
    let started = Instant::now();
    let mut b = Builder {
        id: id.to_owned(),
        out: OutputDir::create(&root.join(id))?,
        panels: Vec::new(),
        configs: Vec::new(),
        summary: serde_json::Map::new(),
    };
    use Solver::*;
    let lossless = TlsParams::default();
    match id {
        "fig1" => {
            b.trajectories(
                cw("fig1", 1.0, &[NumericFull, Rwa], 300.0),
                "Omega0 = 0.1, omega = omega0 = 1: numeric vs RWA",
            )?;
        }
        "fig2" => {
            b.trajectories(
                cw("fig2", 1.2, &[NumericFull, Rwa, Naive], 100.0),
                "Omega0 = 0.1, omega = 1.2: naive perturbation",
            )?;
        }
        "fig3" => {
            b.trajectories(
                cw("fig3", 1.0, &[NumericFull, Rwa, Avg2], 300.0),
                "Omega0 = 0.1, omega = 1: second-order averaging",
            )?;
        }
        "fig4" => {
            let chirped = make_chirped_pi_pulse(0.4, 1.0, 0.0)?;
            let plain = make_gaussian_pi_pulse(0.4, 1.0, 0.0)?;
            b.trajectories(
                ScenarioConfig::new("fig4_chirped", lossless, chirped.clone(), &[NumericFull, Avg2]),
                "chirped pi-pulse, Omega0 = 0.4",
            )?;
            b.phase_sweep(
                ScenarioConfig::new("fig4_chirped", lossless, chirped, &[NumericFull, Avg2]),
                "chirped: final N1 vs phase",
            )?;
            b.phase_sweep(
                ScenarioConfig::new("fig4_unchirped", lossless, plain, &[NumericFull, Avg2]),
                "unchirped omega = 1: final N1 vs phase",
            )?;
        }
        "fig5" => {
            let p = TlsParams::dissipative();
            let chirped = make_chirped_pi_pulse(0.4, 1.0, 0.0)?;
            let span = (0.0, chirped.natural_end().unwrap());
            b.trajectories(
                ScenarioConfig::new("fig5_chirped", p, chirped.clone(), &[NumericBloch, Rwa, Avg2]),
                "dissipative, chirped pi-pulse",
            )?;
            b.trajectories(
                ScenarioConfig::new(
                    "fig5_unchirped",
                    p,
                    make_gaussian_pi_pulse(0.4, 1.0, 0.0)?,
                    &[NumericBloch],
                ),
                "dissipative, unchirped resonant pi-pulse",
            )?;
            b.drive_diagnostics("fig5_chirped", &chirped, 1.0, span)?;
        }
        "fig6" => {
            let train = shaped_train()?;
            let span = (0.0, train.natural_end().unwrap());
            b.trajectories(
                ScenarioConfig::new("fig6", lossless, train.clone(), &[NumericFull, Rwa, Avg2]),
                "three shaped pi-pulses, omega = 1.1",
            )?;
            b.drive_diagnostics("fig6", &train, 1.0, span)?;
            b.summary
                .insert("shaped_amplitude".into(), json!(shaped_amplitude(0.1, 1.1)?));
        }
        "fig7" => {
            b.trajectories(
                ScenarioConfig::new(
                    "fig7",
                    lossless,
                    off_design_train(0.5, CarrierPhase::PerPulse)?,
                    &[NumericFull, Rwa, Avg2],
                ),
                "three pi-pulses, Omega0 = 0.5, omega = 1.1",
            )?;
            b.trajectories(
                ScenarioConfig::new(
                    "fig7_omega0_0p1",
                    lossless,
                    off_design_train(0.1, CarrierPhase::Continuous)?,
                    &[NumericFull, Rwa, Avg2],
                ),
                "three pi-pulses, Omega0 = 0.1, omega = 1.1",
            )?;
        }
        "fig8" => {
            let shaped = shaped_amplitude(0.1, 1.1)?;
            for (name, amp) in [("fig8_a", 0.1), ("fig8_b", shaped), ("fig8_c", 0.5)] {
                let d = make_gaussian_pi_pulse(amp, 1.1, 0.0)?;
                b.phase_sweep(
                    ScenarioConfig::new(name, lossless, d, &[NumericFull, Avg2]),
                    &format!("Omega0 = {amp:.6}, omega = 1.1"),
                )?;
            }
        }
        _ => unreachable!("checked above"),
    }
    b.finish(started)
}
