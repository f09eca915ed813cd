use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use tlsim::pulsecraft::{
    make_chirped_pi_pulse, make_gaussian_pi_pulse, make_pulse_train_with, make_shaped_pi_pulse, verify_pulse_area,
};
use tlsim::{CarrierPhase, IntegratorConfig};
use tlsim_cli::config::GridSpec;
use tlsim_cli::manifest::verify_manifest;
use tlsim_cli::run::run_sweep_scenario;
use tlsim_cli::{acceptance, figures, run_scenario, Result, ScenarioConfig, Solver, SweepAxis, SweepSpec};

#[derive(Parser)]
#[command(name = "tlsim", version, about = "Driven two-level system simulator")]
struct Cli {
    /// Output root directory.
    #[arg(long, global = true, env = "TLSIM_OUT", default_value = "tlsim-out")]
    out: PathBuf,
    #[command(subcommand)]
    command: Command,
}

/// Flags that override fields of a scenario file.
#[derive(clap::Args)]
struct Overrides {
    /// Scenario JSON file.
    config: PathBuf,
    #[arg(long)]
    name: Option<String>,
    /// Replaces the solver list; repeat or comma-separate.
    #[arg(long, value_delimiter = ',')]
    solver: Vec<SolverArg>,
    #[arg(long, num_args = 2, value_names = ["START", "END"])]
    span: Option<Vec<f64>>,
    /// Fixed RK4 step.
    #[arg(long, conflicts_with = "adaptive")]
    step: Option<f64>,
    /// Adaptive integration with this relative and absolute tolerance.
    #[arg(long)]
    adaptive: Option<f64>,
    #[arg(long)]
    rows: Option<usize>,
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum SolverArg {
    NumericFull,
    NumericBloch,
    Rwa,
    Avg2,
    Naive,
}

impl From<SolverArg> for Solver {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::NumericFull => Solver::NumericFull,
            SolverArg::NumericBloch => Solver::NumericBloch,
            SolverArg::Rwa => Solver::Rwa,
            SolverArg::Avg2 => Solver::Avg2,
            SolverArg::Naive => Solver::Naive,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PulseKind {
    Gaussian,
    Chirped,
    Shaped,
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum CarrierArg {
    Continuous,
    PerPulse,
}

#[derive(Subcommand)]
enum Command {
    /// Run every solver in a scenario and write one CSV per solver.
    Simulate(Overrides),
    /// Final ground population versus driving phase.
    SweepPhase {
        #[command(flatten)]
        cfg: Overrides,
        #[arg(long, default_value_t = 64)]
        points: usize,
    },
    /// Peak excited population versus carrier frequency.
    SweepFrequency {
        #[command(flatten)]
        cfg: Overrides,
        #[arg(long)]
        start: f64,
        #[arg(long)]
        stop: f64,
        #[arg(long)]
        points: usize,
    },
    /// Print a designed pi-pulse (or train) as drive JSON.
    DesignPulse {
        #[arg(value_enum)]
        kind: PulseKind,
        /// Peak half-amplitude (gaussian, chirped).
        #[arg(long, default_value_t = 0.1)]
        amplitude: f64,
        /// Carrier (gaussian) or transition frequency (chirped, shaped).
        #[arg(long, default_value_t = 1.0)]
        omega: f64,
        /// Blue detuning of the shaped design.
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        #[arg(long, default_value_t = 0.0)]
        phase0: f64,
        /// Repeat the pulse this many times.
        #[arg(long, default_value_t = 1)]
        train: usize,
        /// Centre-to-centre spacing in units of sigma0.
        #[arg(long, default_value_t = tlsim::pulsecraft::DEFAULT_SPACING_SIGMAS)]
        spacing: f64,
        #[arg(long, value_enum, default_value_t = CarrierArg::Continuous)]
        carrier_phase: CarrierArg,
    },
    /// Write a reference figure's datasets and plot script.
    Reproduce {
        /// fig1..fig8, or `all`.
        figure: String,
    },
    /// Run the acceptance suite.
    Verify,
    /// Recompute the checksums listed in a manifest.
    CheckManifest { manifest: PathBuf },
}

fn load(o: &Overrides) -> Result<ScenarioConfig> {
    let mut cfg = ScenarioConfig::load(&o.config)?;
    if let Some(n) = &o.name {
        cfg.name = n.clone();
    }
    if !o.solver.is_empty() {
        cfg.solvers = o.solver.iter().map(|&s| s.into()).collect();
    }
    if let Some(s) = &o.span {
        cfg.span = Some([s[0], s[1]]);
    }
    if let Some(h) = o.step {
        cfg.integrator = IntegratorConfig::fixed(h);
    }
    if let Some(tol) = o.adaptive {
        cfg.integrator = IntegratorConfig::adaptive(tol, tol);
    }
    if let Some(r) = o.rows {
        cfg.output.rows = r;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Simulate(o) => {
            let cfg = load(&o)?;
            let r = run_scenario(&cfg, &cli.out)?;
            for o in &r.outputs {
                println!("{:<14} final N1 = {:.10}", o.solver.name(), o.final_n1());
            }
            println!("manifest: {}", r.manifest.display());
        }
        Command::SweepPhase { cfg, points } => {
            let mut c = load(&cfg)?;
            c.sweep = Some(SweepSpec::phase(points));
            let (r, m) = run_sweep_scenario(&c, &cli.out, "sweep_phase")?;
            println!("{}", serde_json::to_string_pretty(&r.summary()).unwrap());
            println!("manifest: {}", m.display());
        }
        Command::SweepFrequency {
            cfg,
            start,
            stop,
            points,
        } => {
            let mut c = load(&cfg)?;
            c.sweep = Some(SweepSpec {
                axis: SweepAxis::Carrier,
                grid: Some(GridSpec {
                    start,
                    stop,
                    points,
                    endpoint: true,
                }),
                values: None,
            });
            c.validate()?;
            let (r, m) = run_sweep_scenario(&c, &cli.out, "sweep_frequency")?;
            println!("{}", serde_json::to_string_pretty(&r.summary()).unwrap());
            println!("manifest: {}", m.display());
        }
        Command::DesignPulse {
            kind,
            amplitude,
            omega,
            delta,
            phase0,
            train,
            spacing,
            carrier_phase,
        } => {
            let pulse = match kind {
                PulseKind::Gaussian => make_gaussian_pi_pulse(amplitude, omega, phase0)?,
                PulseKind::Chirped => make_chirped_pi_pulse(amplitude, omega, phase0)?,
                PulseKind::Shaped => make_shaped_pi_pulse(delta, omega, phase0)?,
            };
            let d = if train > 1 {
                let sigma0 = pulse.envelope_shape().expect("single pulse").sigma0;
                let cp = match carrier_phase {
                    CarrierArg::Continuous => CarrierPhase::Continuous,
                    CarrierArg::PerPulse => CarrierPhase::PerPulse,
                };
                make_pulse_train_with(&pulse, train, spacing * sigma0, cp)?
            } else {
                pulse
            };
            let areas = verify_pulse_area(&d, 2);
            println!("{}", serde_json::to_string_pretty(&d).unwrap());
            eprintln!("areas per pulse: {:?}", areas.per_pulse);
            eprintln!("cumulative areas: {:?}", areas.cumulative_after);
        }
        Command::Reproduce { figure } => {
            let ids: Vec<&str> = if figure == "all" {
                figures::FIGURES.to_vec()
            } else {
                vec![figure.as_str()]
            };
            for id in ids {
                let r = figures::reproduce_figure(id, &cli.out)?;
                println!(
                    "{}: {} files in {} (manifest {})",
                    r.id,
                    r.files.len(),
                    r.dir.display(),
                    r.manifest.display()
                );
            }
        }
        Command::Verify => {
            let results = acceptance::run_all_criteria();
            for r in &results {
                println!("{}", r.line());
            }
            let failed = results.iter().filter(|r| !r.passed && r.id != "3s").count();
            println!("{} of {} criteria passed", 12 - failed, 12);
            return Ok(failed == 0);
        }
        Command::CheckManifest { manifest } => {
            let checks = verify_manifest(&manifest)?;
            for c in &checks {
                println!("{} {}: {}", if c.ok { "ok  " } else { "BAD " }, c.file, c.detail);
            }
            return Ok(checks.iter().all(|c| c.ok));
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
