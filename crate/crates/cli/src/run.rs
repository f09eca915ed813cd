//! Scenario execution: CSVs per solver plus a manifest.

use std::path::{Path, PathBuf};
use std::time::Instant;

use log::info;
use serde_json::json;

use crate::config::ScenarioConfig;
use crate::error::Result;
use crate::manifest::{FileTags, OutputDir};
use crate::solvers::{run_all, SolverOutput};
use crate::sweep::{run_sweep, SweepResult};

#[derive(Debug)]
pub struct RunReport {
    pub dir: PathBuf,
    pub manifest: PathBuf,
    pub outputs: Vec<SolverOutput>,
    pub sweep: Option<SweepResult>,
}

pub fn output_dir(cfg: &ScenarioConfig, root: &Path) -> PathBuf {
    match &cfg.output.dir {
        Some(d) => root.join(d),
        None => root.to_owned(),
    }
}

pub(crate) fn tags(o: &SolverOutput) -> FileTags {
    FileTags {
        solver: Some(o.solver.name().to_owned()),
        frame: Some(o.frame.name().to_owned()),
        method: Some(serde_json::to_value(o.method).unwrap().as_str().unwrap().to_owned()),
    }
}

/// Runs every solver (and the sweep, if configured) and writes
/// `<name>_<solver>.csv`, `<name>_sweep.csv` and `<name>_manifest.json`.
pub fn run_scenario(cfg: &ScenarioConfig, root: &Path) -> Result<RunReport> {
    let started = Instant::now();
    cfg.validate()?;
    let mut out = OutputDir::create(&output_dir(cfg, root))?;
    let (grid, outputs) = run_all(cfg)?;
    for o in &outputs {
        let name = format!("{}_{}.csv", cfg.name, o.solver.name());
        let path = out.write(&name, &o.table.render(), tags(o))?;
        info!("wrote {}", path.display());
    }
    let sweep = match &cfg.sweep {
        Some(spec) => {
            let r = run_sweep(cfg, spec.axis, &spec.points()?)?;
            out.write(
                &format!("{}_sweep.csv", cfg.name),
                &r.table().render(),
                FileTags::default(),
            )?;
            Some(r)
        }
        None => None,
    };
    let finals: serde_json::Map<_, _> = outputs
        .iter()
        .map(|o| (o.solver.name().to_owned(), json!(o.final_n1())))
        .collect();
    let summary = json!({
        "span": [grid.span.0, grid.span.1],
        "rows": grid.times.len(),
        "record_stride": grid.integrator.record_stride,
        "final_n1": finals,
        "sweep": sweep.as_ref().map(|s| s.summary()),
    });
    let dir = out.path().to_owned();
    let config = serde_json::to_value(cfg).expect("config serializes");
    let manifest = out.finish(&cfg.name, "simulate", config, summary, started.elapsed().as_secs_f64())?;
    Ok(RunReport {
        dir,
        manifest,
        outputs,
        sweep,
    })
}

/// Sweep only, for the dedicated subcommands.
pub fn run_sweep_scenario(cfg: &ScenarioConfig, root: &Path, kind: &str) -> Result<(SweepResult, PathBuf)> {
    let started = Instant::now();
    cfg.validate()?;
    let spec = cfg.sweep.as_ref().expect("sweep spec set by caller");
    let r = run_sweep(cfg, spec.axis, &spec.points()?)?;
    let mut out = OutputDir::create(&output_dir(cfg, root))?;
    let stem = format!("{}_{kind}", cfg.name);
    out.write(&format!("{stem}.csv"), &r.table().render(), FileTags::default())?;
    let config = serde_json::to_value(cfg).expect("config serializes");
    let manifest = out.finish(&stem, kind, config, r.summary(), started.elapsed().as_secs_f64())?;
    Ok((r, manifest))
}
