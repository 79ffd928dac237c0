//! Forward and inverse runs driven by an [`ExperimentConfig`].

use std::path::{Path, PathBuf};

use super::config::ExperimentConfig;
use super::io::{write_boundary_csv, write_history_csv, BOUNDARY_SAMPLES};
use super::metrics::{boundary_error, BoundaryError};
use super::shapes::ShapeSpec;
use super::svg::{render_svg, Overlay};
use crate::elastic::PointSource;
use crate::error::{Error, Result};
use crate::forward::{add_noise, disk_series, simulate_with, ScatterRecord, SimulationReport};
use crate::newton::{reconstruct, ReconRun, StarCurve};
use crate::types::Vec2;

pub struct ForwardOutput {
    /// Clean data with the configured noise applied.
    pub record: ScatterRecord,
    pub clean: ScatterRecord,
    pub report: SimulationReport,
}

/// Simulate the configured obstacle and add noise with `cfg.seed`.
pub fn run_forward(cfg: &ExperimentConfig) -> Result<ForwardOutput> {
    cfg.validate()?;
    let shape = cfg.shape.curve();
    let (clean, report) = simulate_with(
        &shape,
        &cfg.source_list()?,
        &cfg.sys()?,
        cfg.receivers.rho,
        cfg.receivers.count,
        cfg.aperture()?,
        &cfg.mfs,
    )?;
    let record = add_noise(&clean, cfg.noise.delta, cfg.seed)?;
    Ok(ForwardOutput { record, clean, report })
}

/// Largest deviation of a disk record from the analytic series, relative to
/// the largest series value. `None` for other shapes.
pub fn disk_oracle_error(shape: &ShapeSpec, rec: &ScatterRecord) -> Result<Option<f64>> {
    let ShapeSpec::Disk { radius, center } = shape else {
        return Ok(None);
    };
    let shift = Vec2::new(center[0], center[1]);
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for (s, src) in rec.sources.iter().enumerate() {
        let moved = PointSource { location: src.location - shift, polarization: src.polarization };
        let series = disk_series(*radius, &moved, &rec.sys, crate::forward::DEFAULT_DISK_MODES)?;
        for (i, &t) in rec.receivers.iter().enumerate() {
            let x = Vec2::new(t.cos(), t.sin()) * rec.rho - shift;
            let exact = series.field(&x)?;
            scale = scale.max(exact.norm());
            worst = worst.max((rec.values[s][i] - exact).norm());
        }
    }
    Ok(Some(worst / scale))
}

/// Refuse a record whose physics or acquisition differ from the config.
pub fn check_consistency(cfg: &ExperimentConfig, rec: &ScatterRecord) -> Result<()> {
    let mut diffs = Vec::new();
    let sys = cfg.sys()?;
    let pairs = [
        ("physics.lambda", sys.lambda, rec.sys.lambda),
        ("physics.mu", sys.mu, rec.sys.mu),
        ("physics.omega", sys.omega, rec.sys.omega),
        ("receivers.rho", cfg.receivers.rho, rec.rho),
    ];
    for (name, want, got) in pairs {
        if (want - got).abs() > 1e-12 * want.abs().max(1.0) {
            diffs.push(format!("{name}: config {want}, record {got}"));
        }
    }
    if cfg.sources.count != rec.sources.len() {
        diffs.push(format!("sources.count: config {}, record {}", cfg.sources.count, rec.sources.len()));
    }
    if diffs.is_empty() {
        Ok(())
    } else {
        Err(Error::config("record", format!("does not match the config: {}", diffs.join("; "))))
    }
}

pub fn run_reconstruct(cfg: &ExperimentConfig, rec: &ScatterRecord) -> Result<ReconRun> {
    cfg.validate()?;
    check_consistency(cfg, rec)?;
    reconstruct(rec, &cfg.reconstruction)
}

pub fn reconstruction_error(cfg: &ExperimentConfig, run: &ReconRun) -> BoundaryError {
    boundary_error(&cfg.shape.curve(), run.final_curve())
}

/// `run.json`, `boundary.csv`, `history.csv` and `reconstruction.svg`.
pub fn write_run_artifacts(dir: &Path, cfg: &ExperimentConfig, rec: &ScatterRecord, run: &ReconRun) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let paths: Vec<PathBuf> = ["run.json", "boundary.csv", "history.csv", "reconstruction.svg"]
        .iter()
        .map(|f| dir.join(f))
        .collect();
    std::fs::write(&paths[0], run.to_json()?)?;
    write_boundary_csv(std::fs::File::create(&paths[1])?, run.final_curve(), BOUNDARY_SAMPLES)?;
    write_history_csv(std::fs::File::create(&paths[2])?, run)?;
    let truth = cfg.shape.curve();
    let initial: &StarCurve = &run.iterates[0];
    let svg = render_svg(&Overlay {
        truth: Some(&truth),
        initial,
        reconstruction: run.final_curve(),
        rho: rec.rho,
        aperture: rec.aperture,
        sources: &rec.sources,
        title: format!(
            "{} omega={} delta={} {:?} after {} iterations",
            cfg.shape.name(),
            rec.sys.omega,
            cfg.noise.delta,
            run.termination,
            run.iterations()
        ),
    });
    std::fs::write(&paths[3], svg)?;
    Ok(paths)
}
