//! Aperture x noise x seed grids.

use std::io::Write;

use serde::Serialize;

use super::config::ExperimentConfig;
use super::metrics::boundary_error;
use crate::error::{Error, Result};
use crate::forward::{add_noise, simulate_with, Aperture, ScatterRecord};
use crate::newton::reconstruct;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub aperture_lo: f64,
    pub aperture_hi: f64,
    pub delta: f64,
    pub seed: u64,
    pub termination: String,
    pub iterations: usize,
    pub metric: String,
    pub error: f64,
    pub message: String,
}

pub const SWEEP_HEADER: [&str; 9] =
    ["aperture_lo", "aperture_hi", "delta", "seed", "termination", "iterations", "metric", "error", "message"];

struct Cell {
    aperture: usize,
    delta: f64,
    seed: u64,
}

fn failed(ap: [f64; 2], delta: f64, seed: u64, e: &Error) -> SweepRow {
    SweepRow {
        aperture_lo: ap[0],
        aperture_hi: ap[1],
        delta,
        seed,
        termination: "error".into(),
        iterations: 0,
        metric: String::new(),
        error: f64::NAN,
        message: e.to_string(),
    }
}

/// Truncation uses the cell's noise level; a noise-free cell falls back to
/// the configured `reconstruction.delta`.
fn run_cell(cfg: &ExperimentConfig, ap: [f64; 2], clean: &Result<ScatterRecord>, delta: f64, seed: u64) -> SweepRow {
    let outcome = clean.as_ref().map_err(|e| Error::Solve(e.to_string())).and_then(|rec| {
        let noisy = add_noise(rec, delta, seed)?;
        let mut rc = cfg.reconstruction.clone();
        if delta > 0.0 {
            rc.delta = delta;
        }
        reconstruct(&noisy, &rc)
    });
    match outcome {
        Ok(run) => {
            let err = boundary_error(&cfg.shape.curve(), run.final_curve());
            SweepRow {
                aperture_lo: ap[0],
                aperture_hi: ap[1],
                delta,
                seed,
                termination: format!("{:?}", run.termination).to_lowercase(),
                iterations: run.iterations(),
                metric: err.metric.name().into(),
                error: err.value,
                message: run.message.unwrap_or_default(),
            }
        }
        Err(e) => failed(ap, delta, seed, &e),
    }
}

/// Every cell of `cfg.sweep`, in aperture-major, then delta, then seed order.
/// Cell failures become rows; the sweep continues.
pub fn run_sweep(cfg: &ExperimentConfig, workers: usize) -> Result<Vec<SweepRow>> {
    cfg.validate()?;
    let grid = &cfg.sweep;
    let cells: Vec<Cell> = (0..grid.apertures.len())
        .flat_map(|a| {
            grid.deltas
                .iter()
                .flat_map(move |&d| grid.seeds.iter().map(move |&s| Cell { aperture: a, delta: d, seed: s }))
        })
        .collect();
    if cells.is_empty() {
        return Ok(Vec::new());
    }
    let sys = cfg.sys()?;
    let sources = cfg.source_list()?;
    let shape = cfg.shape.curve();
    let simulate = |ap: &[f64; 2]| -> Result<ScatterRecord> {
        let aperture = Aperture::new(ap[0], ap[1])?;
        simulate_with(&shape, &sources, &sys, cfg.receivers.rho, cfg.receivers.count, aperture, &cfg.mfs).map(|r| r.0)
    };
    let work = || -> Vec<SweepRow> {
        let records: Vec<Result<ScatterRecord>> = grid.apertures.iter().map(simulate).collect();
        let cell = |c: &Cell| run_cell(cfg, grid.apertures[c.aperture], &records[c.aperture], c.delta, c.seed);
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            cells.par_iter().map(cell).collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            cells.iter().map(cell).collect()
        }
    };
    #[cfg(feature = "parallel")]
    {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers.max(1))
            .build()
            .map_err(|e| Error::config("workers", e.to_string()))?;
        Ok(pool.install(work))
    }
    #[cfg(not(feature = "parallel"))]
    {
        let _ = workers;
        Ok(work())
    }
}

pub fn write_sweep_csv<W: Write>(out: W, rows: &[SweepRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for r in rows {
        w.write_record([
            r.aperture_lo.to_string(),
            r.aperture_hi.to_string(),
            r.delta.to_string(),
            r.seed.to_string(),
            r.termination.clone(),
            r.iterations.to_string(),
            r.metric.clone(),
            r.error.to_string(),
            r.message.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
