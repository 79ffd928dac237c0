//! Synthetic near-field data: MFS and disk solvers, measurement records and
//! the multiplicative noise model.

mod curve;
mod disk;
mod mfs;

use std::f64::consts::TAU;
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use curve::{
    centroid, contains, curvature, inward_normal, is_counterclockwise, max_radius, mean_radius,
    sample_curve, Circle, ParametricCurve,
};
pub use disk::{disk_series, incident_potential_coefficients, DiskSeries, DEFAULT_DISK_MODES};
pub use mfs::{charge_points, solve_mfs, MfsParams, MfsSolution, MfsSolver, MfsStatus, MFS_CUTOFF, MFS_WARN_LEVEL};

use crate::elastic::{LameSystem, PointSource};
use crate::error::{Error, Result};
use crate::types::{e_r, wrap_angle, DisplacementValue, Vec2};

/// Angular interval `[lo, hi)` covered by the receivers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aperture {
    pub lo: f64,
    pub hi: f64,
}

impl Default for Aperture {
    fn default() -> Self {
        Aperture::full()
    }
}

impl Aperture {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        let ap = Aperture { lo, hi };
        ap.validate()?;
        Ok(ap)
    }

    pub fn full() -> Self {
        Aperture { lo: 0.0, hi: TAU }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite()) || self.hi <= self.lo {
            return Err(Error::config("aperture", "need lo < hi"));
        }
        if self.hi - self.lo > TAU * (1.0 + 1e-12) {
            return Err(Error::config("aperture", "wider than a full turn"));
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn is_full(&self) -> bool {
        (self.width() - TAU).abs() <= 1e-12 * TAU
    }

    /// Whether direction `theta` lies in the closed arc.
    pub fn contains(&self, theta: f64) -> bool {
        self.is_full() || wrap_angle(theta - self.lo) <= self.width() + 1e-12
    }

    /// `n` equispaced angles `lo + (hi - lo) i / n`, wrapped into `[0, 2pi)`
    /// and sorted.
    pub fn receiver_angles(&self, n: usize) -> Vec<f64> {
        let mut th: Vec<f64> = (0..n)
            .map(|i| wrap_angle(self.lo + self.width() * i as f64 / n as f64))
            .collect();
        th.sort_by(f64::total_cmp);
        th
    }
}

/// Multi-source near-field measurements on the circle of radius `rho`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScatterRecord {
    pub rho: f64,
    pub sys: LameSystem,
    pub sources: Vec<PointSource>,
    pub receivers: Vec<f64>,
    /// `values[s][i]`: scattered field of source `s` at receiver `i`.
    pub values: Vec<Vec<DisplacementValue>>,
    pub aperture: Aperture,
}

/// The data of a single source, as consumed by the modal extraction.
#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub rho: f64,
    pub receivers: Vec<f64>,
    pub values: Vec<DisplacementValue>,
    pub aperture: Aperture,
}

impl Trace {
    pub fn receiver_point(&self, i: usize) -> Vec2 {
        e_r(self.receivers[i]) * self.rho
    }

    /// True if the receivers are `2 pi i / M` up to a common rotation.
    pub fn is_equispaced_full(&self) -> bool {
        let m = self.receivers.len();
        if !self.aperture.is_full() || m == 0 {
            return false;
        }
        let step = TAU / m as f64;
        self.receivers.windows(2).all(|w| ((w[1] - w[0]) - step).abs() < 1e-9)
    }
}

impl ScatterRecord {
    pub fn polarization(&self) -> Vec2 {
        self.sources
            .first()
            .map(|s| s.polarization)
            .unwrap_or_else(|| Vec2::new(0.5f64.sqrt(), 0.5f64.sqrt()))
    }

    pub fn trace(&self, source: usize) -> Trace {
        Trace {
            rho: self.rho,
            receivers: self.receivers.clone(),
            values: self.values[source].clone(),
            aperture: self.aperture,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.sys.validate()?;
        self.aperture.validate()?;
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(Error::config("rho", "must be positive"));
        }
        if self.values.len() != self.sources.len() {
            return Err(Error::config(
                "values",
                format!("{} rows for {} sources", self.values.len(), self.sources.len()),
            ));
        }
        for (s, row) in self.values.iter().enumerate() {
            if row.len() != self.receivers.len() {
                return Err(Error::config(
                    format!("values[{s}]"),
                    format!("{} entries for {} receivers", row.len(), self.receivers.len()),
                ));
            }
        }
        if self.receivers.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::config("receivers", "angles must be sorted"));
        }
        if self.receivers.iter().any(|t| !(0.0..TAU).contains(t)) {
            return Err(Error::config("receivers", "angles must lie in [0, 2pi)"));
        }
        let p = self.polarization();
        if (p.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::config("polarization", "must be a unit vector"));
        }
        if self.sources.iter().any(|s| s.polarization != p) {
            return Err(Error::config("sources", "all sources must share one polarization"));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        self.validate()?;
        Ok(serde_json::to_string_pretty(&RecordFile::from(self))?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: RecordFile = serde_json::from_str(text)?;
        let rec = file.into_record()?;
        rec.validate()?;
        Ok(rec)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[derive(Serialize, Deserialize)]
struct XY {
    x: f64,
    y: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RecordFile {
    rho: f64,
    lame: LameSystem,
    polarization: [f64; 2],
    sources: Vec<XY>,
    receivers: Vec<f64>,
    values: Vec<Vec<[f64; 4]>>,
    aperture: [f64; 2],
}

impl From<&ScatterRecord> for RecordFile {
    fn from(rec: &ScatterRecord) -> Self {
        let p = rec.polarization();
        RecordFile {
            rho: rec.rho,
            lame: rec.sys,
            polarization: [p.x, p.y],
            sources: rec
                .sources
                .iter()
                .map(|s| XY {
                    x: s.location.x,
                    y: s.location.y,
                })
                .collect(),
            receivers: rec.receivers.clone(),
            values: rec
                .values
                .iter()
                .map(|row| {
                    row.iter()
                        .map(|v| [v[0].re, v[0].im, v[1].re, v[1].im])
                        .collect()
                })
                .collect(),
            aperture: [rec.aperture.lo, rec.aperture.hi],
        }
    }
}

impl RecordFile {
    fn into_record(self) -> Result<ScatterRecord> {
        let p = Vec2::new(self.polarization[0], self.polarization[1]);
        let sources = self
            .sources
            .iter()
            .map(|s| PointSource::new(Vec2::new(s.x, s.y), p))
            .collect::<Result<Vec<_>>>()?;
        Ok(ScatterRecord {
            rho: self.rho,
            sys: self.lame,
            sources,
            receivers: self.receivers,
            values: self
                .values
                .into_iter()
                .map(|row| {
                    row.into_iter()
                        .map(|v| {
                            DisplacementValue::new(
                                Complex64::new(v[0], v[1]),
                                Complex64::new(v[2], v[3]),
                            )
                        })
                        .collect()
                })
                .collect(),
            aperture: Aperture {
                lo: self.aperture[0],
                hi: self.aperture[1],
            },
        })
    }
}

/// `n` sources equidistributed on the circle of radius `rho`, starting at angle 0.
pub fn sources_on_circle(n: usize, rho: f64, polarization: Vec2) -> Result<Vec<PointSource>> {
    (0..n)
        .map(|j| PointSource::new(e_r(TAU * j as f64 / n as f64) * rho, polarization))
        .collect()
}

/// Per-source solver diagnostics from [`simulate_with`].
#[derive(Debug, Clone, Serialize)]
pub struct SimulationReport {
    pub residuals: Vec<f64>,
    pub relative_residuals: Vec<f64>,
    pub warnings: usize,
}

/// Scattered data for every source, with default MFS parameters.
pub fn simulate(
    curve: &dyn ParametricCurve,
    sources: &[PointSource],
    sys: &LameSystem,
    rho: f64,
    n_receivers: usize,
    aperture: Aperture,
) -> Result<ScatterRecord> {
    simulate_with(curve, sources, sys, rho, n_receivers, aperture, &MfsParams::default()).map(|(r, _)| r)
}

pub fn simulate_with(
    curve: &dyn ParametricCurve,
    sources: &[PointSource],
    sys: &LameSystem,
    rho: f64,
    n_receivers: usize,
    aperture: Aperture,
    params: &MfsParams,
) -> Result<(ScatterRecord, SimulationReport)> {
    sys.validate()?;
    aperture.validate()?;
    if !(rho > max_radius(curve)) {
        return Err(Error::config("rho", "measurement circle must enclose the obstacle"));
    }
    if n_receivers == 0 {
        return Err(Error::config("n_receivers", "must be positive"));
    }
    if let Some(first) = sources.first() {
        if sources.iter().any(|s| s.polarization != first.polarization) {
            return Err(Error::config("sources", "all sources must share one polarization"));
        }
    }
    for (j, s) in sources.iter().enumerate() {
        if contains(curve, &s.location) {
            return Err(Error::config(format!("sources[{j}]"), "source lies inside the obstacle"));
        }
    }
    let receivers = aperture.receiver_angles(n_receivers);
    let points: Vec<Vec2> = receivers.iter().map(|&t| e_r(t) * rho).collect();
    let mut record = ScatterRecord {
        rho,
        sys: *sys,
        sources: sources.to_vec(),
        receivers,
        values: Vec::new(),
        aperture,
    };
    let mut report = SimulationReport {
        residuals: Vec::new(),
        relative_residuals: Vec::new(),
        warnings: 0,
    };
    if sources.is_empty() {
        return Ok((record, report));
    }
    let solver = MfsSolver::new(curve, sys, params)?;
    let solve_one = |src: &PointSource| -> Result<(Vec<DisplacementValue>, f64, f64, bool)> {
        let sol = solver.solve(src)?;
        let vals = points.iter().map(|x| sol.field(x)).collect::<Result<Vec<_>>>()?;
        Ok((
            vals,
            sol.residual,
            sol.relative_residual(),
            sol.status == MfsStatus::AccuracyWarning,
        ))
    };
    #[cfg(feature = "parallel")]
    let rows: Vec<_> = {
        use rayon::prelude::*;
        sources.par_iter().map(solve_one).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<_> = sources.iter().map(solve_one).collect::<Result<_>>()?;
    for (vals, res, rel, warn) in rows {
        record.values.push(vals);
        report.residuals.push(res);
        report.relative_residuals.push(rel);
        report.warnings += warn as usize;
    }
    Ok((record, report))
}

/// Multiplicative noise `v + delta r1 |v| e^{i pi r2}` applied independently
/// to each complex component, with `r1, r2` uniform on `(-1, 1)`.
pub fn add_noise(rec: &ScatterRecord, delta: f64, seed: u64) -> Result<ScatterRecord> {
    if !(0.0..1.0).contains(&delta) {
        return Err(Error::Domain(format!("noise level {delta} outside [0, 1)")));
    }
    let mut out = rec.clone();
    if delta == 0.0 {
        return Ok(out);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for row in out.values.iter_mut() {
        for v in row.iter_mut() {
            for comp in v.iter_mut() {
                let r1: f64 = rng.random_range(-1.0..1.0);
                let r2: f64 = rng.random_range(-1.0..1.0);
                *comp += Complex64::from_polar(delta * r1 * comp.norm(), std::f64::consts::PI * r2);
            }
        }
    }
    Ok(out)
}
