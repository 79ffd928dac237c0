//! TOML experiment configuration.

use std::f64::consts::TAU;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::shapes::ShapeSpec;
use crate::elastic::LameSystem;
use crate::error::{Error, Result};
use crate::forward::{sources_on_circle, Aperture, MfsParams};
use crate::newton::ReconstructionConfig;
use crate::types::Vec2;
use crate::elastic::PointSource;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PhysicsConfig {
    pub lambda: f64,
    pub mu: f64,
    pub omega: f64,
}

impl Default for PhysicsConfig {
    fn default() -> Self {
        PhysicsConfig { lambda: 1.0, mu: 1.0, omega: 5.0 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SourceConfig {
    pub count: usize,
    pub polarization: [f64; 2],
}

impl Default for SourceConfig {
    fn default() -> Self {
        let h = 0.5f64.sqrt();
        SourceConfig { count: 20, polarization: [h, h] }
    }
}

/// Receivers on the circle of radius `rho`, over `[lo, hi)` in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReceiverConfig {
    pub count: usize,
    pub rho: f64,
    pub aperture: [f64; 2],
}

impl Default for ReceiverConfig {
    fn default() -> Self {
        ReceiverConfig { count: 128, rho: 3.0, aperture: [0.0, TAU] }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseConfig {
    pub delta: f64,
}

/// Cells of a sweep: every aperture x delta x seed combination.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub apertures: Vec<[f64; 2]>,
    pub deltas: Vec<f64>,
    pub seeds: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub physics: PhysicsConfig,
    pub shape: ShapeSpec,
    #[serde(default)]
    pub sources: SourceConfig,
    #[serde(default)]
    pub receivers: ReceiverConfig,
    #[serde(default)]
    pub noise: NoiseConfig,
    #[serde(default)]
    pub mfs: MfsParams,
    /// `delta` defaults to `noise.delta` when omitted.
    #[serde(default)]
    pub reconstruction: ReconstructionConfig,
    #[serde(default)]
    pub sweep: SweepConfig,
}

impl ExperimentConfig {
    /// Default experiment (omega 5, 20 sources, 128 receivers, 5% noise) around the given shape.
    pub fn with_shape(shape: ShapeSpec) -> Self {
        ExperimentConfig {
            seed: 0,
            physics: PhysicsConfig::default(),
            shape,
            sources: SourceConfig::default(),
            receivers: ReceiverConfig::default(),
            noise: NoiseConfig { delta: 0.05 },
            mfs: MfsParams::default(),
            reconstruction: ReconstructionConfig::default(),
            sweep: SweepConfig::default(),
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let mut value: toml::Table = toml::from_str(text)?;
        let noise_delta = value
            .get("noise")
            .and_then(|n| n.get("delta"))
            .cloned();
        if let Some(d) = noise_delta {
            let recon = value
                .entry("reconstruction")
                .or_insert_with(|| toml::Value::Table(toml::Table::new()));
            if let Some(t) = recon.as_table_mut() {
                t.entry("delta").or_insert(d);
            }
        }
        let cfg: ExperimentConfig = value.try_into()?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_toml(&std::fs::read_to_string(path)?)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config("config", e.to_string()))
    }

    pub fn sys(&self) -> Result<LameSystem> {
        LameSystem::new(self.physics.lambda, self.physics.mu, self.physics.omega)
            .map_err(|e| Error::config("physics", e.to_string()))
    }

    pub fn aperture(&self) -> Result<Aperture> {
        let [lo, hi] = self.receivers.aperture;
        Aperture::new(lo, hi).map_err(|e| Error::config("receivers.aperture", e.to_string()))
    }

    pub fn source_list(&self) -> Result<Vec<PointSource>> {
        let [p1, p2] = self.sources.polarization;
        sources_on_circle(self.sources.count, self.receivers.rho, Vec2::new(p1, p2))
            .map_err(|e| Error::config("sources", e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.sys()?;
        self.aperture()?;
        self.shape.validate()?;
        if self.sources.count == 0 {
            return Err(Error::config("sources.count", "must be positive"));
        }
        self.source_list()?;
        if self.receivers.count < 2 {
            return Err(Error::config("receivers.count", "must be at least 2"));
        }
        if !(self.noise.delta >= 0.0 && self.noise.delta < 1.0) {
            return Err(Error::config("noise.delta", "must lie in [0, 1)"));
        }
        self.mfs.validate()?;
        self.reconstruction
            .validate(self.receivers.rho)
            .map_err(|e| match e {
                Error::Config { path, message } => Error::config(format!("reconstruction.{path}"), message),
                other => other,
            })?;
        let rmax = crate::forward::max_radius(&self.shape.curve());
        if !(rmax < self.receivers.rho) {
            return Err(Error::config(
                "receivers.rho",
                format!("obstacle reaches radius {rmax:.4}, receivers must lie outside"),
            ));
        }
        for (i, a) in self.sweep.apertures.iter().enumerate() {
            Aperture::new(a[0], a[1])
                .map_err(|e| Error::config(format!("sweep.apertures[{i}]"), e.to_string()))?;
        }
        for (i, d) in self.sweep.deltas.iter().enumerate() {
            if !(*d >= 0.0 && *d < 1.0) {
                return Err(Error::config(format!("sweep.deltas[{i}]"), "must lie in [0, 1)"));
            }
        }
        Ok(())
    }
}
