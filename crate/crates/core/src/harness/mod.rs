//! Experiment plumbing: shapes, configuration, metrics, exports, the
//! verification battery and parameter sweeps.

pub mod config;
pub mod experiment;
pub mod io;
pub mod metrics;
pub mod shapes;
pub mod svg;
pub mod sweep;
pub mod verify;

pub use config::ExperimentConfig;
pub use shapes::{Shape, ShapeSpec, TrigSeries};
