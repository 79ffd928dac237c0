//! wasm-bindgen entry points for the static demo page in `www/`.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use fbnewton::forward::{add_noise, sample_curve, simulate_with, sources_on_circle, Aperture, MfsParams};
use fbnewton::harness::metrics::boundary_error;
use fbnewton::harness::ShapeSpec;
use fbnewton::newton::{reconstruct, ReconstructionConfig};
use fbnewton::specfun::{hankel1, hankel1_d1};
use fbnewton::types::Vec2;

const POLYLINE_POINTS: usize = 256;

fn shape_from_name(name: &str) -> Result<ShapeSpec, String> {
    match name {
        "kite" => Ok(ShapeSpec::Kite {}),
        "starfish" => Ok(ShapeSpec::Starfish {}),
        "disk" => Ok(ShapeSpec::Disk { radius: 1.0, center: [0.0, 0.0] }),
        other => Err(format!("unknown shape `{other}`")),
    }
}

fn flatten(points: &[Vec2]) -> Vec<f64> {
    points.iter().flat_map(|p| [p.x, p.y]).collect()
}

/// Interleaved `x0, y0, x1, y1, ..` of a named shape.
pub fn shape_outline(name: &str) -> Result<Vec<f64>, String> {
    let shape = shape_from_name(name)?;
    Ok(flatten(&sample_curve(&shape.curve(), POLYLINE_POINTS)))
}

/// `[Re H_n(t), Im H_n(t), Re H_n'(t), Im H_n'(t)]`.
pub fn hankel_values(n: i32, t: f64) -> Result<Vec<f64>, String> {
    let h = hankel1(n, t).map_err(|e| e.to_string())?;
    let d = hankel1_d1(n, t).map_err(|e| e.to_string())?;
    Ok(vec![h.re, h.im, d.re, d.im])
}

#[derive(Serialize)]
struct DemoRun {
    truth: Vec<f64>,
    iterates: Vec<Vec<f64>>,
    updates: Vec<f64>,
    termination: String,
    truncation_order: usize,
    metric: &'static str,
    error: f64,
    sources: Vec<f64>,
}

/// Settings of one in-browser reconstruction.
#[derive(Debug, Clone, Copy)]
pub struct DemoSettings {
    pub omega: f64,
    pub delta: f64,
    pub seed: u64,
    pub aperture_lo: f64,
    pub aperture_hi: f64,
    pub n_sources: usize,
    pub initial_radius: f64,
}

/// Simulate, add noise and reconstruct; JSON with every iterate as a polyline.
pub fn run_demo(shape: &str, s: DemoSettings) -> Result<String, String> {
    let spec = shape_from_name(shape)?;
    let curve = spec.curve();
    let sys = fbnewton::elastic::LameSystem::new(1.0, 1.0, s.omega).map_err(|e| e.to_string())?;
    let h = 0.5f64.sqrt();
    let rho = 3.0;
    let srcs = sources_on_circle(s.n_sources, rho, Vec2::new(h, h)).map_err(|e| e.to_string())?;
    let aperture = Aperture::new(s.aperture_lo, s.aperture_hi).map_err(|e| e.to_string())?;
    let mfs = MfsParams { n_charges: 128, n_collocation: 256, ..MfsParams::default() };
    let (clean, _) = simulate_with(&curve, &srcs, &sys, rho, 64, aperture, &mfs).map_err(|e| e.to_string())?;
    let rec = add_noise(&clean, s.delta, s.seed).map_err(|e| e.to_string())?;
    let cfg = ReconstructionConfig {
        delta: if s.delta > 0.0 { s.delta } else { 0.05 },
        initial_radius: s.initial_radius,
        ..ReconstructionConfig::default()
    };
    cfg.validate(rho).map_err(|e| e.to_string())?;
    let run = reconstruct(&rec, &cfg).map_err(|e| e.to_string())?;
    let err = boundary_error(&curve, run.final_curve());
    let out = DemoRun {
        truth: flatten(&sample_curve(&curve, POLYLINE_POINTS)),
        iterates: run.iterates.iter().map(|c| flatten(&sample_curve(c, POLYLINE_POINTS))).collect(),
        updates: run.updates.clone(),
        termination: format!("{:?}", run.termination),
        truncation_order: run.truncation_order,
        metric: err.metric.name(),
        error: err.value,
        sources: srcs.iter().flat_map(|p| [p.location.x, p.location.y]).collect(),
    };
    serde_json::to_string(&out).map_err(|e| e.to_string())
}

#[wasm_bindgen(js_name = shapeOutline)]
pub fn shape_outline_js(name: &str) -> Result<Vec<f64>, JsError> {
    shape_outline(name).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = hankel)]
pub fn hankel_js(n: i32, t: f64) -> Result<Vec<f64>, JsError> {
    hankel_values(n, t).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen(js_name = runDemo)]
#[allow(clippy::too_many_arguments)]
pub fn run_demo_js(
    shape: &str,
    omega: f64,
    delta: f64,
    seed: u32,
    aperture_lo: f64,
    aperture_hi: f64,
    n_sources: u32,
    initial_radius: f64,
) -> Result<String, JsError> {
    let s = DemoSettings {
        omega,
        delta,
        seed: seed as u64,
        aperture_lo,
        aperture_hi,
        n_sources: n_sources as usize,
        initial_radius,
    };
    run_demo(shape, s).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn outlines_and_hankel() {
        assert_eq!(shape_outline("kite").unwrap().len(), 2 * POLYLINE_POINTS);
        assert!(shape_outline("square").is_err());
        let h = hankel_values(0, 1.0).unwrap();
        assert!((h[0] - 0.7651976866).abs() < 1e-9);
        assert!((h[1] - 0.0882569642).abs() < 1e-9);
        assert!(hankel_values(0, -1.0).is_err());
    }

    const FULL: DemoSettings = DemoSettings {
        omega: 5.0,
        delta: 0.05,
        seed: 1,
        aperture_lo: 0.0,
        aperture_hi: std::f64::consts::TAU,
        n_sources: 8,
        initial_radius: 1.5,
    };

    fn field(json: &str, key: &str) -> String {
        let v: serde_json::Value = serde_json::from_str(json).unwrap();
        v[key].to_string()
    }

    #[test]
    fn page_defaults_converge() {
        let json = run_demo("starfish", FULL).unwrap();
        assert_eq!(field(&json, "termination"), "\"Converged\"");
    }

    #[test]
    fn clean_disk_is_recovered() {
        let s = DemoSettings { omega: 1.0, delta: 0.0, initial_radius: 1.4, ..FULL };
        let json = run_demo("disk", s).unwrap();
        let err: f64 = field(&json, "error").parse().unwrap();
        assert!(err < 1e-3, "{err}");
        assert!(run_demo("disk", DemoSettings { initial_radius: 4.0, ..s }).is_err());
    }
}
