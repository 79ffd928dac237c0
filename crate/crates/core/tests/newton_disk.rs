use fbnewton::elastic::LameSystem;
use fbnewton::forward::{disk_series, simulate, sources_on_circle, Aperture, Circle, ScatterRecord};
use fbnewton::modal::TruncationRule;
use fbnewton::newton::*;
use fbnewton::types::Vec2;
use std::f64::consts::TAU;

fn polarization() -> Vec2 {
    Vec2::new(0.5f64.sqrt(), 0.5f64.sqrt())
}

fn disk_record(omega: f64, n_sources: usize) -> ScatterRecord {
    let sys = LameSystem::new(1.0, 1.0, omega).unwrap();
    let srcs = sources_on_circle(n_sources, 3.0, polarization()).unwrap();
    simulate(&Circle::centered(1.0), &srcs, &sys, 3.0, 128, Aperture::full()).unwrap()
}

fn exact_disk_record(omega: f64) -> ScatterRecord {
    let sys = LameSystem::new(1.0, 1.0, omega).unwrap();
    let sources = sources_on_circle(1, 3.0, polarization()).unwrap();
    let receivers = Aperture::full().receiver_angles(128);
    let series = disk_series(1.0, &sources[0], &sys, 60).unwrap();
    let values = vec![receivers
        .iter()
        .map(|t| series.field(&(Vec2::new(t.cos(), t.sin()) * 3.0)).unwrap())
        .collect()];
    ScatterRecord { rho: 3.0, sys, sources, receivers, values, aperture: Aperture::full() }
}

fn grid(n: usize) -> Vec<f64> {
    (0..n).map(|j| TAU * j as f64 / n as f64).collect()
}

#[test]
fn exact_boundary_satisfies_dirichlet_condition() {
    for omega in [1.0, 5.0] {
        let rec = exact_disk_record(omega);
        let fields = extract_fields(&rec, 15, 0.5, 0.0).unwrap();
        let (_, rhs) =
            assemble_system(&fields, &rec.sources, &StarCurve::circle(1.0, 4), &grid(64), &rec.sys).unwrap();
        let worst = rhs.amax();
        assert!(worst <= 1e-5, "omega {omega}: max residual {worst:e}");
    }
}

#[test]
fn zero_step_iff_zero_rhs() {
    let rec = disk_record(1.0, 2);
    let fields = extract_fields(&rec, 15, 0.6, 0.0).unwrap();
    let (a, rhs) = assemble_system(&fields, &rec.sources, &StarCurve::circle(1.5, 3), &grid(32), &rec.sys).unwrap();
    assert!(rhs.amax() > 1e-3);
    assert!(newton_step(&a, &rhs, 1.0, 0.0).unwrap().amax() > 0.0);
    let zero = nalgebra::DVector::zeros(rhs.len());
    assert_eq!(newton_step(&a, &zero, 1.0, 0.0).unwrap().amax(), 0.0);
}

#[test]
fn refining_angle_grid_keeps_step() {
    let rec = disk_record(1.0, 4);
    let fields = extract_fields(&rec, 15, 0.6, 0.0).unwrap();
    let guess = StarCurve::new(1.3, vec![0.05, 0.0, 0.02], vec![0.0, -0.03, 0.0]).unwrap();
    let step = |n: usize| {
        let (a, rhs) = assemble_system(&fields, &rec.sources, &guess, &grid(n), &rec.sys).unwrap();
        newton_step(&a, &rhs, 1.0, 0.0).unwrap()
    };
    let coarse = step(64);
    let fine = step(128);
    let diff = (&coarse - &fine).amax();
    assert!(diff <= 1e-6, "step changed by {diff:e}");
}

#[test]
fn single_step_moves_radius_toward_truth() {
    let rec = disk_record(1.0, 8);
    let fields = extract_fields(&rec, 15, 0.6, 0.0).unwrap();
    for a0 in [1.2, 1.5, 2.0] {
        let (a, rhs) = assemble_system(&fields, &rec.sources, &StarCurve::circle(a0, 4), &grid(64), &rec.sys).unwrap();
        let dc = newton_step(&a, &rhs, 1.0, 1e-10).unwrap();
        assert!((a0 + dc[0] - 1.0).abs() < (a0 - 1.0).abs(), "a0 {a0} step {}", dc[0]);
    }
}

#[test]
fn step_contracts_near_truth() {
    let rec = disk_record(1.0, 8);
    let fields = extract_fields(&rec, 15, 0.5, 0.0).unwrap();
    for e in [0.05, 0.1, 0.2] {
        let (a, rhs) = assemble_system(&fields, &rec.sources, &StarCurve::circle(1.0 + e, 4), &grid(64), &rec.sys).unwrap();
        let dc = newton_step(&a, &rhs, 1.0, 1e-10).unwrap();
        let after = (1.0 + e + dc[0] - 1.0).abs();
        assert!(after <= 0.6 * e, "e {e}: new error {after:e}");
    }
}

#[test]
fn zero_iterations_return_guess() {
    let rec = disk_record(1.0, 2);
    let cfg = ReconstructionConfig { max_iter: 0, initial_radius: 2.0, ..Default::default() };
    let run = reconstruct(&rec, &cfg).unwrap();
    assert_eq!(run.termination, Termination::MaxIterations);
    assert_eq!(run.iterations(), 0);
    assert_eq!(run.final_curve(), &StarCurve::circle(2.0, cfg.degree));
}

#[test]
fn disk_reconstruction_converges() {
    let rec = disk_record(1.0, 20);
    let cfg = ReconstructionConfig {
        delta: 0.0,
        truncation: TruncationRule::Fixed { order: 15 },
        initial_radius: 2.0,
        ..Default::default()
    };
    let run = reconstruct(&rec, &cfg).unwrap();
    assert_eq!(run.termination, Termination::Converged, "{:?}", run.message);
    assert!(run.iterations() <= 15);
    assert!(*run.updates.last().unwrap() < cfg.epsilon);
    assert_eq!(run.updates.len(), run.iterations());
    let c = run.final_curve().coeffs();
    assert!((c[0] - 1.0).abs() <= 0.005, "a0 = {}", c[0]);
    assert!(c[1..].iter().all(|v| v.abs() <= 0.01));
}

#[test]
fn converged_flag_matches_last_update() {
    let rec = disk_record(1.0, 4);
    for max_iter in [1, 3, 30] {
        let cfg = ReconstructionConfig {
            truncation: TruncationRule::Fixed { order: 12 },
            initial_radius: 1.4,
            max_iter,
            ..Default::default()
        };
        let run = reconstruct(&rec, &cfg).unwrap();
        let last = *run.updates.last().unwrap();
        assert_eq!(run.termination == Termination::Converged, last < cfg.epsilon);
    }
}
