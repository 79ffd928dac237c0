//! Method of fundamental solutions for the rigid (Dirichlet) obstacle.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::curve::{
    contains, curvature, inward_normal, is_counterclockwise, mean_radius, sample_curve,
    ParametricCurve,
};
use crate::elastic::{green_tensor, incident_field, LameSystem, PointSource};
use crate::error::{Error, Result};
use crate::linalg::{LeastSquares, Regularization};
use crate::types::{DisplacementValue, Vec2};

/// Singular values below this fraction of the largest are discarded.
pub const MFS_CUTOFF: f64 = 1e-12;

/// Relative collocation residual above which a solution is flagged.
pub const MFS_WARN_LEVEL: f64 = 1e-6;

/// Charges sit on the inward normal at distance
/// `min((1 - shrink) * mean_radius, curvature_fraction / curvature)`; on a
/// circle this is the circle scaled by `shrink` about its centre.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MfsParams {
    pub n_collocation: usize,
    pub n_charges: usize,
    pub shrink: f64,
    pub curvature_fraction: f64,
}

impl Default for MfsParams {
    fn default() -> Self {
        MfsParams {
            n_collocation: 256,
            n_charges: 128,
            shrink: 0.8,
            curvature_fraction: 0.3,
        }
    }
}

impl MfsParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.shrink > 0.0 && self.shrink < 1.0) {
            return Err(Error::config("mfs.shrink", "must lie in (0, 1)"));
        }
        if !(self.curvature_fraction > 0.0) {
            return Err(Error::config("mfs.curvature_fraction", "must be positive"));
        }
        if self.n_charges == 0 {
            return Err(Error::config("mfs.n_charges", "must be positive"));
        }
        if self.n_collocation < self.n_charges {
            return Err(Error::config(
                "mfs.n_collocation",
                "must be at least n_charges",
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MfsStatus {
    Ok,
    /// The collocation residual is large relative to the incident field.
    AccuracyWarning,
}

/// Scattered field as a superposition of interior point forces.
#[derive(Debug, Clone)]
pub struct MfsSolution {
    pub charges: Vec<Vec2>,
    pub strengths: Vec<DisplacementValue>,
    /// Max over collocation points of `|u_inc + v|`.
    pub residual: f64,
    /// Max over collocation points of `|u_inc|`.
    pub incident_scale: f64,
    pub status: MfsStatus,
    sys: LameSystem,
}

impl MfsSolution {
    pub fn field(&self, x: &Vec2) -> Result<DisplacementValue> {
        let mut v = DisplacementValue::zeros();
        for (y, c) in self.charges.iter().zip(&self.strengths) {
            v += green_tensor(x, y, &self.sys)? * c;
        }
        Ok(v)
    }

    pub fn relative_residual(&self) -> f64 {
        if self.incident_scale > 0.0 {
            self.residual / self.incident_scale
        } else {
            self.residual
        }
    }
}

/// A factored collocation system for one curve, reusable for any source.
pub struct MfsSolver {
    sys: LameSystem,
    charges: Vec<Vec2>,
    collocation: Vec<Vec2>,
    system: LeastSquares<Complex64>,
}

impl MfsSolver {
    pub fn new(curve: &dyn ParametricCurve, sys: &LameSystem, params: &MfsParams) -> Result<Self> {
        sys.validate()?;
        params.validate()?;
        let charges = charge_points(curve, params);
        if let Some(bad) = charges.iter().find(|y| !contains(curve, y)) {
            return Err(Error::config(
                "mfs.shrink",
                format!("charge point ({}, {}) falls outside the curve", bad.x, bad.y),
            ));
        }
        let collocation = sample_curve(curve, params.n_collocation);
        let mut a = DMatrix::zeros(2 * collocation.len(), 2 * charges.len());
        for (i, x) in collocation.iter().enumerate() {
            for (j, y) in charges.iter().enumerate() {
                let g = green_tensor(x, y, sys)?;
                a.view_mut((2 * i, 2 * j), (2, 2)).copy_from(&g);
            }
        }
        let system = LeastSquares::new(a, Regularization::Truncate(MFS_CUTOFF))?;
        Ok(MfsSolver {
            sys: *sys,
            charges,
            collocation,
            system,
        })
    }

    pub fn charges(&self) -> &[Vec2] {
        &self.charges
    }

    pub fn collocation_points(&self) -> &[Vec2] {
        &self.collocation
    }

    pub fn solve(&self, src: &PointSource) -> Result<MfsSolution> {
        let mut rhs = DVector::zeros(2 * self.collocation.len());
        let mut incident = Vec::with_capacity(self.collocation.len());
        for (i, x) in self.collocation.iter().enumerate() {
            let ui = incident_field(x, src, &self.sys)?;
            rhs[2 * i] = -ui[0];
            rhs[2 * i + 1] = -ui[1];
            incident.push(ui);
        }
        let coeffs = self.system.solve(&rhs);
        let strengths: Vec<DisplacementValue> = (0..self.charges.len())
            .map(|j| DisplacementValue::new(coeffs[2 * j], coeffs[2 * j + 1]))
            .collect();
        let mut sol = MfsSolution {
            charges: self.charges.clone(),
            strengths,
            residual: 0.0,
            incident_scale: 0.0,
            status: MfsStatus::Ok,
            sys: self.sys,
        };
        for (x, ui) in self.collocation.iter().zip(&incident) {
            let total = ui + sol.field(x)?;
            sol.residual = sol.residual.max(total.norm());
            sol.incident_scale = sol.incident_scale.max(ui.norm());
        }
        if !sol.residual.is_finite() {
            return Err(Error::Solve("non-finite MFS residual".into()));
        }
        if sol.relative_residual() > MFS_WARN_LEVEL {
            sol.status = MfsStatus::AccuracyWarning;
        }
        Ok(sol)
    }
}

/// Interior charge locations for a curve.
pub fn charge_points(curve: &dyn ParametricCurve, params: &MfsParams) -> Vec<Vec2> {
    let ccw = is_counterclockwise(curve);
    let base = (1.0 - params.shrink) * mean_radius(curve);
    (0..params.n_charges)
        .map(|j| {
            let t = TAU * j as f64 / params.n_charges as f64;
            let k = curvature(curve, t, ccw);
            let d = if k > 0.0 {
                base.min(params.curvature_fraction / k)
            } else {
                base
            };
            curve.point(t) + inward_normal(curve, t, ccw) * d
        })
        .collect()
}

/// One-shot MFS solve for a single source.
pub fn solve_mfs(
    curve: &dyn ParametricCurve,
    src: &PointSource,
    sys: &LameSystem,
    params: &MfsParams,
) -> Result<MfsSolution> {
    if contains(curve, &src.location) {
        return Err(Error::config("sources", "source lies inside the obstacle"));
    }
    MfsSolver::new(curve, sys, params)?.solve(src)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::curve::{centroid, Circle};

    fn diag() -> Vec2 {
        Vec2::new(0.5f64.sqrt(), 0.5f64.sqrt())
    }

    fn boundary_residual(curve: &dyn ParametricCurve, sol: &MfsSolution, src: &PointSource, sys: &LameSystem, n: usize) -> f64 {
        sample_curve(curve, n)
            .iter()
            .map(|x| (incident_field(x, src, sys).unwrap() + sol.field(x).unwrap()).norm())
            .fold(0.0, f64::max)
    }

    #[test]
    fn unit_disk_residual_small() {
        let sys = LameSystem::new(1.0, 1.0, 5.0).unwrap();
        let src = PointSource::new(Vec2::new(3.0, 0.0), diag()).unwrap();
        let disk = Circle::centered(1.0);
        let sol = solve_mfs(&disk, &src, &sys, &MfsParams::default()).unwrap();
        assert_eq!(sol.charges.len(), sol.strengths.len());
        let fine = boundary_residual(&disk, &sol, &src, &sys, 512);
        assert!(sol.residual <= 1e-8, "collocation residual {:e}", sol.residual);
        assert!(fine <= 1e-8, "refined residual {fine:e}");
        assert!(fine <= 10.0 * sol.residual.max(1e-15));
        assert_eq!(sol.status, MfsStatus::Ok);
    }

    #[test]
    fn charges_on_circle_are_scaled_copy() {
        let c = Circle::new(Vec2::new(0.4, -0.3), 1.2);
        let p = MfsParams {
            n_charges: 16,
            ..MfsParams::default()
        };
        for (j, y) in charge_points(&c, &p).iter().enumerate() {
            let t = TAU * j as f64 / 16.0;
            let expect = centroid(&c) + (c.point(t) - c.center) * 0.8;
            assert!((y - expect).norm() < 1e-9);
        }
    }

    #[test]
    fn zero_polarization_gives_zero_strengths() {
        let sys = LameSystem::new(1.0, 1.0, 2.0).unwrap();
        let src = PointSource {
            location: Vec2::new(0.0, 3.0),
            polarization: Vec2::zeros(),
        };
        let sol = solve_mfs(&Circle::centered(1.0), &src, &sys, &MfsParams::default()).unwrap();
        assert!(sol.strengths.iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn rejects_source_inside() {
        let sys = LameSystem::new(1.0, 1.0, 2.0).unwrap();
        let src = PointSource::new(Vec2::new(0.2, 0.0), diag()).unwrap();
        assert!(solve_mfs(&Circle::centered(1.0), &src, &sys, &MfsParams::default()).is_err());
    }

    #[test]
    fn bad_params_rejected() {
        let p = MfsParams {
            shrink: 1.2,
            ..MfsParams::default()
        };
        assert!(p.validate().is_err());
    }
}
