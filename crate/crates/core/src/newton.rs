//! Newton iteration for the boundary of a rigid obstacle, driven entirely by
//! the modal representation of the measured field: no forward solves.

use std::f64::consts::TAU;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::elastic::{incident_with_gradient, LameSystem, PointSource};
use crate::error::{Error, Result};
use crate::forward::{ParametricCurve, ScatterRecord};
use crate::linalg::{LeastSquares, Regularization};
use crate::modal::{choose_truncation, extract_modal_field, ModalField, PointBasis, TruncationRule};
use crate::types::{e_r, e_theta, Vec2};

/// Grid used to check that an iterate stays outside the expansion disk.
pub const ADMISSIBILITY_GRID: usize = 256;

/// Star-shaped curve `r(t) (cos t, sin t)` with a trigonometric radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StarCurve {
    pub a0: f64,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

impl StarCurve {
    pub fn new(a0: f64, a: Vec<f64>, b: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() {
            return Err(Error::config("curve", "cosine and sine degrees differ"));
        }
        Ok(StarCurve { a0, a, b })
    }

    pub fn circle(radius: f64, degree: usize) -> Self {
        StarCurve {
            a0: radius,
            a: vec![0.0; degree],
            b: vec![0.0; degree],
        }
    }

    /// Build from the stacked vector `(a0, a_1..a_Np, b_1..b_Np)`.
    pub fn from_coeffs(c: &[f64]) -> Result<Self> {
        if c.is_empty() || c.len().is_multiple_of(2) {
            return Err(Error::config("curve", "coefficient vector must have length 2Np+1"));
        }
        let np = (c.len() - 1) / 2;
        Ok(StarCurve {
            a0: c[0],
            a: c[1..=np].to_vec(),
            b: c[np + 1..].to_vec(),
        })
    }

    pub fn degree(&self) -> usize {
        self.a.len()
    }

    pub fn coeffs(&self) -> Vec<f64> {
        std::iter::once(self.a0)
            .chain(self.a.iter().copied())
            .chain(self.b.iter().copied())
            .collect()
    }

    pub fn radius(&self, t: f64) -> f64 {
        let mut r = self.a0;
        for (j, (a, b)) in self.a.iter().zip(&self.b).enumerate() {
            let jt = (j + 1) as f64 * t;
            r += a * jt.cos() + b * jt.sin();
        }
        r
    }

    pub fn radius_derivative(&self, t: f64) -> f64 {
        let mut d = 0.0;
        for (j, (a, b)) in self.a.iter().zip(&self.b).enumerate() {
            let jf = (j + 1) as f64;
            d += jf * (b * (jf * t).cos() - a * (jf * t).sin());
        }
        d
    }

    /// `(min, max)` of `r(t)` on an equispaced grid.
    pub fn radius_range(&self, n: usize) -> (f64, f64) {
        (0..n)
            .map(|i| self.radius(TAU * i as f64 / n as f64))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r), hi.max(r)))
    }
}

impl ParametricCurve for StarCurve {
    fn point(&self, t: f64) -> Vec2 {
        e_r(t) * self.radius(t)
    }

    fn tangent(&self, t: f64) -> Vec2 {
        e_r(t) * self.radius_derivative(t) + e_theta(t) * self.radius(t)
    }
}

/// `B(t) = (1, cos t, .., cos Np t, sin t, .., sin Np t)`.
pub fn basis_row(t: f64, np: usize) -> Vec<f64> {
    let mut row = vec![0.0; 2 * np + 1];
    row[0] = 1.0;
    for j in 1..=np {
        let jt = j as f64 * t;
        row[j] = jt.cos();
        row[np + j] = jt.sin();
    }
    row
}

/// `e_M = |dr| / |r|` in the L2(0, 2pi) sense, using the basis Gram weights.
pub fn relative_update(delta: &[f64], current: &[f64]) -> Result<f64> {
    let den = gram_norm(current);
    if !(den > 0.0) {
        return Err(Error::Domain("relative update of a zero radius".into()));
    }
    Ok(gram_norm(delta) / den)
}

fn gram_norm(c: &[f64]) -> f64 {
    c.iter()
        .enumerate()
        .map(|(i, v)| if i == 0 { v * v } else { 0.5 * v * v })
        .sum::<f64>()
        .sqrt()
}

/// Per-source residual and Jacobian rows at one boundary angle.
type SourceRows = ([f64; 4], [Vec<f64>; 4]);

/// Linearized boundary condition, one 4-row block per (source, angle):
/// `Re/Im u_k + Re/Im((grad u x_hat)_k B(t)) dc = 0`.
pub fn assemble_system(
    fields: &[ModalField],
    srcs: &[PointSource],
    curve: &StarCurve,
    t_grid: &[f64],
    sys: &LameSystem,
) -> Result<(DMatrix<f64>, DVector<f64>)> {
    if fields.len() != srcs.len() {
        return Err(Error::config("sources", "one modal field per source required"));
    }
    let Some(first) = fields.first() else {
        return Err(Error::config("sources", "at least one source required"));
    };
    let np = curve.degree();
    let cols = 2 * np + 1;
    let n_t = t_grid.len();
    let block = |j: usize| -> Result<Vec<SourceRows>> {
        let t = t_grid[j];
        let dir = e_r(t);
        let x = dir * curve.radius(t);
        let basis = PointBasis::new(&x, first.order(), first.inner_radius(), sys).map_err(|e| {
            Error::Domain(format!("angle t = {t}: {e}"))
        })?;
        let b = basis_row(t, np);
        let mut out = Vec::with_capacity(srcs.len());
        for (s, (mf, src)) in fields.iter().zip(srcs).enumerate() {
            let (ui, gi) = incident_with_gradient(&x, src, sys)
                .map_err(|e| Error::Domain(format!("source {s}, t = {t}: {e}")))?;
            let (v, gv) = mf.eval_with_gradient(&basis)?;
            let u = ui + v;
            let du = (gi + gv) * dir.map(|c| num_complex::Complex64::new(c, 0.0));
            let rhs = [u[0].re, u[0].im, u[1].re, u[1].im];
            let scal = [du[0].re, du[0].im, du[1].re, du[1].im];
            let rows = scal.map(|w| b.iter().map(|bk| w * bk).collect::<Vec<f64>>());
            out.push((rhs, rows));
        }
        Ok(out)
    };
    #[cfg(feature = "parallel")]
    let blocks: Vec<_> = {
        use rayon::prelude::*;
        (0..n_t).into_par_iter().map(block).collect::<Result<_>>()?
    };
    #[cfg(not(feature = "parallel"))]
    let blocks: Vec<_> = (0..n_t).map(block).collect::<Result<_>>()?;

    let n_rows = 4 * srcs.len() * n_t;
    let mut a = DMatrix::zeros(n_rows, cols);
    let mut rhs = DVector::zeros(n_rows);
    for (j, per_t) in blocks.into_iter().enumerate() {
        for (s, (r, rows)) in per_t.into_iter().enumerate() {
            let base = 4 * (s * n_t + j);
            for k in 0..4 {
                rhs[base + k] = r[k];
                for (c, v) in rows[k].iter().enumerate() {
                    a[(base + k, c)] = *v;
                }
            }
        }
    }
    Ok((a, rhs))
}

/// `dc = -damping * A^+ rhs`, with ridge weight `reg * sigma_max`.
pub fn newton_step(a: &DMatrix<f64>, rhs: &DVector<f64>, damping: f64, reg: f64) -> Result<DVector<f64>> {
    if a.nrows() < a.ncols() {
        return Err(Error::Solve(format!(
            "{} equations for {} unknowns",
            a.nrows(),
            a.ncols()
        )));
    }
    if !(damping > 0.0 && damping <= 1.0) {
        return Err(Error::config("damping", "must lie in (0, 1]"));
    }
    let ls = LeastSquares::new(a.clone(), Regularization::Ridge(reg))?;
    Ok(ls.solve(rhs) * (-damping))
}

/// When to stop iterating.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
#[derive(Default)]
pub enum StopRule {
    /// Stop once `e_M < epsilon`.
    #[default]
    Relative,
    /// Stop once `|p_{m+1} - p_m|_{L2} <= c1`, with a user-chosen `c1`.
    StepNorm { c1: f64 },
}


/// Inversion settings. Physical constants come from the record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReconstructionConfig {
    /// Noise level assumed when choosing the truncation order.
    pub delta: f64,
    pub truncation: TruncationRule,
    pub epsilon: f64,
    /// Trigonometric degree `Np` of the radial function.
    pub degree: usize,
    /// Number of equispaced boundary angles in the linearized system.
    pub n_angles: usize,
    pub initial_radius: f64,
    /// Explicit expansion radius `R`; `None` derives it from the initial guess.
    pub expansion_radius: Option<f64>,
    pub expansion_fraction: f64,
    pub max_iter: usize,
    pub damping: f64,
    pub reg: f64,
    /// Ridge weight for limited-aperture coefficient fits.
    pub aperture_reg: f64,
    pub divergence_guard: f64,
    pub max_backtracks: usize,
    pub stop: StopRule,
}

impl Default for ReconstructionConfig {
    fn default() -> Self {
        ReconstructionConfig {
            delta: 0.05,
            truncation: TruncationRule::Practical,
            epsilon: 1e-4,
            degree: 8,
            n_angles: 64,
            initial_radius: 1.5,
            expansion_radius: None,
            expansion_fraction: 0.4,
            max_iter: 50,
            damping: 1.0,
            reg: 1e-10,
            aperture_reg: 1e-8,
            divergence_guard: 10.0,
            max_backtracks: 5,
            stop: StopRule::Relative,
        }
    }
}

impl ReconstructionConfig {
    /// The expansion radius `R` actually used.
    pub fn r_inner(&self) -> f64 {
        match self.expansion_radius {
            Some(r) => r,
            None => (self.expansion_fraction * self.initial_radius)
                .clamp(0.1, 0.9 * self.initial_radius),
        }
    }

    pub fn validate(&self, rho: f64) -> Result<()> {
        if !(0.0..1.0).contains(&self.delta) {
            return Err(Error::config("delta", "must lie in [0, 1)"));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::config("epsilon", "must be positive"));
        }
        if self.degree == 0 {
            return Err(Error::config("degree", "must be at least 1"));
        }
        if self.n_angles == 0 {
            return Err(Error::config("n_angles", "must be positive"));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::config("damping", "must lie in (0, 1]"));
        }
        if !(self.reg >= 0.0) || !(self.aperture_reg >= 0.0) {
            return Err(Error::config("reg", "must be nonnegative"));
        }
        if !(self.divergence_guard > 0.0) {
            return Err(Error::config("divergence_guard", "must be positive"));
        }
        if self.expansion_radius.is_none() && !(self.expansion_fraction > 0.0 && self.expansion_fraction < 1.0) {
            return Err(Error::config("expansion_fraction", "must lie in (0, 1)"));
        }
        if let StopRule::StepNorm { c1 } = self.stop {
            if !(c1 > 0.0) {
                return Err(Error::config("stop.c1", "must be positive"));
            }
        }
        let r = self.r_inner();
        if !(rho > self.initial_radius && self.initial_radius > r && r > 0.0) {
            return Err(Error::config(
                "initial_radius",
                format!(
                    "need rho > initial radius > R > 0, got {rho} > {} > {r} > 0",
                    self.initial_radius
                ),
            ));
        }
        if let TruncationRule::Theoretical { tau2 } = self.truncation {
            if !(tau2 > 1.0) {
                return Err(Error::config("truncation.tau2", "must exceed 1"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Converged,
    MaxIterations,
    Diverged,
    ModalFailure,
}

/// History of one reconstruction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconRun {
    /// Initial guess followed by every accepted iterate.
    pub iterates: Vec<StarCurve>,
    /// `e_M` per performed iteration.
    pub updates: Vec<f64>,
    /// RMS of the linearized residual per performed iteration.
    pub residuals: Vec<f64>,
    /// Damping actually applied per performed iteration.
    pub dampings: Vec<f64>,
    pub termination: Termination,
    pub message: Option<String>,
    pub truncation_order: usize,
    pub expansion_radius: f64,
    pub config: ReconstructionConfig,
}

impl ReconRun {
    pub fn final_curve(&self) -> &StarCurve {
        self.iterates.last().expect("run always holds the initial guess")
    }

    pub fn iterations(&self) -> usize {
        self.updates.len()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Modal fields for every source of a record, extracted once.
pub fn extract_fields(rec: &ScatterRecord, order: usize, r_inner: f64, reg: f64) -> Result<Vec<ModalField>> {
    let one = |s: usize| extract_modal_field(&rec.trace(s), order, r_inner, &rec.sys, reg);
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..rec.sources.len()).into_par_iter().map(one).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..rec.sources.len()).map(one).collect()
    }
}

fn admissible(curve: &StarCurve, r_inner: f64, rho: f64) -> bool {
    let (lo, hi) = curve.radius_range(ADMISSIBILITY_GRID);
    lo > r_inner && hi < rho
}

/// Run the Newton iteration on a record. Configuration errors are returned;
/// numerical trouble ends the run with a termination cause instead.
pub fn reconstruct(rec: &ScatterRecord, cfg: &ReconstructionConfig) -> Result<ReconRun> {
    rec.validate()?;
    cfg.validate(rec.rho)?;
    if rec.sources.is_empty() {
        return Err(Error::config("sources", "record holds no sources"));
    }
    let r_inner = cfg.r_inner();
    let initial = StarCurve::circle(cfg.initial_radius, cfg.degree);
    let mut run = ReconRun {
        iterates: vec![initial],
        updates: Vec::new(),
        residuals: Vec::new(),
        dampings: Vec::new(),
        termination: Termination::MaxIterations,
        message: None,
        truncation_order: 0,
        expansion_radius: r_inner,
        config: cfg.clone(),
    };
    let order = match choose_truncation(cfg.delta, cfg.truncation) {
        Ok(n) => n,
        Err(e) => {
            run.termination = Termination::ModalFailure;
            run.message = Some(e.to_string());
            return Ok(run);
        }
    };
    run.truncation_order = order;
    let fields = match extract_fields(rec, order, r_inner, cfg.aperture_reg) {
        Ok(f) => f,
        Err(e) => {
            run.termination = Termination::ModalFailure;
            run.message = Some(e.to_string());
            return Ok(run);
        }
    };
    let t_grid: Vec<f64> = (0..cfg.n_angles).map(|j| TAU * j as f64 / cfg.n_angles as f64).collect();

    for _ in 0..cfg.max_iter {
        let current = run.final_curve().clone();
        let step = assemble_system(&fields, &rec.sources, &current, &t_grid, &rec.sys)
            .and_then(|(a, rhs)| {
                let rms = rhs.norm() / (rhs.len() as f64).sqrt();
                newton_step(&a, &rhs, 1.0, cfg.reg).map(|dc| (dc, rms))
            });
        let (full_step, rms) = match step {
            Ok(s) => s,
            Err(e) => {
                run.termination = Termination::Diverged;
                run.message = Some(e.to_string());
                return Ok(run);
            }
        };
        let c = current.coeffs();
        let mut damping = cfg.damping;
        let mut accepted = None;
        for _ in 0..=cfg.max_backtracks {
            let trial: Vec<f64> = c.iter().zip(full_step.iter()).map(|(a, d)| a + damping * d).collect();
            let curve = StarCurve::from_coeffs(&trial)?;
            if admissible(&curve, r_inner, rec.rho) {
                accepted = Some(curve);
                break;
            }
            damping *= 0.5;
        }
        let Some(next) = accepted else {
            run.termination = Termination::Diverged;
            run.message = Some("iterate left the admissible annulus R < r(t) < rho".into());
            return Ok(run);
        };
        let delta: Vec<f64> = full_step.iter().map(|d| damping * d).collect();
        let e_m = relative_update(&delta, &c)?;
        run.updates.push(e_m);
        run.residuals.push(rms);
        run.dampings.push(damping);
        if !e_m.is_finite() || e_m > cfg.divergence_guard {
            run.termination = Termination::Diverged;
            run.message = Some(format!("relative update {e_m:e} exceeds the divergence guard"));
            return Ok(run);
        }
        run.iterates.push(next);
        let stop = match cfg.stop {
            StopRule::Relative => e_m < cfg.epsilon,
            StopRule::StepNorm { c1 } => gram_norm(&delta) * TAU.sqrt() <= c1,
        };
        if stop {
            run.termination = Termination::Converged;
            return Ok(run);
        }
    }
    run.termination = Termination::MaxIterations;
    Ok(run)
}
