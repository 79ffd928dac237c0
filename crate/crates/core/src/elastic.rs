//! Isotropic elastic medium, the Navier fundamental displacement tensor and
//! point-source incident fields.

use nalgebra::Matrix2;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::specfun::HankelTable;
use crate::types::{c, complexify, CMat2, DisplacementValue, Vec2, I};

/// Points closer than this to a source are rejected as singular.
pub const MIN_SEPARATION: f64 = 1e-8;

/// Lame constants and angular frequency of a homogeneous isotropic medium
/// with unit density.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LameSystem {
    pub lambda: f64,
    pub mu: f64,
    pub omega: f64,
}

/// Compressional (`P`) or shear (`S`) branch of the Helmholtz decomposition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Wave {
    P,
    S,
}

impl LameSystem {
    pub fn new(lambda: f64, mu: f64, omega: f64) -> Result<Self> {
        let sys = LameSystem { lambda, mu, omega };
        sys.validate()?;
        Ok(sys)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda.is_finite() && self.mu.is_finite() && self.omega.is_finite()) {
            return Err(Error::config("lame", "constants must be finite"));
        }
        if self.mu <= 0.0 {
            return Err(Error::config("lame.mu", "must be positive"));
        }
        if self.lambda + self.mu <= 0.0 {
            return Err(Error::config("lame.lambda", "lambda + mu must be positive"));
        }
        if self.omega <= 0.0 {
            return Err(Error::config("lame.omega", "must be positive"));
        }
        Ok(())
    }

    pub fn kp(&self) -> f64 {
        self.omega / (self.lambda + 2.0 * self.mu).sqrt()
    }

    pub fn ks(&self) -> f64 {
        self.omega / self.mu.sqrt()
    }

    pub fn wavenumber(&self, wave: Wave) -> f64 {
        match wave {
            Wave::P => self.kp(),
            Wave::S => self.ks(),
        }
    }
}

/// A point source at `location` with unit `polarization`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointSource {
    pub location: Vec2,
    pub polarization: Vec2,
}

impl PointSource {
    pub fn new(location: Vec2, polarization: Vec2) -> Result<Self> {
        if (polarization.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::config(
                "polarization",
                format!("must be a unit vector, |p| = {}", polarization.norm()),
            ));
        }
        Ok(PointSource {
            location,
            polarization,
        })
    }
}

fn separation(x: &Vec2, y: &Vec2) -> Result<(f64, Vec2)> {
    let diff = x - y;
    let r = diff.norm();
    if !r.is_finite() || r < MIN_SEPARATION {
        return Err(Error::Singularity(format!(
            "points ({}, {}) and ({}, {}) are {r:e} apart",
            x.x, x.y, y.x, y.y
        )));
    }
    Ok((r, diff / r))
}

/// Radial derivatives `[f, f', f'', f''']` of `(i/4) H_0(k r)`.
fn phi_radial(k: f64, r: f64) -> Result<[Complex64; 4]> {
    let t = k * r;
    let tab = HankelTable::new(1, t)?;
    let q = I * 0.25;
    Ok([
        q * tab.value(0),
        q * k * tab.d1(0),
        q * k * k * tab.d2(0),
        q * k * k * k * tab.d3(0),
    ])
}

/// Free-space Helmholtz fundamental solution `(i/4) H_0(k_xi |x - y|)`.
pub fn helmholtz_phi(branch: Wave, x: &Vec2, y: &Vec2, sys: &LameSystem) -> Result<Complex64> {
    let (r, _) = separation(x, y)?;
    Ok(phi_radial(sys.wavenumber(branch), r)?[0])
}

fn outer(a: &Vec2, b: &Vec2) -> CMat2 {
    Matrix2::new(
        c(a.x * b.x),
        c(a.x * b.y),
        c(a.y * b.x),
        c(a.y * b.y),
    )
}

/// Radial derivatives of the p- and s-potentials at one separation.
struct Kernel {
    r: f64,
    d: Vec2,
    phi_s: [Complex64; 4],
    psi: [Complex64; 4],
}

impl Kernel {
    fn new(x: &Vec2, z: &Vec2, sys: &LameSystem) -> Result<Self> {
        let (r, d) = separation(x, z)?;
        let phi_p = phi_radial(sys.kp(), r)?;
        let phi_s = phi_radial(sys.ks(), r)?;
        let psi = std::array::from_fn(|i| phi_s[i] - phi_p[i]);
        Ok(Kernel { r, d, phi_s, psi })
    }

    fn tensor(&self, sys: &LameSystem) -> CMat2 {
        let [_, d1, d2, _] = self.psi;
        let g = d1 / self.r;
        let h = d2 - g;
        let ddt = outer(&self.d, &self.d);
        let identity = CMat2::identity();
        identity * (self.phi_s[0] / sys.mu) + (identity * g + ddt * h).unscale(sys.omega * sys.omega)
    }

    /// Jacobian of `G p`: `m[(i, k)] = d (G p)_i / d x_k`.
    fn jacobian(&self, p: &Vec2, sys: &LameSystem) -> CMat2 {
        let r = self.r;
        let d = &self.d;
        let [_, d1, d2, d3] = self.psi;
        let h = d2 - d1 / r;
        let hp = d3 - d2 / r + d1 / (r * r);
        let dp = d.dot(p);
        let pd = outer(p, d);
        let dpt = outer(d, p);
        let ddt = outer(d, d);
        let shear = pd * (self.phi_s[1] / sys.mu);
        let hess = (pd + CMat2::identity() * c(dp) + dpt) * (h / r) + ddt * ((hp - h * (2.0 / r)) * dp);
        shear + hess.unscale(sys.omega * sys.omega)
    }
}

/// The 2x2 Navier fundamental displacement tensor `G(x, z)`.
pub fn green_tensor(x: &Vec2, z: &Vec2, sys: &LameSystem) -> Result<CMat2> {
    Ok(Kernel::new(x, z, sys)?.tensor(sys))
}

/// Incident displacement `G(x, z) p` of a point source.
pub fn incident_field(x: &Vec2, src: &PointSource, sys: &LameSystem) -> Result<DisplacementValue> {
    let g = green_tensor(x, &src.location, sys)?;
    Ok(g * complexify(&src.polarization))
}

/// Jacobian of the incident field with respect to `x`.
pub fn grad_incident_field(x: &Vec2, src: &PointSource, sys: &LameSystem) -> Result<CMat2> {
    Ok(Kernel::new(x, &src.location, sys)?.jacobian(&src.polarization, sys))
}

/// Incident value and Jacobian from one kernel evaluation.
pub fn incident_with_gradient(
    x: &Vec2,
    src: &PointSource,
    sys: &LameSystem,
) -> Result<(DisplacementValue, CMat2)> {
    let kernel = Kernel::new(x, &src.location, sys)?;
    let value = kernel.tensor(sys) * complexify(&src.polarization);
    Ok((value, kernel.jacobian(&src.polarization, sys)))
}
