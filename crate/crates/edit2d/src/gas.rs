//! Perfect-gas thermodynamics and the state encodings shared by all modules:
//! primitive (rho, u, p), conservative U and Roe's parameter vector Z.

use crate::geom::Vec2;
use crate::{Error, Result};

/// Perfect gas p = (gamma - 1) rho e.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GasModel {
    gamma: f64,
}

impl Default for GasModel {
    fn default() -> Self {
        GasModel { gamma: 1.4 }
    }
}

impl GasModel {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 1.0) || !gamma.is_finite() {
            return Err(Error::InvalidGasModel { gamma });
        }
        Ok(GasModel { gamma })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// gamma - 1
    pub fn gm1(&self) -> f64 {
        self.gamma - 1.0
    }
}

/// One fluid state in primitive variables.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GasState {
    pub rho: f64,
    pub vel: Vec2,
    pub p: f64,
}

impl GasState {
    pub fn new(rho: f64, vel: Vec2, p: f64) -> Self {
        GasState { rho, vel, p }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rho > 0.0 && self.p > 0.0 && self.rho.is_finite() && self.p.is_finite()
            && self.vel.x.is_finite() && self.vel.y.is_finite()
        {
            Ok(())
        } else {
            Err(Error::NonPhysicalState {
                rho: self.rho,
                p: self.p,
            })
        }
    }

    pub fn sound_speed(&self, gas: &GasModel) -> f64 {
        (gas.gamma() * self.p / self.rho).sqrt()
    }

    pub fn mach(&self, gas: &GasModel) -> f64 {
        self.vel.norm() / self.sound_speed(gas)
    }

    /// Specific total energy E = e + |u|^2 / 2.
    pub fn total_energy(&self, gas: &GasModel) -> f64 {
        self.p / (gas.gm1() * self.rho) + 0.5 * self.vel.norm2()
    }

    /// Specific total enthalpy H = h + |u|^2 / 2.
    pub fn total_enthalpy(&self, gas: &GasModel) -> f64 {
        gas.gamma() * self.p / (gas.gm1() * self.rho) + 0.5 * self.vel.norm2()
    }

    /// Entropy measure s = p / rho^gamma.
    pub fn entropy(&self, gas: &GasModel) -> f64 {
        self.p / self.rho.powf(gas.gamma())
    }

    /// Conserved variables (rho, rho u, rho v, rho E).
    pub fn to_conservative(&self, gas: &GasModel) -> [f64; 4] {
        [
            self.rho,
            self.rho * self.vel.x,
            self.rho * self.vel.y,
            self.rho * self.total_energy(gas),
        ]
    }

    pub fn from_conservative(u: [f64; 4], gas: &GasModel) -> Result<Self> {
        let rho = u[0];
        if !(rho > 0.0) {
            return Err(Error::NonPhysicalState { rho, p: f64::NAN });
        }
        let vel = Vec2::new(u[1] / rho, u[2] / rho);
        let p = gas.gm1() * (u[3] - 0.5 * rho * vel.norm2());
        let s = GasState { rho, vel, p };
        s.validate()?;
        Ok(s)
    }

    pub fn to_roe(&self, gas: &GasModel) -> RoeVector {
        let sq = self.rho.sqrt();
        let h = self.total_enthalpy(gas);
        RoeVector([sq, sq * h, sq * self.vel.x, sq * self.vel.y])
    }
}

/// Roe's parameter vector Z = sqrt(rho) (1, H, u, v).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RoeVector(pub [f64; 4]);

impl RoeVector {
    pub fn to_state(&self, gas: &GasModel) -> Result<GasState> {
        let z = self.0;
        if !(z[0] > 0.0) || !z.iter().all(|v| v.is_finite()) {
            return Err(Error::NonPhysicalState {
                rho: z[0] * z[0],
                p: f64::NAN,
            });
        }
        let rho = z[0] * z[0];
        let vel = Vec2::new(z[2] / z[0], z[3] / z[0]);
        let h = z[1] / z[0];
        // H = gamma p / ((gamma - 1) rho) + |u|^2/2
        let p = (h - 0.5 * vel.norm2()) * gas.gm1() / gas.gamma() * rho;
        let s = GasState { rho, vel, p };
        s.validate()?;
        Ok(s)
    }
}

/// Velocity components in a local (n, tau) frame; the frame must be
/// orthonormal to 1e-12.
pub fn normal_tangent_split(vel: Vec2, n: Vec2, tau: Vec2) -> Result<(f64, f64)> {
    let tol = 1e-12;
    let n_norm = n.norm();
    let tau_norm = tau.norm();
    let n_dot_tau = n.dot(tau);
    if (n_norm - 1.0).abs() > tol || (tau_norm - 1.0).abs() > tol || n_dot_tau.abs() > tol {
        return Err(Error::BadFrame {
            n_norm,
            tau_norm,
            n_dot_tau,
        });
    }
    Ok((vel.dot(n), vel.dot(tau)))
}
