//! Analytic comparison fields used as initial states.

use crate::error::Result;
use crate::grid::Field;
use crate::model::{geometry, ModelConfig};

/// Exponent of the ridge half-width `eps * zeta = eps^(1 - WALL_BETA)`.
pub const WALL_BETA: f64 = 0.4;

/// Radial Thomas-Fermi profile with a linear collar of width `eps^(2/3)`.
#[derive(Clone, Debug)]
pub struct ThomasFermiProfile {
    rho: f64,
    collar_start: f64,
    /// `k_eps * eps^(-1/3)`, the collar slope.
    slope: f64,
    config: ModelConfig,
}

impl ThomasFermiProfile {
    pub fn new(config: &ModelConfig) -> Result<Self> {
        let rho = geometry(config)?.rho;
        let collar_start = (rho - config.epsilon.powf(2.0 / 3.0)).max(0.0);
        let edge = config.mu_rad(collar_start)?.max(0.0).sqrt();
        let slope = if rho > collar_start { edge / (rho - collar_start) } else { 0.0 };
        Ok(Self {
            rho,
            collar_start,
            slope,
            config: config.clone(),
        })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn collar_start(&self) -> f64 {
        self.collar_start
    }

    /// `k_eps`, defined by `k_eps eps^(1/3) = sqrt(mu_rad(rho - eps^(2/3)))`.
    pub fn k_eps(&self) -> f64 {
        self.slope * self.config.epsilon.powf(1.0 / 3.0)
    }

    pub fn at_radius(&self, r: f64) -> f64 {
        if r <= self.collar_start {
            self.config.mu_rad(r).map(|m| m.max(0.0).sqrt()).unwrap_or(0.0)
        } else if r <= self.rho {
            self.slope * (self.rho - r)
        } else {
            0.0
        }
    }

    pub fn at(&self, x1: f64, x2: f64) -> f64 {
        self.at_radius(x1.hypot(x2))
    }
}

/// `sign * psi_eps` on the configuration grid.
pub fn thomas_fermi_ansatz(config: &ModelConfig, sign: f64) -> Result<Field> {
    let tf = ThomasFermiProfile::new(config)?;
    let s = sign.signum();
    Ok(Field::from_fn(config.grid, |x1, x2| s * tf.at(x1, x2)))
}

/// Antisymmetric ridge: a `tanh` transition of width `eps` across `x1 = 0`,
/// matched to `+-psi_eps` at `|x1| = eps^(1 - beta)`.
#[derive(Clone, Debug)]
pub struct WallProfile {
    tf: ThomasFermiProfile,
    half_width: f64,
    zeta: f64,
    epsilon: f64,
}

impl WallProfile {
    pub fn new(config: &ModelConfig) -> Result<Self> {
        let zeta = config.epsilon.powf(-WALL_BETA);
        Ok(Self {
            tf: ThomasFermiProfile::new(config)?,
            half_width: config.epsilon * zeta,
            zeta,
            epsilon: config.epsilon,
        })
    }

    /// Ridge half-width `eps * zeta_eps`.
    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    /// Amplitude `l_eps(x2)`.
    pub fn amplitude(&self, x2: f64) -> f64 {
        let rho = self.tf.rho();
        let reach = rho * rho - self.half_width * self.half_width;
        if reach <= 0.0 || x2.abs() > reach.sqrt() {
            return 0.0;
        }
        let centre = self.tf.at(0.0, x2);
        let t = (self.zeta * centre / std::f64::consts::SQRT_2).tanh();
        if t == 0.0 {
            return 0.0;
        }
        self.tf.at(self.half_width, x2) / t
    }

    pub fn at(&self, x1: f64, x2: f64) -> f64 {
        if x1.abs() <= self.half_width {
            let centre = self.tf.at(0.0, x2);
            self.amplitude(x2) * (x1 * centre / (std::f64::consts::SQRT_2 * self.epsilon)).tanh()
        } else {
            x1.signum() * self.tf.at(x1, x2)
        }
    }
}

pub fn wall_ansatz(config: &ModelConfig) -> Result<Field> {
    let wall = WallProfile::new(config)?;
    Ok(Field::from_fn(config.grid, |x1, x2| wall.at(x1, x2)))
}
