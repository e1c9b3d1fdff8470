//! Flat JSON form of [`ModelConfig`].
//!
//! Every key is optional; missing keys take the values of
//! [`ModelConfig::gaussian`] at `epsilon = 0.05`, `a = 0`. Unknown keys are
//! rejected.
//!
//! ```json
//! {
//!   "epsilon": 0.05, "a": 0.7, "mu0": -0.5, "I0": 1.0, "w": 1.0,
//!   "grid.half_extent": 2.5, "grid.nx": 251, "grid.ny": 251,
//!   "profile.type": "gaussian",
//!   "tol.residual": 1e-8, "tol.dt": 2.0, "tol.max_steps": 20000,
//!   "tol.energy_stall": 1e-15
//! }
//! ```
//!
//! A tabulated profile sets `"profile.type": "custom"` together with
//! `profile.r_max` and the sample arrays `profile.mu_rad` and
//! `profile.f_rad`, both uniformly spaced on `[0, r_max]`.
//! `profile.f_scale` multiplies the forcing of either profile type.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::model::{ModelConfig, RadialProfile, RadialTable};
use crate::solver::ToleranceSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ProfileKind {
    Gaussian,
    Custom,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    epsilon: Option<f64>,
    a: Option<f64>,
    mu0: Option<f64>,
    #[serde(rename = "I0")]
    i0: Option<f64>,
    w: Option<f64>,
    #[serde(rename = "grid.half_extent")]
    half_extent: Option<f64>,
    #[serde(rename = "grid.nx")]
    nx: Option<usize>,
    #[serde(rename = "grid.ny")]
    ny: Option<usize>,
    #[serde(rename = "profile.type")]
    profile: Option<ProfileKind>,
    #[serde(rename = "profile.r_max", skip_serializing_if = "Option::is_none")]
    r_max: Option<f64>,
    #[serde(rename = "profile.mu_rad", skip_serializing_if = "Option::is_none")]
    mu_rad: Option<Vec<f64>>,
    #[serde(rename = "profile.f_rad", skip_serializing_if = "Option::is_none")]
    f_rad: Option<Vec<f64>>,
    #[serde(rename = "profile.f_scale")]
    f_scale: Option<f64>,
    #[serde(rename = "tol.residual")]
    residual: Option<f64>,
    #[serde(rename = "tol.dt")]
    dt: Option<f64>,
    #[serde(rename = "tol.max_steps")]
    max_steps: Option<usize>,
    #[serde(rename = "tol.energy_stall")]
    energy_stall: Option<f64>,
}

impl Document {
    fn from_config(config: &ModelConfig) -> Self {
        let (profile, r_max, mu_rad, f_rad) = match &config.profile {
            RadialProfile::Gaussian => (ProfileKind::Gaussian, None, None, None),
            RadialProfile::Custom { mu_rad, f_rad } => (
                ProfileKind::Custom,
                Some(mu_rad.r_max()),
                Some(mu_rad.samples().to_vec()),
                Some(f_rad.samples().to_vec()),
            ),
        };
        let tols = config.solver_tols;
        Self {
            epsilon: Some(config.epsilon),
            a: Some(config.a),
            mu0: Some(config.mu0),
            i0: Some(config.i0),
            w: Some(config.w),
            half_extent: Some(config.grid.half_extent),
            nx: Some(config.grid.nx),
            ny: Some(config.grid.ny),
            profile: Some(profile),
            r_max,
            mu_rad,
            f_rad,
            f_scale: Some(config.forcing_scale),
            residual: Some(tols.residual_tol),
            dt: Some(tols.dt),
            max_steps: Some(tols.max_steps),
            energy_stall: Some(tols.energy_stall_tol),
        }
    }

    fn into_config(self) -> Result<ModelConfig> {
        let base = ModelConfig::gaussian(0.05, 0.0);
        let profile = match self.profile.unwrap_or(ProfileKind::Gaussian) {
            ProfileKind::Gaussian => {
                if self.r_max.is_some() || self.mu_rad.is_some() || self.f_rad.is_some() {
                    return Err(Error::InvalidConfig(
                        "profile.r_max, profile.mu_rad and profile.f_rad need \"profile.type\": \"custom\"".into(),
                    ));
                }
                RadialProfile::Gaussian
            }
            ProfileKind::Custom => {
                let missing = |key: &str| Error::InvalidConfig(format!("custom profile needs {key}"));
                let r_max = self.r_max.ok_or_else(|| missing("profile.r_max"))?;
                let mu_rad = self.mu_rad.ok_or_else(|| missing("profile.mu_rad"))?;
                let f_rad = self.f_rad.ok_or_else(|| missing("profile.f_rad"))?;
                RadialProfile::Custom {
                    mu_rad: RadialTable::new(r_max, mu_rad, false)?,
                    f_rad: RadialTable::new(r_max, f_rad, true)?,
                }
            }
        };
        let grid = GridSpec {
            half_extent: self.half_extent.unwrap_or(base.grid.half_extent),
            nx: self.nx.unwrap_or(base.grid.nx),
            ny: self.ny.unwrap_or(base.grid.ny),
        };
        let defaults = ToleranceSet::default();
        Ok(ModelConfig {
            epsilon: self.epsilon.unwrap_or(base.epsilon),
            a: self.a.unwrap_or(base.a),
            mu0: self.mu0.unwrap_or(base.mu0),
            i0: self.i0.unwrap_or(base.i0),
            w: self.w.unwrap_or(base.w),
            profile,
            forcing_scale: self.f_scale.unwrap_or(base.forcing_scale),
            grid,
            solver_tols: ToleranceSet {
                residual_tol: self.residual.unwrap_or(defaults.residual_tol),
                dt: self.dt.unwrap_or(defaults.dt),
                max_steps: self.max_steps.unwrap_or(defaults.max_steps),
                energy_stall_tol: self.energy_stall.unwrap_or(defaults.energy_stall_tol),
            },
        })
    }
}

impl ModelConfig {
    /// Parses and validates a flat JSON configuration.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let doc: Document = serde_json::from_str(text).map_err(|e| {
            let full = e.to_string();
            let position = format!(" at line {} column {}", e.line(), e.column());
            Error::ConfigParse {
                line: e.line(),
                column: e.column(),
                message: full.strip_suffix(&position).unwrap_or(&full).to_string(),
            }
        })?;
        let config = doc.into_config()?;
        config.validate()?;
        Ok(config)
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json_str(&text)
    }

    /// Pretty-printed flat JSON with every key present.
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&Document::from_config(self)).expect("config document serializes")
    }

    /// Flat JSON as a value, for embedding in other documents.
    pub fn to_json_value(&self) -> serde_json::Value {
        serde_json::to_value(Document::from_config(self)).expect("config document serializes")
    }
}
