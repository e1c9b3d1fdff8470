//! Numerical laboratory for domain walls in thin nematic films driven by a
//! localized illumination profile.
//!
//! The crate minimizes the energy
//! `E(u) = int eps/2 |grad u|^2 - mu u^2/(2 eps) + u^4/(4 eps) - a f_1 u`
//! on a square grid, computes the critical forcing amplitudes that separate
//! wall regimes, extracts walls as zero level sets, and compares minimizers
//! with their small-`eps` limits (Thomas-Fermi interior, Painleve II rim
//! layer, linear outer regime).

pub mod config;
pub mod energy;
pub mod error;
pub mod grid;
pub mod io;
pub mod model;
pub mod painleve;
pub mod quad;
pub mod solver;
pub mod thresholds;
pub mod verify;
pub mod walls;

pub use energy::{
    allen_cahn_energy, energy_identity_residual, energy_renormalized, energy_slice, energy_total,
    painleve_energy, EnergyBreakdown,
};
pub use error::{Error, Result};
pub use grid::{Field, GridSpec, Profile1D};
pub use model::{f_eval, geometry, mu_eval, validate_hypotheses, ModelConfig, ModelGeometry, RadialProfile};
pub use solver::{
    gradient_flow_run, minimize_multistart, pde_residual, thomas_fermi_ansatz, wall_ansatz, SolveResult,
    ToleranceSet,
};
pub use painleve::{airy_ai, boundary_layer_compare, hastings_mcleod, painleve_solve_alpha, rescale_boundary_layer};
pub use thresholds::{threshold_a_star, threshold_a_star_sup, threshold_report, ThresholdMesh, ThresholdReport};
pub use walls::{extract_zero_set, wall_deviation, Regime, ZeroSet};
