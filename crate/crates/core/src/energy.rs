//! Discrete energies.
//!
//! The gradient term is a sum over grid edges of squared one-step differences
//! and the pointwise terms use trapezoidal node weights. With homogeneous
//! Dirichlet data this is exactly the functional whose gradient is the
//! 5-point scheme used by the solver, so the discrete flow decreases it and
//! summation by parts holds without a consistency error.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{Field, GridSpec, KahanSum, Profile1D};
use crate::model::{geometry, ModelConfig};

/// `mu`, `f_1` and the disc weights sampled on a grid.
#[derive(Clone, Debug)]
pub struct Coefficients {
    pub grid: GridSpec,
    pub mu: Vec<f64>,
    pub f1: Vec<f64>,
    /// 1 inside `|x| < rho`, 0 outside, 1/2 within half a cell of the circle.
    pub disc: Vec<f64>,
    /// Masked trapezoidal sum of `mu^2` (times the cell area).
    disc_mu2: f64,
}

impl Coefficients {
    pub fn new(config: &ModelConfig) -> Result<Self> {
        let grid = config.grid;
        let rho = geometry(config)?.rho;
        let band = 0.5 * grid.h();
        let mut mu = Vec::with_capacity(grid.len());
        let mut f1 = Vec::with_capacity(grid.len());
        let mut disc = Vec::with_capacity(grid.len());
        for j in 0..grid.ny {
            let x2 = grid.x2(j);
            for i in 0..grid.nx {
                let x1 = grid.x1(i);
                mu.push(config.mu(x1, x2)?);
                f1.push(config.f1(x1, x2));
                let d = x1.hypot(x2) - rho;
                disc.push(if d < -band {
                    1.0
                } else if d > band {
                    0.0
                } else {
                    0.5
                });
            }
        }
        let mut acc = KahanSum::default();
        for j in 0..grid.ny {
            for i in 0..grid.nx {
                let k = grid.index(i, j);
                if disc[k] > 0.0 {
                    acc.add(grid.trap_x(i) * grid.trap_y(j) * disc[k] * mu[k] * mu[k]);
                }
            }
        }
        let disc_mu2 = acc.value() * grid.hx() * grid.hy();
        Ok(Self {
            grid,
            mu,
            f1,
            disc,
            disc_mu2,
        })
    }

    /// `int_{|x|<rho} mu^2 / (4 eps)` with the masked trapezoidal rule.
    pub fn disc_constant(&self, epsilon: f64) -> f64 {
        self.disc_mu2 / (4.0 * epsilon)
    }
}

/// Terms of the energy of one field.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub total: f64,
    pub gradient_term: f64,
    pub potential_term: f64,
    pub quartic_term: f64,
    pub forcing_term: f64,
    pub renormalized: f64,
    /// `int eps |d u / d x2|^2`.
    pub anisotropy_x2: f64,
    /// Largest energy density on the ring of nodes next to the box boundary;
    /// measures the truncation of the whole-plane integrals.
    pub boundary_ring: f64,
}

pub fn energy_total(u: &Field, config: &ModelConfig) -> Result<EnergyBreakdown> {
    u.check_grid(&config.grid)?;
    let coeffs = Coefficients::new(config)?;
    Ok(energy_with(u, &coeffs, config.epsilon, config.a))
}

/// Energy with precomputed coefficients. The grid is assumed to match.
pub fn energy_with(u: &Field, coeffs: &Coefficients, epsilon: f64, a: f64) -> EnergyBreakdown {
    let g = &u.grid;
    let (hx, hy) = (g.hx(), g.hy());
    let v = &u.values;
    // plain sums along each row, compensated accumulation across rows
    let mut grad_x = KahanSum::default();
    let mut grad_y = KahanSum::default();
    let mut pot = KahanSum::default();
    let mut quart = KahanSum::default();
    let mut forc = KahanSum::default();
    let mut ring: f64 = 0.0;
    let nx = g.nx;
    for j in 0..g.ny {
        let wy = g.trap_y(j);
        let row = &v[j * nx..(j + 1) * nx];
        let mu = &coeffs.mu[j * nx..(j + 1) * nx];
        let f1 = &coeffs.f1[j * nx..(j + 1) * nx];
        let (mut sp, mut sq, mut sf, mut sx) = (0.0, 0.0, 0.0, 0.0);
        for i in 0..nx {
            let val = row[i];
            let w = g.trap_x(i);
            let v2 = val * val;
            sp -= w * mu[i] * v2;
            sq += w * v2 * v2;
            sf -= w * f1[i] * val;
        }
        for i in 0..nx - 1 {
            let d = row[i + 1] - row[i];
            sx += d * d;
        }
        pot.add(wy * sp);
        quart.add(wy * sq);
        forc.add(wy * sf);
        grad_x.add(wy * sx);
        if j + 1 < g.ny {
            let up = &v[(j + 1) * nx..(j + 2) * nx];
            let mut sy = 0.0;
            for i in 0..nx {
                let d = up[i] - row[i];
                sy += g.trap_x(i) * d * d;
            }
            grad_y.add(sy);
        }
        if j == 1 || j + 2 == g.ny {
            for i in 1..nx - 1 {
                ring = ring.max(density(row[i], mu[i], f1[i], epsilon, a));
            }
        } else if j > 1 && j + 2 < g.ny {
            ring = ring
                .max(density(row[1], mu[1], f1[1], epsilon, a))
                .max(density(row[nx - 2], mu[nx - 2], f1[nx - 2], epsilon, a));
        }
    }
    let cell = hx * hy;
    let gx = grad_x.value() * hy / hx;
    let gy = grad_y.value() * hx / hy;
    let gradient_term = 0.5 * epsilon * (gx + gy);
    let potential_term = pot.value() * cell / (2.0 * epsilon);
    let quartic_term = quart.value() * cell / (4.0 * epsilon);
    let forcing_term = a * forc.value() * cell;
    let mut total = KahanSum::default();
    for t in [gradient_term, potential_term, quartic_term, forcing_term] {
        total.add(t);
    }
    let total = total.value();
    EnergyBreakdown {
        total,
        gradient_term,
        potential_term,
        quartic_term,
        forcing_term,
        renormalized: total + coeffs.disc_constant(epsilon),
        anisotropy_x2: epsilon * gy,
        boundary_ring: ring,
    }
}

fn density(u: f64, mu: f64, f1: f64, epsilon: f64, a: f64) -> f64 {
    let u2 = u * u;
    (-mu * u2 / (2.0 * epsilon) + u2 * u2 / (4.0 * epsilon) - a * f1 * u).abs()
}

pub fn energy_renormalized(u: &Field, config: &ModelConfig) -> Result<f64> {
    Ok(energy_total(u, config)?.renormalized)
}

/// Energy of the restriction of `u` to row `x2_index`, integrated along `x1`.
pub fn energy_slice(u: &Field, x2_index: usize, config: &ModelConfig) -> Result<f64> {
    slice_energies(u, x2_index, config).map(|(plain, _)| plain)
}

/// Renormalized slice energy: adds `int mu^2/(4 eps)` over the disc chord.
pub fn energy_slice_renormalized(u: &Field, x2_index: usize, config: &ModelConfig) -> Result<f64> {
    slice_energies(u, x2_index, config).map(|(_, renorm)| renorm)
}

fn slice_energies(u: &Field, j: usize, config: &ModelConfig) -> Result<(f64, f64)> {
    u.check_grid(&config.grid)?;
    let g = &u.grid;
    if j >= g.ny {
        return Err(Error::IndexOutOfRange { index: j, len: g.ny });
    }
    let coeffs = Coefficients::new(config)?;
    Ok(slice_with(u, &coeffs, j, config.epsilon, config.a))
}

fn slice_with(u: &Field, coeffs: &Coefficients, j: usize, epsilon: f64, a: f64) -> (f64, f64) {
    let g = &u.grid;
    let hx = g.hx();
    let row = u.row(j);
    let base = j * g.nx;
    let mut grad = KahanSum::default();
    let mut nodes = KahanSum::default();
    let mut disc = KahanSum::default();
    for i in 0..g.nx {
        let val = row[i];
        let k = base + i;
        let w = g.trap_x(i);
        if i + 1 < g.nx {
            let d = row[i + 1] - val;
            grad.add(d * d);
        }
        let dens = -coeffs.mu[k] * val * val / (2.0 * epsilon) + val.powi(4) / (4.0 * epsilon)
            - a * coeffs.f1[k] * val;
        nodes.add(w * dens);
        if coeffs.disc[k] > 0.0 {
            disc.add(w * coeffs.disc[k] * coeffs.mu[k] * coeffs.mu[k]);
        }
    }
    let plain = 0.5 * epsilon * grad.value() / hx + nodes.value() * hx;
    (plain, plain + disc.value() * hx / (4.0 * epsilon))
}

/// Renormalized slice energies of every row, in row order.
pub fn slice_profile(u: &Field, config: &ModelConfig) -> Result<Vec<(f64, f64)>> {
    u.check_grid(&config.grid)?;
    let coeffs = Coefficients::new(config)?;
    Ok((0..u.grid.ny)
        .map(|j| (u.grid.x2(j), slice_with(u, &coeffs, j, config.epsilon, config.a).1))
        .collect())
}

/// Relative defect of the identity satisfied by stationary solutions.
///
/// Testing the Euler-Lagrange equation against `u` itself gives
/// `E(u) = -int u^4/(4 eps) - (a/2) int f_1 u`; the second term vanishes
/// when `a = 0`. Returns `|E + int u^4/(4 eps) + (a/2) int f_1 u| / max(1, |E|)`.
pub fn energy_identity_residual(u: &Field, config: &ModelConfig) -> Result<f64> {
    let e = energy_total(u, config)?;
    // forcing_term = -a int f_1 u
    let defect = e.total + e.quartic_term - 0.5 * e.forcing_term;
    Ok(defect.abs() / e.total.abs().max(1.0))
}

/// The identity without the forcing correction, `|E + int u^4/(4 eps)| / max(1, |E|)`.
/// It characterises stationary solutions only when `a = 0`.
pub fn energy_identity_residual_unforced(u: &Field, config: &ModelConfig) -> Result<f64> {
    let e = energy_total(u, config)?;
    Ok((e.total + e.quartic_term).abs() / e.total.abs().max(1.0))
}

fn check_window(p: &Profile1D, window: (f64, f64)) -> Result<()> {
    let (lo, hi) = window;
    let tol = 1e-12 * (p.s_max - p.s_min);
    if !(lo <= hi) || lo < p.s_min - tol || hi > p.s_max + tol {
        return Err(Error::WindowOutsideDomain {
            lo,
            hi,
            s_min: p.s_min,
            s_max: p.s_max,
        });
    }
    Ok(())
}

/// Cellwise quadrature of `1/2 |y'|^2 + P(s, y)` over `window`: one-step
/// differences for the derivative and the trapezoidal rule for `P`, with
/// cells cut by the window weighted by their overlap.
fn profile_energy(p: &Profile1D, window: (f64, f64), density: impl Fn(f64, f64) -> f64) -> Result<f64> {
    check_window(p, window)?;
    let h = p.spacing();
    let mut acc = KahanSum::default();
    for k in 0..p.n() - 1 {
        let (a, b) = (p.s(k), p.s(k + 1));
        let overlap = (b.min(window.1) - a.max(window.0)).max(0.0);
        if overlap == 0.0 {
            continue;
        }
        let (ya, yb) = (p.values[k], p.values[k + 1]);
        let slope = (yb - ya) / h;
        let cell = 0.5 * slope * slope + 0.5 * (density(a, ya) + density(b, yb));
        acc.add(overlap * cell);
    }
    Ok(acc.value())
}

/// `int 1/2 |y'|^2 + 1/2 s y^2 + 1/2 y^4 + alpha y` over `window`.
pub fn painleve_energy(y: &Profile1D, alpha: f64, window: (f64, f64)) -> Result<f64> {
    profile_energy(y, window, |s, v| 0.5 * s * v * v + 0.5 * v.powi(4) + alpha * v)
}

/// `int 1/2 |u'|^2 + 1/4 (1 - u^2)^2` over `window`.
pub fn allen_cahn_energy(u: &Profile1D, window: (f64, f64)) -> Result<f64> {
    profile_energy(u, window, |_, v| 0.25 * (1.0 - v * v).powi(2))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;

    fn config(eps: f64, a: f64, n: usize) -> ModelConfig {
        ModelConfig::gaussian(eps, a).with_grid(GridSpec::square(2.5, n).unwrap())
    }

    #[test]
    fn zero_field_has_zero_energy() {
        let c = config(0.1, 1.0, 41);
        let e = energy_total(&Field::zeros(c.grid), &c).unwrap();
        assert_eq!(e.total, 0.0);
        assert_eq!(e.gradient_term, 0.0);
        assert_eq!(e.forcing_term, 0.0);
        assert_eq!(energy_identity_residual(&Field::zeros(c.grid), &c).unwrap(), 0.0);
    }

    #[test]
    fn constant_field_has_no_gradient_or_forcing() {
        let c = config(0.1, 1.3, 61);
        let u = Field::from_fn(c.grid, |_, _| 0.7);
        let e = energy_total(&u, &c).unwrap();
        assert_eq!(e.gradient_term, 0.0);
        assert!(e.forcing_term.abs() < 1e-12);
        let sum = e.gradient_term + e.potential_term + e.quartic_term + e.forcing_term;
        assert!((e.total - sum).abs() <= 1e-12 * e.total.abs());
    }

    #[test]
    fn slice_outside_disc_has_empty_mask() {
        let c = config(0.1, 0.0, 41);
        let u = Field::zeros(c.grid);
        let j = c.grid.nearest_row(2.0);
        assert_eq!(energy_slice(&u, j, &c).unwrap(), 0.0);
        assert_eq!(energy_slice_renormalized(&u, j, &c).unwrap(), 0.0);
        let j0 = c.grid.nearest_row(0.0);
        assert!(energy_slice_renormalized(&u, j0, &c).unwrap() > 0.0);
        assert!(matches!(energy_slice(&u, 41, &c), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn grid_mismatch_is_rejected() {
        let c = config(0.1, 0.0, 41);
        let u = Field::zeros(GridSpec::square(2.5, 43).unwrap());
        assert!(matches!(energy_total(&u, &c), Err(Error::GridMismatch { .. })));
    }

    #[test]
    fn allen_cahn_examples() {
        let one = Profile1D::from_fn(-1.0, 1.0, 11, |_| 1.0).unwrap();
        assert_eq!(allen_cahn_energy(&one, (-1.0, 1.0)).unwrap(), 0.0);
        let zero = Profile1D::from_fn(-1.0, 2.0, 31, |_| 0.0).unwrap();
        assert!((allen_cahn_energy(&zero, (0.0, 1.0)).unwrap() - 0.25).abs() < 1e-14);
        assert!(allen_cahn_energy(&zero, (0.0, 3.0)).is_err());
    }

    #[test]
    fn painleve_energy_of_zero() {
        let zero = Profile1D::from_fn(-5.0, 5.0, 101, |_| 0.0).unwrap();
        assert_eq!(painleve_energy(&zero, 0.3, (-2.0, 1.5)).unwrap(), 0.0);
    }
}
