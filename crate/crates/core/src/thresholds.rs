//! Critical forcing amplitudes.
//!
//! On the chord `{x2 = const, |x| < rho}` with half-length `c = sqrt(rho^2 - x2^2)`
//! write `G(x1) = int_{-c}^{x1} |f_1(t, x2)| sqrt(mu(t, x2)) dt`. The lower
//! threshold is the infimum over the left half-disc of
//! `sqrt(2) mu^(3/2) / (3 G(x1))`; the upper one is the supremum of
//! `sqrt(2) (mu(0, x2)^(3/2) - mu^(3/2)) / (3 (G(0) - G(x1)))`.
//! When `f = -grad(mu)/2`, `3 G = mu^(3/2)` along every chord and both
//! ratios are identically `sqrt(2)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{geometry, validate_hypotheses, ModelConfig};
use crate::quad::{adaptive_integral, golden_min, integrate_sqrt_left, integrate_sqrt_right};

const SQRT2: f64 = std::f64::consts::SQRT_2;
/// Below this distance to `x1 = 0` the upper ratio is replaced by its
/// derivative ratio.
const LHOPITAL_BAND: f64 = 1e-3;

/// Resolution of the scan that precedes local refinement.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdMesh {
    /// Number of chords across `(-rho, rho)`.
    pub slices: usize,
    /// Points per chord.
    pub points: usize,
    /// Relative tolerance of the chord integrals.
    pub rel_tol: f64,
}

impl Default for ThresholdMesh {
    fn default() -> Self {
        Self {
            slices: 64,
            points: 128,
            rel_tol: 1e-9,
        }
    }
}

impl ThresholdMesh {
    fn validate(&self) -> Result<()> {
        if self.slices < 4 || self.points < 4 || !(self.rel_tol > 0.0) {
            return Err(Error::InvalidConfig(format!("threshold mesh too coarse: {self:?}")));
        }
        Ok(())
    }

    fn halved(&self) -> Self {
        Self {
            slices: (self.slices / 2).max(4),
            points: (self.points / 2).max(4),
            ..*self
        }
    }
}

/// Per-chord thresholds.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SliceThreshold {
    pub x2: f64,
    pub a_lower: f64,
    pub a_upper: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    /// `a_*`.
    pub a_star: f64,
    /// `a^*`.
    pub a_star_sup: f64,
    /// Ratio of the disc integrals that lies between the two thresholds.
    pub middle_bound: f64,
    pub slices: Vec<SliceThreshold>,
    /// Point of the half-disc where the infimum is attained.
    pub argmin: [f64; 2],
    /// Point where the supremum is attained.
    pub argmax: [f64; 2],
    /// Change of `a_*` / `a^*` when the scan mesh is halved.
    pub mesh_error_lower: f64,
    pub mesh_error_upper: f64,
    /// `f_rad'(0) > 0`; without it the supremum need not be finite.
    pub upper_finite_guaranteed: bool,
}

/// One chord of the disc.
struct Chord<'a> {
    config: &'a ModelConfig,
    x2: f64,
    c: f64,
    mu_centre: f64,
    rel_tol: f64,
}

impl<'a> Chord<'a> {
    fn new(config: &'a ModelConfig, rho: f64, x2: f64, rel_tol: f64) -> Result<Self> {
        if x2.abs() >= rho {
            return Err(Error::OutsideRegion {
                x1: 0.0,
                x2,
                reason: format!("|x2| must be below rho = {rho}"),
            });
        }
        Ok(Self {
            config,
            x2,
            c: (rho * rho - x2 * x2).sqrt(),
            mu_centre: config.mu(0.0, x2)?.max(0.0),
            rel_tol,
        })
    }

    fn mu(&self, t: f64) -> f64 {
        self.config.mu(t, self.x2).map(|m| m.max(0.0)).unwrap_or(0.0)
    }

    fn integrand(&self, t: f64) -> f64 {
        self.config.f1(t, self.x2).abs() * self.mu(t).sqrt()
    }

    /// `int_{-c}^{x1}`.
    fn left_integral(&self, x1: f64) -> f64 {
        integrate_sqrt_left(&|t| self.integrand(t), -self.c, x1, self.rel_tol)
    }

    /// `int_{x1}^{0}`.
    fn right_integral(&self, x1: f64) -> f64 {
        if x1 >= -0.5 * self.c {
            adaptive_integral(&|t| self.integrand(t), x1, 0.0, self.rel_tol, 1e-300)
        } else {
            self.left_integral(0.0) - self.left_integral(x1)
        }
    }

    fn lower_ratio(&self, x1: f64) -> f64 {
        if x1 <= -self.c {
            return f64::INFINITY;
        }
        let g = self.left_integral(x1);
        if g <= 0.0 {
            return f64::INFINITY;
        }
        SQRT2 * self.mu(x1).powf(1.5) / (3.0 * g)
    }

    fn upper_ratio(&self, x1: f64) -> f64 {
        if x1.abs() < LHOPITAL_BAND {
            // both sides vanish at x1 = 0: ratio of derivatives,
            // sqrt(2)/2 * d_t mu / |f_1| (the sqrt(mu) factors cancel),
            // taken at x1/sqrt(2), the mean-value point for integrands even
            // in x1 up to O(x1^4)
            let t = if x1 == 0.0 { -1e-8 } else { x1 * std::f64::consts::FRAC_1_SQRT_2 };
            return self.derivative_ratio(t);
        }
        let g = self.right_integral(x1);
        SQRT2 * (self.mu_centre.powf(1.5) - self.mu(x1).powf(1.5)) / (3.0 * g)
    }

    /// `sqrt(2)/2 * d_t mu / |f_1|`, the limit of both ratios where numerator
    /// and denominator vanish together. Both carry the factor `|t|/r`, so this
    /// is `sqrt(2)/2 * (-mu_rad'(r)) / f_rad(r)`; `r` is kept off the origin
    /// where tabulated derivatives lose all digits.
    fn derivative_ratio(&self, t: f64) -> f64 {
        let r = t.hypot(self.x2).max(1e-3 * self.c);
        SQRT2 / 2.0 * -self.config.mu_rad_prime(r).unwrap_or(0.0) / self.config.f_rad(r)
    }

    /// `(argmin, min)` of the lower ratio on `(-c, 0]`, the rim limit included.
    fn lower_extremum(&self, points: usize) -> (f64, f64) {
        let f = |x1: f64| self.lower_ratio(x1);
        let inner = scan_and_refine(&f, -self.c, 0.0, points, false);
        let rim = self.derivative_ratio(-self.c);
        if rim < inner.1 {
            (-self.c, rim)
        } else {
            inner
        }
    }

    /// `(argmax, max)` of the upper ratio on `[-c, 0)`.
    fn upper_extremum(&self, points: usize) -> (f64, f64) {
        let f = |x1: f64| -self.upper_ratio(x1);
        let (x, v) = scan_and_refine(&f, -self.c, 0.0, points, true);
        (x, -v)
    }
}

/// Minimum of `f` over the mesh `lo + (hi - lo) k / points` (`k = 1..=points`,
/// plus `k = 0` when `include_lo`), refined by golden-section search on the
/// bracket around the best node.
fn scan_and_refine(f: &impl Fn(f64) -> f64, lo: f64, hi: f64, points: usize, include_lo: bool) -> (f64, f64) {
    let step = (hi - lo) / points as f64;
    let first = if include_lo { 0 } else { 1 };
    let mut best = (first, f64::INFINITY);
    for k in first..=points {
        let v = f(lo + step * k as f64);
        if v < best.1 {
            best = (k, v);
        }
    }
    let (k, v) = best;
    let a = lo + step * (k.saturating_sub(1)).max(first) as f64;
    let b = lo + step * (k + 1).min(points) as f64;
    // keep off the excluded endpoint, where mu is dominated by cancellation
    let a = if include_lo { a } else { a.max(lo + 1e-6 * (hi - lo)) };
    let (x, fx) = golden_min(f, a, b, 1e-10 * (hi - lo).max(1e-300));
    if fx < v {
        (x, fx)
    } else {
        (lo + step * k as f64, v)
    }
}

fn rho_of(config: &ModelConfig) -> Result<f64> {
    Ok(geometry(config)?.rho)
}

fn slice_positions(rho: f64, n: usize) -> Vec<f64> {
    (0..n).map(|k| -rho + 2.0 * rho * (k as f64 + 0.5) / n as f64).collect()
}

/// Global extremum over chords: scan the chord mesh, then refine `x2` by
/// golden-section search with the inner chord optimisation nested inside.
fn global_extremum(config: &ModelConfig, mesh: &ThresholdMesh, upper: bool) -> Result<([f64; 2], f64, Vec<(f64, f64)>)> {
    mesh.validate()?;
    let rho = rho_of(config)?;
    let xs = slice_positions(rho, mesh.slices);
    // minimise `sign * ratio`
    let sign = if upper { -1.0 } else { 1.0 };
    let chord_best = |x2: f64| -> (f64, f64) {
        match Chord::new(config, rho, x2, mesh.rel_tol) {
            Ok(ch) => {
                let (x1, v) = if upper { ch.upper_extremum(mesh.points) } else { ch.lower_extremum(mesh.points) };
                (x1, sign * v)
            }
            Err(_) => (0.0, f64::INFINITY),
        }
    };
    let mut values = Vec::with_capacity(xs.len());
    let mut best = (0, f64::INFINITY, 0.0);
    for (k, &x2) in xs.iter().enumerate() {
        let (x1, v) = chord_best(x2);
        values.push((x2, sign * v));
        if v < best.1 {
            best = (k, v, x1);
        }
    }
    if !best.1.is_finite() {
        return Err(Error::EmptySet("no chord produced a finite ratio".into()));
    }
    let (k, _, _) = best;
    let edge = rho * (1.0 - 1e-9);
    let lo = if k == 0 { -edge } else { xs[k - 1] };
    let hi = if k + 1 == xs.len() { edge } else { xs[k + 1] };
    let (x2, _) = golden_min(&|x2: f64| chord_best(x2).1, lo, hi, 1e-9 * rho);
    let (x1_ref, v_ref) = chord_best(x2);
    let (point, value) = if v_ref <= best.1 {
        ([x1_ref, x2], v_ref)
    } else {
        ([best.2, xs[k]], best.1)
    };
    Ok((point, sign * value, values))
}

/// `a_*`: infimum of the lower ratio over the left half-disc.
pub fn threshold_a_star(config: &ModelConfig, mesh: &ThresholdMesh) -> Result<f64> {
    Ok(global_extremum(config, mesh, false)?.1)
}

/// `a^*`: supremum of the upper ratio over the left half-disc.
pub fn threshold_a_star_sup(config: &ModelConfig, mesh: &ThresholdMesh) -> Result<f64> {
    Ok(global_extremum(config, mesh, true)?.1)
}

/// `(a_*(x2), a^*(x2))` for each requested chord.
pub fn threshold_slices(config: &ModelConfig, x2_values: &[f64], mesh: &ThresholdMesh) -> Result<Vec<SliceThreshold>> {
    mesh.validate()?;
    let rho = rho_of(config)?;
    x2_values
        .iter()
        .map(|&x2| {
            let ch = Chord::new(config, rho, x2, mesh.rel_tol)?;
            Ok(SliceThreshold {
                x2,
                a_lower: ch.lower_extremum(mesh.points).1,
                a_upper: ch.upper_extremum(mesh.points).1,
            })
        })
        .collect()
}

/// `2 sqrt(2) int_{-rho}^{rho} mu_rad^(3/2) dr / (3 int_{D(0,rho)} |f_1| sqrt(mu))`.
///
/// In polar coordinates `|f_1| = f_rad(r) |cos(theta)|` and the angular
/// integral of `|cos|` is 4.
pub fn middle_bound(config: &ModelConfig) -> Result<f64> {
    let rho = rho_of(config)?;
    let mu = |r: f64| config.mu_rad(r).map(|m| m.max(0.0)).unwrap_or(0.0);
    let top = 2.0 * integrate_sqrt_right(&|r| mu(r).powf(1.5), 0.0, rho, 1e-12);
    let bottom = 4.0 * integrate_sqrt_right(&|r| config.f_rad(r) * mu(r).sqrt() * r, 0.0, rho, 1e-12);
    if !(bottom > 0.0) {
        return Err(Error::EmptySet("forcing vanishes on the disc".into()));
    }
    Ok(2.0 * SQRT2 * top / (3.0 * bottom))
}

pub fn threshold_report(config: &ModelConfig, mesh: &ThresholdMesh) -> Result<ThresholdReport> {
    let (argmin, a_star, lower) = global_extremum(config, mesh, false)?;
    let (argmax, a_star_sup, upper) = global_extremum(config, mesh, true)?;
    let coarse = mesh.halved();
    let coarse_lower = threshold_a_star(config, &coarse)?;
    let coarse_upper = threshold_a_star_sup(config, &coarse)?;
    let slices = lower
        .iter()
        .zip(&upper)
        .map(|(&(x2, a_lower), &(_, a_upper))| SliceThreshold { x2, a_lower, a_upper })
        .collect();
    Ok(ThresholdReport {
        a_star,
        a_star_sup,
        middle_bound: middle_bound(config)?,
        slices,
        argmin,
        argmax,
        mesh_error_lower: (a_star - coarse_lower).abs(),
        mesh_error_upper: (a_star_sup - coarse_upper).abs(),
        upper_finite_guaranteed: validate_hypotheses(config).f_prime_origin_positive,
    })
}

/// `(beta_*, beta^*)` at `x` for amplitude `a`:
/// `beta_* = sqrt(2)/3 mu^(3/2) - a int_{-c}^{x1} |f_1| sqrt(mu)` and
/// `beta^* = sqrt(2)/3 (mu(0, x2)^(3/2) - mu^(3/2)) - a int_{x1}^0 |f_1| sqrt(mu)`.
pub fn beta_functions(config: &ModelConfig, a: f64, x: [f64; 2]) -> Result<(f64, f64)> {
    let rho = rho_of(config)?;
    let [x1, x2] = x;
    let r = x1.hypot(x2);
    if x1 > 0.0 || r > rho * (1.0 + 1e-12) {
        return Err(Error::OutsideRegion {
            x1,
            x2,
            reason: "beta functions are defined on the closed left half-disc".into(),
        });
    }
    if x2.abs() >= rho {
        // the chord degenerates to the point (0, +-rho) where mu = 0
        return Ok((0.0, 0.0));
    }
    let ch = Chord::new(config, rho, x2, 1e-11)?;
    let x1 = x1.max(-ch.c);
    let m = ch.mu(x1).powf(1.5);
    let lower = SQRT2 / 3.0 * m - a * ch.left_integral(x1);
    let upper = SQRT2 / 3.0 * (ch.mu_centre.powf(1.5) - m) - a * ch.right_integral(x1);
    Ok((lower, upper))
}
