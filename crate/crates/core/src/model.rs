//! Illumination profile `mu`, forcing `f`, and the derived disc geometry.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::grid::{lagrange4, GridSpec};
use crate::solver::ToleranceSet;

/// Uniformly sampled radial table on `[0, r_max]`, extended to negative
/// radii by parity so that interpolation near the origin stays symmetric.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialTable {
    r_max: f64,
    samples: Vec<f64>,
    extended: Vec<f64>,
}

const GHOSTS: usize = 3;

impl RadialTable {
    /// `odd` selects the odd extension `g(-r) = -g(r)`; otherwise even.
    pub fn new(r_max: f64, samples: Vec<f64>, odd: bool) -> Result<Self> {
        if !(r_max > 0.0) || samples.len() < 4 {
            return Err(Error::InvalidConfig(format!(
                "radial table needs r_max > 0 and >= 4 samples (got r_max={r_max}, {} samples)",
                samples.len()
            )));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidConfig("radial table has non-finite samples".into()));
        }
        let parity = if odd { -1.0 } else { 1.0 };
        let mut extended = Vec::with_capacity(samples.len() + GHOSTS);
        for k in (1..=GHOSTS).rev() {
            extended.push(parity * samples[k]);
        }
        extended.extend_from_slice(&samples);
        Ok(Self {
            r_max,
            samples,
            extended,
        })
    }

    pub fn from_fn(r_max: f64, n: usize, f: impl Fn(f64) -> f64, odd: bool) -> Result<Self> {
        let step = r_max / (n.max(2) - 1) as f64;
        Self::new(r_max, (0..n).map(|k| f(k as f64 * step)).collect(), odd)
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn spacing(&self) -> f64 {
        self.r_max / (self.samples.len() - 1) as f64
    }

    pub fn covers(&self, r: f64) -> bool {
        r <= self.r_max * (1.0 + 1e-12)
    }

    /// Interpolated value; the caller checks coverage.
    pub fn eval_unchecked(&self, r: f64) -> f64 {
        let x = r / self.spacing() + GHOSTS as f64;
        lagrange4(&self.extended, x)
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        if !self.covers(r) {
            return Err(Error::OutOfRange {
                r,
                r_max: self.r_max,
            });
        }
        Ok(self.eval_unchecked(r))
    }

    /// Centered difference of the interpolant.
    pub fn derivative(&self, r: f64) -> Result<f64> {
        let d = 0.01 * self.spacing();
        let hi = (r + d).min(self.r_max);
        let lo = r - d;
        Ok((self.eval(hi)? - self.eval_unchecked(lo)) / (hi - lo))
    }
}

/// Radial shape of `mu` and `f`.
#[derive(Clone, Debug, PartialEq)]
pub enum RadialProfile {
    /// `mu = mu0 + I0 exp(-|x|^2 / w^2)` and `f = -grad(mu) / 2`.
    Gaussian,
    /// Tabulated `mu_rad` and `f_rad`.
    Custom { mu_rad: RadialTable, f_rad: RadialTable },
}

/// Physical and numerical parameters of one problem instance.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelConfig {
    pub epsilon: f64,
    pub a: f64,
    pub mu0: f64,
    pub i0: f64,
    pub w: f64,
    pub profile: RadialProfile,
    /// Multiplies `f` (1 reproduces the default profile).
    pub forcing_scale: f64,
    pub grid: GridSpec,
    pub solver_tols: ToleranceSet,
}

impl ModelConfig {
    /// Gaussian instance with `mu0 = -0.5`, `I0 = 1`, `w = 1` on `[-2.5, 2.5]^2`.
    pub fn gaussian(epsilon: f64, a: f64) -> Self {
        Self {
            epsilon,
            a,
            mu0: -0.5,
            i0: 1.0,
            w: 1.0,
            profile: RadialProfile::Gaussian,
            forcing_scale: 1.0,
            grid: GridSpec {
                half_extent: 2.5,
                nx: 251,
                ny: 251,
            },
            solver_tols: ToleranceSet::default(),
        }
    }

    pub fn custom(mu_rad: RadialTable, f_rad: RadialTable, epsilon: f64, a: f64, grid: GridSpec) -> Self {
        Self {
            profile: RadialProfile::Custom { mu_rad, f_rad },
            grid,
            ..Self::gaussian(epsilon, a)
        }
    }

    pub fn with_grid(mut self, grid: GridSpec) -> Self {
        self.grid = grid;
        self
    }

    pub fn with_epsilon(mut self, epsilon: f64) -> Self {
        self.epsilon = epsilon;
        self
    }

    pub fn with_a(mut self, a: f64) -> Self {
        self.a = a;
        self
    }

    pub fn is_gaussian(&self) -> bool {
        matches!(self.profile, RadialProfile::Gaussian)
    }

    /// Checks the parameter invariants (not the profile hypotheses, see
    /// [`validate_hypotheses`]).
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::InvalidConfig(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if !(self.a.is_finite() && self.a >= 0.0) {
            return Err(Error::InvalidConfig(format!("a must be nonnegative, got {}", self.a)));
        }
        if !(self.forcing_scale.is_finite() && self.forcing_scale > 0.0) {
            return Err(Error::InvalidConfig(format!(
                "forcing scale must be positive, got {}",
                self.forcing_scale
            )));
        }
        if self.is_gaussian() {
            if !(self.i0 > 0.0 && self.w > 0.0) {
                return Err(Error::InvalidConfig("I0 and w must be positive".into()));
            }
            if !(-self.i0 < self.mu0 && self.mu0 < 0.0) {
                return Err(Error::InvalidConfig(format!(
                    "need -I0 < mu0 < 0, got mu0={} I0={}",
                    self.mu0, self.i0
                )));
            }
        }
        self.grid.validate()?;
        self.solver_tols.validate()?;
        let geo = geometry(self)?;
        if self.grid.half_extent <= geo.rho {
            return Err(Error::InvalidConfig(format!(
                "grid half extent {} must exceed rho = {}",
                self.grid.half_extent, geo.rho
            )));
        }
        Ok(())
    }

    /// `mu_rad(r)`.
    pub fn mu_rad(&self, r: f64) -> Result<f64> {
        match &self.profile {
            RadialProfile::Gaussian => Ok(self.mu0 + self.i0 * (-(r * r) / (self.w * self.w)).exp()),
            RadialProfile::Custom { mu_rad, .. } => mu_rad.eval(r.abs()),
        }
    }

    /// `mu_rad'(r)`; analytic for the Gaussian, centered differences otherwise.
    pub fn mu_rad_prime(&self, r: f64) -> Result<f64> {
        match &self.profile {
            RadialProfile::Gaussian => {
                let w2 = self.w * self.w;
                Ok(-2.0 * r / w2 * self.i0 * (-(r * r) / w2).exp())
            }
            RadialProfile::Custom { mu_rad, .. } => mu_rad.derivative(r),
        }
    }

    /// `f_rad(r)` including the forcing scale; tables are extended by zero.
    pub fn f_rad(&self, r: f64) -> f64 {
        let base = match &self.profile {
            RadialProfile::Gaussian => {
                let w2 = self.w * self.w;
                self.i0 / w2 * r * (-(r * r) / w2).exp()
            }
            RadialProfile::Custom { f_rad, .. } => {
                if f_rad.covers(r.abs()) {
                    f_rad.eval_unchecked(r)
                } else {
                    0.0
                }
            }
        };
        self.forcing_scale * base
    }

    /// First component `f_1(x)`.
    #[inline]
    pub fn f1(&self, x1: f64, x2: f64) -> f64 {
        let r = x1.hypot(x2);
        if r == 0.0 {
            return 0.0;
        }
        match &self.profile {
            // avoid the division for the common case
            RadialProfile::Gaussian => {
                let w2 = self.w * self.w;
                self.forcing_scale * self.i0 / w2 * (-(x1 * x1 + x2 * x2) / w2).exp() * x1
            }
            _ => self.f_rad(r) * x1 / r,
        }
    }

    /// `mu(x)` for a point given by coordinates.
    #[inline]
    pub fn mu(&self, x1: f64, x2: f64) -> Result<f64> {
        match &self.profile {
            RadialProfile::Gaussian => {
                Ok(self.mu0 + self.i0 * (-(x1 * x1 + x2 * x2) / (self.w * self.w)).exp())
            }
            _ => self.mu_rad(x1.hypot(x2)),
        }
    }
}

/// `mu(x)`.
pub fn mu_eval(config: &ModelConfig, x: [f64; 2]) -> Result<f64> {
    config.mu(x[0], x[1])
}

/// `f(x) = f_rad(|x|) x / |x|`, zero at the origin.
pub fn f_eval(config: &ModelConfig, x: [f64; 2]) -> [f64; 2] {
    let r = x[0].hypot(x[1]);
    if r == 0.0 {
        return [0.0, 0.0];
    }
    let fr = config.f_rad(r);
    [fr * x[0] / r, fr * x[1] / r]
}

/// Radius of the bistable disc and the slope of `mu_rad` there.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelGeometry {
    pub rho: f64,
    pub mu1: f64,
    pub mu_origin: f64,
}

pub fn geometry(config: &ModelConfig) -> Result<ModelGeometry> {
    match &config.profile {
        RadialProfile::Gaussian => {
            let (mu0, i0, w) = (config.mu0, config.i0, config.w);
            if !(mu0 < 0.0 && mu0 + i0 > 0.0) {
                return Err(Error::NoRoot(format!("need mu0 < 0 < mu0 + I0, got mu0={mu0} I0={i0}")));
            }
            let rho = w * (i0 / (-mu0)).ln().sqrt();
            Ok(ModelGeometry {
                rho,
                mu1: -(2.0 * rho / (w * w)) * (-mu0),
                mu_origin: mu0 + i0,
            })
        }
        RadialProfile::Custom { mu_rad, .. } => {
            let r_max = mu_rad.r_max();
            let at0 = mu_rad.eval(0.0)?;
            let at_end = mu_rad.eval(r_max)?;
            if !(at0 > 0.0 && at_end < 0.0) {
                return Err(Error::NoRoot(format!(
                    "mu_rad(0) = {at0} and mu_rad({r_max}) = {at_end} do not bracket a zero"
                )));
            }
            let (mut lo, mut hi) = (0.0, r_max);
            while hi - lo > 1e-12 {
                let mid = 0.5 * (lo + hi);
                if mu_rad.eval_unchecked(mid) > 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let rho = 0.5 * (lo + hi);
            Ok(ModelGeometry {
                rho,
                mu1: mu_rad.derivative(rho)?,
                mu_origin: at0,
            })
        }
    }
}

/// Outcome of sampling the profile hypotheses on a fine radial mesh.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub mu_decreasing: bool,
    pub unique_zero: bool,
    pub f_positive: bool,
    pub bounded: bool,
    /// `f_rad'(0) > 0`, required for a finite upper threshold.
    pub f_prime_origin_positive: bool,
    pub failures: Vec<String>,
}

impl HypothesisReport {
    pub fn passed(&self) -> bool {
        self.mu_decreasing && self.unique_zero && self.f_positive && self.bounded
    }
}

pub fn validate_hypotheses(config: &ModelConfig) -> HypothesisReport {
    const SAMPLES: usize = 4000;
    // tabulated profiles are checked on their whole table
    let mut r_end = 2.0 * config.grid.half_extent;
    if let RadialProfile::Custom { mu_rad, f_rad } = &config.profile {
        r_end = mu_rad.r_max().min(f_rad.r_max());
    }
    let mut failures = Vec::new();
    let mut mu_decreasing = true;
    let mut f_positive = true;
    let mut bounded = true;
    let mut sign_changes = 0;
    let mut prev_mu: Option<f64> = None;
    for k in 1..=SAMPLES {
        let r = r_end * k as f64 / SAMPLES as f64;
        let (mu, dmu) = match (config.mu_rad(r), config.mu_rad_prime(r)) {
            (Ok(a), Ok(b)) => (a, b),
            _ => {
                bounded = false;
                continue;
            }
        };
        let f = config.f_rad(r);
        if !(mu.is_finite() && dmu.is_finite() && f.is_finite()) {
            bounded = false;
            continue;
        }
        if mu_decreasing && dmu >= 0.0 {
            mu_decreasing = false;
            failures.push(format!("mu_rad' = {dmu:e} >= 0 at r = {r:.6}"));
        }
        if f_positive && f <= 0.0 {
            f_positive = false;
            failures.push(format!("f_rad = {f:e} <= 0 at r = {r:.6}"));
        }
        if let Some(p) = prev_mu {
            if (p > 0.0) != (mu > 0.0) {
                sign_changes += 1;
            }
        }
        prev_mu = Some(mu);
    }
    if let Ok(m0) = config.mu_rad(0.0) {
        if let Some(first) = config.mu_rad(r_end / SAMPLES as f64).ok() {
            if (m0 > 0.0) != (first > 0.0) {
                sign_changes += 1;
            }
        }
    }
    let unique_zero = sign_changes == 1;
    if !unique_zero {
        failures.push(format!("mu_rad changes sign {sign_changes} times on (0, {r_end}]"));
    }
    if !bounded {
        failures.push("mu or f not finite / not evaluable on the sampling range".into());
    }
    let delta = 1e-6;
    let f_prime_origin_positive = config.f_rad(delta) / delta > 0.0;
    HypothesisReport {
        mu_decreasing,
        unique_zero,
        f_positive,
        bounded,
        f_prime_origin_positive,
        failures,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> ModelConfig {
        ModelConfig::gaussian(0.05, 0.0)
    }

    fn custom_grid() -> GridSpec {
        GridSpec::square(1.5, 64).unwrap()
    }

    #[test]
    fn mu_examples() {
        let c = base();
        assert_eq!(mu_eval(&c, [0.0, 0.0]).unwrap(), 0.5);
        let rho = 2f64.ln().sqrt();
        assert!(mu_eval(&c, [rho, 0.0]).unwrap().abs() < 1e-15);
        let v = mu_eval(&c, [2.0, 0.0]).unwrap();
        assert!((v - (-0.5 + (-4f64).exp())).abs() < 1e-15);
        assert!((v + 0.48168).abs() < 1e-5);
    }

    #[test]
    fn f_examples() {
        let c = base();
        assert_eq!(f_eval(&c, [0.0, 0.0]), [0.0, 0.0]);
        let e1 = (-1f64).exp();
        let f = f_eval(&c, [1.0, 0.0]);
        assert!((f[0] - e1).abs() < 1e-15 && f[1] == 0.0);
        let f = f_eval(&c, [0.0, 1.0]);
        assert!(f[0] == 0.0 && (f[1] - e1).abs() < 1e-15);
        assert_eq!(c.f1(1.0, 0.0), f_eval(&c, [1.0, 0.0])[0]);
    }

    #[test]
    fn geometry_closed_forms() {
        let g = geometry(&base()).unwrap();
        let rho = 2f64.ln().sqrt();
        assert!((g.rho - rho).abs() < 1e-15);
        assert!((g.mu1 + 2.0 * rho * 0.5).abs() < 1e-15);
        assert!((g.rho - 0.83255).abs() < 1e-5);

        let mut c = base();
        c.mu0 = -1.0;
        c.i0 = std::f64::consts::E;
        let g = geometry(&c).unwrap();
        assert!((g.rho - 1.0).abs() < 1e-15);
        assert!((g.mu1 + 2.0).abs() < 1e-14);
    }

    #[test]
    fn geometry_custom_table_matches_bisection_oracle() {
        let mu = RadialTable::from_fn(2.0, 801, |r| 1.0 - r * r, false).unwrap();
        let f = RadialTable::from_fn(2.0, 801, |r| r, true).unwrap();
        let c = ModelConfig::custom(mu, f, 0.05, 0.0, custom_grid());
        let g = geometry(&c).unwrap();
        // oracle: bisection on the closed form and a centered difference of it
        let (mut lo, mut hi) = (0.0f64, 2.0f64);
        for _ in 0..200 {
            let m = 0.5 * (lo + hi);
            if 1.0 - m * m > 0.0 {
                lo = m
            } else {
                hi = m
            }
        }
        let d = 1e-6;
        let slope = ((1.0 - (lo + d).powi(2)) - (1.0 - (lo - d).powi(2))) / (2.0 * d);
        assert!((g.rho - lo).abs() < 1e-11, "{}", g.rho);
        assert!((g.mu1 - slope).abs() < 1e-6, "{}", g.mu1);
    }

    #[test]
    fn geometry_requires_sign_change() {
        let mut c = base();
        c.mu0 = 0.1;
        assert!(matches!(geometry(&c), Err(Error::NoRoot(_))));
    }

    #[test]
    fn radial_and_odd_symmetries() {
        let c = base();
        for &(x, y) in &[(0.3, 0.7), (1.2, -0.4), (-2.0, 0.9)] {
            let m = mu_eval(&c, [x, y]).unwrap();
            assert_eq!(m, mu_eval(&c, [-x, y]).unwrap());
            assert_eq!(m, mu_eval(&c, [y, x]).unwrap());
            let f = f_eval(&c, [x, y]);
            let g = f_eval(&c, [-x, -y]);
            assert_eq!(f[0], -g[0]);
            assert_eq!(f[1], -g[1]);
        }
    }

    #[test]
    fn forcing_is_minus_half_gradient() {
        let c = base();
        for h in [1e-2, 5e-3] {
            let mut worst: f64 = 0.0;
            for &(x, y) in &[(0.3, 0.7), (1.2, -0.4), (-0.8, 0.1)] {
                let d1 = (mu_eval(&c, [x + h, y]).unwrap() - mu_eval(&c, [x - h, y]).unwrap()) / (2.0 * h);
                let d2 = (mu_eval(&c, [x, y + h]).unwrap() - mu_eval(&c, [x, y - h]).unwrap()) / (2.0 * h);
                let f = f_eval(&c, [x, y]);
                worst = worst.max((f[0] + 0.5 * d1).abs()).max((f[1] + 0.5 * d2).abs());
            }
            assert!(worst < 0.5 * h * h, "h={h} err={worst}");
        }
    }

    #[test]
    fn custom_out_of_range() {
        let mu = RadialTable::from_fn(1.2, 101, |r| 1.0 - r * r, false).unwrap();
        let f = RadialTable::from_fn(1.2, 101, |r| r, true).unwrap();
        let c = ModelConfig::custom(mu, f, 0.05, 0.0, custom_grid());
        assert!(matches!(mu_eval(&c, [1.0, 1.0]), Err(Error::OutOfRange { .. })));
        assert_eq!(c.f_rad(1.5), 0.0);
        assert!((mu_eval(&c, [0.6, 0.0]).unwrap() - 0.64).abs() < 1e-12);
    }

    #[test]
    fn hypotheses_gaussian_pass() {
        let rep = validate_hypotheses(&base());
        assert!(rep.passed(), "{:?}", rep.failures);
        assert!(rep.f_prime_origin_positive);
    }

    #[test]
    fn hypotheses_cosine_fails() {
        let mu = RadialTable::from_fn(4.0, 801, f64::cos, false).unwrap();
        let f = RadialTable::from_fn(4.0, 801, |r| r, true).unwrap();
        let c = ModelConfig::custom(mu, f, 0.05, 0.0, custom_grid());
        let rep = validate_hypotheses(&c);
        assert!(!rep.passed());
        assert!(!rep.mu_decreasing);
    }

    #[test]
    fn hypotheses_zero_forcing_fails() {
        let mu = RadialTable::from_fn(2.0, 201, |r| 1.0 - r * r, false).unwrap();
        let f = RadialTable::from_fn(2.0, 201, |_| 0.0, true).unwrap();
        let c = ModelConfig::custom(mu, f, 0.05, 0.0, custom_grid());
        let rep = validate_hypotheses(&c);
        assert!(!rep.f_positive);
        assert!(!rep.passed());
        assert!(!rep.f_prime_origin_positive);
    }

    #[test]
    fn geometry_zero_is_tight() {
        let c = base();
        let g = geometry(&c).unwrap();
        for k in 0..12 {
            let t = k as f64 * 0.5;
            let v = mu_eval(&c, [g.rho * t.cos(), g.rho * t.sin()]).unwrap();
            assert!(v.abs() < 1e-10);
        }
    }
}
