//! Airy function, Painleve II boundary-value solutions and the rescaled rim
//! profile of 2D minimizers.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::grid::{Field, Profile1D};
use crate::model::{geometry, ModelConfig};

/// `Ai(0)`.
pub const AI_ZERO: f64 = 0.355_028_053_887_817_239;
/// `-Ai'(0)`.
const AI_PRIME_ZERO_NEG: f64 = 0.258_819_403_792_806_798;

const AIRY_LIMIT: f64 = 20.0;
const SERIES_LIMIT: f64 = 2.0;
const TABLE_STEP: f64 = 0.05;

/// Maclaurin series of `(Ai, Ai')`.
pub fn airy_series(s: f64) -> (f64, f64) {
    let s3 = s * s * s;
    // f = sum t_k, g = sum u_k with t_k ~ s^(3k), u_k ~ s^(3k+1)
    let (mut t, mut u) = (1.0, s);
    let (mut f, mut g) = (1.0, s);
    // termwise derivatives
    let (mut td, mut ud) = (0.0, 1.0);
    let (mut fd, mut gd) = (0.0, 1.0);
    for k in 1..200 {
        let kf = 3.0 * k as f64;
        t *= s3 / ((kf - 1.0) * kf);
        u *= s3 / (kf * (kf + 1.0));
        td = if k == 1 { s * s / 2.0 } else { td * s3 / ((kf - 3.0) * (kf - 1.0)) };
        ud *= s3 / (kf * (kf - 2.0));
        f += t;
        g += u;
        fd += td;
        gd += ud;
        if k > 3 && t.abs() + u.abs() + td.abs() + ud.abs() < 1e-18 {
            break;
        }
    }
    (AI_ZERO * f - AI_PRIME_ZERO_NEG * g, AI_ZERO * fd - AI_PRIME_ZERO_NEG * gd)
}

/// Leading terms of the large-argument expansion of `(Ai, Ai')` for `s > 0`.
fn airy_asymptotic(s: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * s.powf(1.5);
    let pre = (-zeta).exp() / (2.0 * std::f64::consts::PI.sqrt());
    let (mut u, mut sum_u, mut sum_v) = (1.0, 1.0, 1.0);
    let mut z = 1.0;
    for k in 1..30 {
        let kf = k as f64;
        u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
        let v = -u * (6.0 * kf + 1.0) / (6.0 * kf - 1.0);
        z *= -zeta;
        let (tu, tv) = (u / z, v / z);
        sum_u += tu;
        sum_v += tv;
        if tu.abs() < 1e-17 * sum_u.abs() {
            break;
        }
    }
    (pre * s.powf(-0.25) * sum_u, -pre * s.powf(0.25) * sum_v)
}

/// One Taylor step of `y'' = s y` from `s0` to `s0 + delta`.
fn taylor_step(s0: f64, y: f64, dy: f64, delta: f64) -> (f64, f64) {
    // a_{k+2} = (s0 a_k + a_{k-1}) / ((k+2)(k+1))
    let mut a = [0.0f64; 64];
    a[0] = y;
    a[1] = dy;
    a[2] = s0 * y / 2.0;
    for k in 1..62 {
        a[k + 2] = (s0 * a[k] + a[k - 1]) / (((k + 2) * (k + 1)) as f64);
    }
    let (mut val, mut der) = (0.0, 0.0);
    for k in (0..64).rev() {
        val = val * delta + a[k];
    }
    for k in (1..64).rev() {
        der = der * delta + k as f64 * a[k];
    }
    (val, der)
}

/// `(Ai, Ai')` at `s_k = start + k * step`, integrated from `(y0, dy0)` at `start`.
fn integrate_table(start: f64, y0: f64, dy0: f64, step: f64, count: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(count + 1);
    let (mut y, mut dy) = (y0, dy0);
    out.push((y, dy));
    for k in 0..count {
        let s0 = start + step * k as f64;
        // two half steps keep the series short
        let (y1, d1) = taylor_step(s0, y, dy, 0.5 * step);
        let (y2, d2) = taylor_step(s0 + 0.5 * step, y1, d1, 0.5 * step);
        y = y2;
        dy = d2;
        out.push((y, dy));
    }
    out
}

struct AiryTables {
    /// Nodes `20 - k * step` down to 0 (integrated backwards from the expansion).
    right: Vec<(f64, f64)>,
    /// Nodes `-2 - k * step` down to -20 (integrated forwards from the series).
    left: Vec<(f64, f64)>,
}

fn tables() -> &'static AiryTables {
    static TABLES: OnceLock<AiryTables> = OnceLock::new();
    TABLES.get_or_init(|| {
        let (y, dy) = airy_asymptotic(AIRY_LIMIT);
        let n_right = (AIRY_LIMIT / TABLE_STEP).round() as usize;
        let right = integrate_table(AIRY_LIMIT, y, dy, -TABLE_STEP, n_right);
        let (y, dy) = airy_series(-SERIES_LIMIT);
        let n_left = ((AIRY_LIMIT - SERIES_LIMIT) / TABLE_STEP).round() as usize;
        let left = integrate_table(-SERIES_LIMIT, y, dy, -TABLE_STEP, n_left);
        AiryTables { right, left }
    })
}

/// `(Ai, Ai')` obtained by integrating the Airy equation backwards from the
/// large-argument expansion at `s = 20`; valid on `[0, 20]`.
pub fn airy_by_integration(s: f64) -> Result<(f64, f64)> {
    if !(0.0..=AIRY_LIMIT).contains(&s) {
        return Err(Error::AiryRange { s });
    }
    let t = tables();
    let k = ((AIRY_LIMIT - s) / TABLE_STEP).round() as usize;
    let node = AIRY_LIMIT - TABLE_STEP * k as f64;
    let (y, dy) = t.right[k];
    Ok(taylor_step(node, y, dy, s - node))
}

/// `(Ai(s), Ai'(s))` for `s` in `[-20, 20]`.
pub fn airy_ai_with_derivative(s: f64) -> Result<(f64, f64)> {
    if !(s.abs() <= AIRY_LIMIT) {
        return Err(Error::AiryRange { s });
    }
    if s.abs() <= SERIES_LIMIT {
        return Ok(airy_series(s));
    }
    if s > 0.0 {
        return airy_by_integration(s);
    }
    let t = tables();
    let k = ((-SERIES_LIMIT - s) / TABLE_STEP).round() as usize;
    let node = -SERIES_LIMIT - TABLE_STEP * k as f64;
    let (y, dy) = t.left[k.min(t.left.len() - 1)];
    Ok(taylor_step(node, y, dy, s - node))
}

/// Airy function `Ai(s)` for `s` in `[-20, 20]`.
pub fn airy_ai(s: f64) -> Result<f64> {
    airy_ai_with_derivative(s).map(|(v, _)| v)
}

/// Real root of `s y + 2 y^3 + alpha = 0` reached by Newton's method from `start`.
pub fn cubic_root(s: f64, alpha: f64, start: f64) -> f64 {
    let mut y = start;
    for _ in 0..100 {
        let f = s * y + 2.0 * y * y * y + alpha;
        let d = s + 6.0 * y * y;
        if d == 0.0 {
            break;
        }
        let step = f / d;
        y -= step;
        if step.abs() <= 1e-16 * y.abs().max(1e-300) {
            break;
        }
    }
    y
}

/// Discretisation of `y'' = s y + 2 y^3 + alpha` on a uniform mesh.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PainleveProblem {
    pub s_min: f64,
    pub s_max: f64,
    pub n: usize,
    pub alpha: f64,
}

impl PainleveProblem {
    pub const DEFAULT_DOMAIN: (f64, f64) = (-12.0, 8.0);
    pub const DEFAULT_NODES: usize = 4001;

    fn validate(&self) -> Result<()> {
        if self.s_min > -8.0 || self.s_max < 6.0 || self.s_max > AIRY_LIMIT || self.n < 16 {
            return Err(Error::InvalidConfig(format!(
                "Painleve domain must contain [-8, 6] within [-20, 20] and have >= 16 nodes, got [{}, {}] with {}",
                self.s_min, self.s_max, self.n
            )));
        }
        Ok(())
    }

    fn spacing(&self) -> f64 {
        (self.s_max - self.s_min) / (self.n - 1) as f64
    }

    fn s(&self, k: usize) -> f64 {
        self.s_min + self.spacing() * k as f64
    }

    /// Boundary values: the positive parabolic branch on the left, Airy decay
    /// plus the small cubic root on the right.
    fn boundary_values(&self) -> Result<(f64, f64)> {
        let left_start = (self.s_min.abs() / 2.0).sqrt();
        let left = if self.alpha == 0.0 {
            left_start
        } else {
            cubic_root(self.s_min, self.alpha, left_start)
        };
        let decay = if self.alpha == 0.0 {
            0.0
        } else {
            cubic_root(self.s_max, self.alpha, -self.alpha / self.s_max)
        };
        Ok((left, airy_ai(self.s_max)? + decay))
    }

    /// Discrete residual `(y_{k-1} - 2 y_k + y_{k+1})/h^2 - s_k y_k - 2 y_k^3 - alpha`
    /// at interior nodes.
    pub fn residual(&self, y: &[f64]) -> Vec<f64> {
        let h2 = self.spacing().powi(2);
        (1..self.n - 1)
            .map(|k| {
                (y[k - 1] - 2.0 * y[k] + y[k + 1]) / h2 - self.s(k) * y[k] - 2.0 * y[k].powi(3) - self.alpha
            })
            .collect()
    }

    /// Newton iteration from `guess`; the boundary entries are overwritten.
    fn newton(&self, mut y: Vec<f64>) -> Result<Vec<f64>> {
        let (left, right) = self.boundary_values()?;
        let n = self.n;
        y[0] = left;
        y[n - 1] = right;
        let h2 = self.spacing().powi(2);
        let m = n - 2;
        let mut diag = vec![0.0; m];
        let mut rhs = vec![0.0; m];
        let off = 1.0 / h2;
        let mut last = f64::INFINITY;
        for _ in 0..50 {
            let r = self.residual(&y);
            for k in 0..m {
                let yk = y[k + 1];
                diag[k] = -2.0 / h2 - self.s(k + 1) - 6.0 * yk * yk;
                rhs[k] = -r[k];
            }
            let delta = solve_tridiagonal(off, &diag, &rhs);
            let size = delta.iter().fold(0.0f64, |acc, d| acc.max(d.abs()));
            // damp large early corrections
            let scale = if size > 0.5 { 0.5 / size } else { 1.0 };
            for k in 0..m {
                y[k + 1] += scale * delta[k];
            }
            last = size;
            if size < 1e-12 {
                return Ok(y);
            }
        }
        Err(Error::NewtonFailure {
            iterations: 50,
            last_update: last,
        })
    }

    fn initial_guess(&self) -> Result<Vec<f64>> {
        (0..self.n)
            .map(|k| {
                let s = self.s(k);
                let blend = 0.5 * (1.0 + s.tanh());
                let parabola = (s.abs() / 2.0).sqrt() * f64::from(u8::from(s < 0.0));
                Ok((1.0 - blend) * parabola + blend * airy_ai(s)?)
            })
            .collect()
    }
}

/// Thomas algorithm for a symmetric tridiagonal system with constant
/// off-diagonal `off`.
fn solve_tridiagonal(off: f64, diag: &[f64], rhs: &[f64]) -> Vec<f64> {
    let m = diag.len();
    let mut c = vec![0.0; m];
    let mut d = vec![0.0; m];
    c[0] = off / diag[0];
    d[0] = rhs[0] / diag[0];
    for k in 1..m {
        let denom = diag[k] - off * c[k - 1];
        c[k] = off / denom;
        d[k] = (rhs[k] - off * d[k - 1]) / denom;
    }
    let mut x = vec![0.0; m];
    x[m - 1] = d[m - 1];
    for k in (0..m - 1).rev() {
        x[k] = d[k] - c[k] * x[k + 1];
    }
    x
}

fn to_profile(problem: &PainleveProblem, y: Vec<f64>) -> Result<Profile1D> {
    let h = problem.spacing();
    let n = y.len();
    let mut deriv = vec![0.0; n];
    for k in 0..n {
        deriv[k] = if k == 0 {
            (-3.0 * y[0] + 4.0 * y[1] - y[2]) / (2.0 * h)
        } else if k == n - 1 {
            (3.0 * y[n - 1] - 4.0 * y[n - 2] + y[n - 3]) / (2.0 * h)
        } else {
            (y[k + 1] - y[k - 1]) / (2.0 * h)
        };
    }
    let mut p = Profile1D::new(problem.s_min, problem.s_max, y)?;
    p.derivative_values = Some(deriv);
    Ok(p)
}

/// Hastings-McLeod solution of `y'' = s y + 2 y^3` on `domain` with `n` nodes.
pub fn hastings_mcleod(domain: (f64, f64), n: usize) -> Result<Profile1D> {
    painleve_solve_alpha(0.0, domain, n)
}

/// Bounded solution of `y'' = s y + 2 y^3 + alpha` continued from the
/// Hastings-McLeod solution in steps of at most 0.1 in `alpha`.
pub fn painleve_solve_alpha(alpha: f64, domain: (f64, f64), n: usize) -> Result<Profile1D> {
    let base = PainleveProblem {
        s_min: domain.0,
        s_max: domain.1,
        n,
        alpha: 0.0,
    };
    base.validate()?;
    let mut y = base.newton(base.initial_guess()?)?;
    let steps = (alpha.abs() / 0.1).ceil() as usize;
    let mut last_good = 0.0;
    for k in 1..=steps {
        let a = alpha * k as f64 / steps as f64;
        let problem = PainleveProblem { alpha: a, ..base };
        y = problem
            .newton(y)
            .map_err(|_| Error::ContinuationFailure { last_good })?;
        last_good = a;
    }
    to_profile(&PainleveProblem { alpha, ..base }, y)
}

/// Sup of the discrete residual of `profile` for parameter `alpha`.
pub fn painleve_residual(profile: &Profile1D, alpha: f64) -> f64 {
    let problem = PainleveProblem {
        s_min: profile.s_min,
        s_max: profile.s_max,
        n: profile.n(),
        alpha,
    };
    problem
        .residual(&profile.values)
        .iter()
        .fold(0.0, |acc, r| acc.max(r.abs()))
}

/// Rim scaling: the point `xi = rho e^{i theta}`, the layer width
/// `delta = eps^(2/3) / (-mu1)^(1/3)` and the amplitude `2^(-1/2) (-mu1 eps)^(-1/3)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RimScaling {
    pub xi: [f64; 2],
    pub direction: [f64; 2],
    pub width: f64,
    pub amplitude: f64,
}

impl RimScaling {
    pub fn new(config: &ModelConfig, theta: f64) -> Result<Self> {
        let geo = geometry(config)?;
        let (c, s) = (theta.cos(), theta.sin());
        let neg_mu1 = -geo.mu1;
        Ok(Self {
            xi: [geo.rho * c, geo.rho * s],
            direction: [c, s],
            width: config.epsilon.powf(2.0 / 3.0) / neg_mu1.cbrt(),
            amplitude: 1.0 / (2f64.sqrt() * (neg_mu1 * config.epsilon).cbrt()),
        })
    }

    pub fn point(&self, s: f64) -> [f64; 2] {
        [
            self.xi[0] + self.width * s * self.direction[0],
            self.xi[1] + self.width * s * self.direction[1],
        ]
    }
}

/// `alpha = a f_1(xi) / (sqrt(2) mu1)` at `xi = rho e^{i theta}`.
pub fn layer_alpha(config: &ModelConfig, theta: f64) -> Result<f64> {
    let geo = geometry(config)?;
    let xi = [geo.rho * theta.cos(), geo.rho * theta.sin()];
    Ok(config.a * config.f1(xi[0], xi[1]) / (2f64.sqrt() * geo.mu1))
}

/// Rescaled profile `w(s) = 2^(-1/2) (-mu1 eps)^(-1/3) u(xi + delta s e)` for
/// `s` in `[-6, 6]` (241 nodes), sampled along the outward radial direction.
pub fn rescale_boundary_layer(u: &Field, config: &ModelConfig, theta: f64) -> Result<Profile1D> {
    u.check_grid(&config.grid)?;
    let scaling = RimScaling::new(config, theta)?;
    let n = 241;
    let mut values = Vec::with_capacity(n);
    for k in 0..n {
        let s = -6.0 + 12.0 * k as f64 / (n - 1) as f64;
        let [x1, x2] = scaling.point(s);
        let v = u
            .sample_bicubic(x1, x2)
            .ok_or(Error::SampleOutsideGrid { x1, x2 })?;
        values.push(scaling.amplitude * v);
    }
    Profile1D::new(-6.0, 6.0, values)
}

/// Sup distance between a rescaled rim profile and the Painleve solution for
/// `alpha`. A profile that is negative at its left end is compared with
/// `-y` where `y` solves the problem for `-alpha`.
pub fn boundary_layer_compare(profile: &Profile1D, alpha: f64) -> Result<f64> {
    let negative = profile.values[0] < 0.0;
    let (sign, a) = if negative { (-1.0, -alpha) } else { (1.0, alpha) };
    let reference = painleve_solve_alpha(a, PainleveProblem::DEFAULT_DOMAIN, PainleveProblem::DEFAULT_NODES)?;
    let mut worst: f64 = 0.0;
    for (s, v) in profile.nodes() {
        let r = reference.eval(s).ok_or(Error::WindowOutsideDomain {
            lo: profile.s_min,
            hi: profile.s_max,
            s_min: reference.s_min,
            s_max: reference.s_max,
        })?;
        worst = worst.max((v - sign * r).abs());
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn series_at_origin() {
        let (v, d) = airy_series(0.0);
        assert_eq!(v, AI_ZERO);
        assert_eq!(d, -AI_PRIME_ZERO_NEG);
    }

    #[test]
    fn integration_route_reaches_origin() {
        let (v, d) = airy_by_integration(0.0).unwrap();
        assert!((v - AI_ZERO).abs() < 1e-12, "{v}");
        assert!((d + AI_PRIME_ZERO_NEG).abs() < 1e-12, "{d}");
        // both routes agree at the seam
        let a = airy_series(2.0);
        let b = airy_by_integration(2.0).unwrap();
        assert!((a.0 - b.0).abs() < 1e-13 && (a.1 - b.1).abs() < 1e-13);
    }

    #[test]
    fn airy_range() {
        assert!(matches!(airy_ai(20.5), Err(Error::AiryRange { .. })));
        assert!(airy_ai(-20.0).is_ok());
    }

    #[test]
    fn cubic_root_condition() {
        let y = cubic_root(-8.0, 0.3, 2.0);
        assert!((-8.0 * y + 2.0 * y.powi(3) + 0.3).abs() < 1e-12);
        assert!(y > 1.9);
    }
}
